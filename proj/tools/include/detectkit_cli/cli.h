// Copyright 2026 The detectkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DETECTKIT_CLI_CLI_H_
#define DETECTKIT_CLI_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "detectkit/detectors.h"

namespace detectkit::cli {

// Runs one subcommand. `args` excludes the program name. Failures print one
// line "error: <class>: <message>" to `err` and return nonzero.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// One detection result per line.
std::string DetectionResultToJson(const DetectionResult& r);
DetectionResult DetectionResultFromJson(const std::string& line);

}  // namespace detectkit::cli

#endif  // DETECTKIT_CLI_CLI_H_
