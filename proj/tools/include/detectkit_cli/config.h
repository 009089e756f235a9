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

#ifndef DETECTKIT_CLI_CONFIG_H_
#define DETECTKIT_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detectkit/attacks.h"
#include "detectkit/corpus.h"
#include "detectkit/detectors.h"
#include "detectkit/http_client.h"
#include "detectkit/language_model.h"
#include "detectkit/watermark.h"

namespace detectkit::cli {

struct ModelSettings {
  std::optional<std::filesystem::path> path;  // defaults to <out>/model.json
  int order = 3;
  Smoothing smoothing = Smoothing::AddK(0.1);
};

struct GenerationSettings {
  int max_tokens = 1000;
  int min_tokens = 0;
  double temperature = 1.0;
  int top_k = 0;
};

enum class DetectorType { kWatermark, kPerplexity, kExternal };

struct DetectorSettings {
  std::string id;
  DetectorType type = DetectorType::kWatermark;
  // Records of this kind form the AI class in evaluation.
  ProvenanceKind baseline = ProvenanceKind::kGenerated;
  std::optional<PerplexityCalibration> calibration;  // perplexity only
  std::string endpoint;                               // external only
  ExternalRule rule = ExternalRule::kProbability;
  std::size_t max_chars = kDefaultExternalCharCap;
};

enum class AttackMethod { kLlm, kSynonym };

struct AttackSettings {
  AttackName name = AttackName::kPerplexity;
  AttackMethod method = AttackMethod::kLlm;
  std::optional<std::filesystem::path> lexicon;  // synonym only
  double target_rate = 1.0;
  std::vector<ProvenanceKind> targets = {ProvenanceKind::kGenerated,
                                         ProvenanceKind::kWatermarked};
};

// The whole run, parsed from one JSON document. Relative paths resolve
// against the directory holding the config file.
struct RunConfig {
  std::optional<std::filesystem::path> input;  // ingest source
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  ModelSettings model;
  GenerationSettings generation;
  WatermarkConfig watermark;
  double alpha = 0.05;
  std::map<std::string, EndpointConfig> endpoints;
  std::string paraphraser;  // endpoint name
  std::string embedder;     // endpoint name; empty selects local hashing
  std::vector<DetectorSettings> detectors;
  std::vector<AttackSettings> attacks;

  // Canonical JSON of the document as read, used for the manifest hash.
  std::string canonical;
};

// Throws kInvalidConfig naming the offending field.
RunConfig ParseRunConfig(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

const EndpointConfig& RequireEndpoint(const RunConfig& config, const std::string& name);

// Checks that every environment variable named by an endpoint is set.
void CheckEndpointCredentials(const RunConfig& config, const std::vector<std::string>& names);

}  // namespace detectkit::cli

#endif  // DETECTKIT_CLI_CONFIG_H_
