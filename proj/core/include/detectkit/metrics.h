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

#ifndef DETECTKIT_METRICS_H_
#define DETECTKIT_METRICS_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detectkit/detectors.h"

namespace detectkit {

// Positive class is "classified AI". Error results are kept out of the 2x2
// table and tallied in `errors`.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t errors = 0;

  std::size_t scored() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// text_id -> is_ai
using TruthTable = std::map<std::string, bool, std::less<>>;

// Throws kNotFound when a result has no truth entry.
ConfusionCounts Confusion(std::span<const DetectionResult> results, const TruthTable& truth);

// Fractions in [0, 1]; nullopt when the denominator is zero.
std::optional<double> Fpr(const ConfusionCounts& c);
std::optional<double> Fnr(const ConfusionCounts& c);

// A rate in percent. Keeps fractions and percentages from being mixed.
struct Percent {
  double value = 0.0;

  static Percent FromFraction(double f) { return Percent{f * 100.0}; }
  double fraction() const { return value / 100.0; }
  auto operator<=>(const Percent&) const = default;
};

// attack_fnr - baseline_fnr; may be negative.
Percent FnrDelta(Percent attack_fnr, Percent baseline_fnr);

// FNR over paraphrased texts. Throws kInvalidArgument if any result's truth
// is human; nullopt when nothing was scored.
std::optional<double> AttackSuccessRate(std::span<const DetectionResult> results,
                                        const TruthTable& truth);

struct ScoredLabel {
  double score = 0.0;  // higher means more AI
  bool is_ai = false;
};

// Mann-Whitney AUC: P(ai score > human score) + 0.5 * P(tie). Throws
// kUndefined unless both classes are present.
double Auc(std::span<const ScoredLabel> scores);

// Sample Pearson r. Throws kInvalidArgument on length mismatch or fewer than
// two points, kUndefined when either side has zero variance.
double PearsonCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace detectkit

#endif  // DETECTKIT_METRICS_H_
