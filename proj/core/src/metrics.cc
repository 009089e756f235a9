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

#include "detectkit/metrics.h"

#include <algorithm>
#include <cmath>

#include "detectkit/error.h"

namespace detectkit {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  errors += o.errors;
  return *this;
}

ConfusionCounts Confusion(std::span<const DetectionResult> results, const TruthTable& truth) {
  ConfusionCounts c;
  for (const auto& r : results) {
    auto it = truth.find(r.text_id);
    if (it == truth.end()) {
      throw Error(ErrorCode::kNotFound, "no truth entry for text '" + r.text_id + "'");
    }
    if (!r.ok()) {
      ++c.errors;
      continue;
    }
    const bool ai = it->second;
    if (ai) {
      r.positive ? ++c.tp : ++c.fn;
    } else {
      r.positive ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

std::optional<double> Fpr(const ConfusionCounts& c) {
  const std::size_t d = c.fp + c.tn;
  if (d == 0) return std::nullopt;
  return static_cast<double>(c.fp) / static_cast<double>(d);
}

std::optional<double> Fnr(const ConfusionCounts& c) {
  const std::size_t d = c.fn + c.tp;
  if (d == 0) return std::nullopt;
  return static_cast<double>(c.fn) / static_cast<double>(d);
}

Percent FnrDelta(Percent attack_fnr, Percent baseline_fnr) {
  return Percent{attack_fnr.value - baseline_fnr.value};
}

std::optional<double> AttackSuccessRate(std::span<const DetectionResult> results,
                                        const TruthTable& truth) {
  for (const auto& r : results) {
    auto it = truth.find(r.text_id);
    if (it != truth.end() && !it->second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "attack success rate over a human text '" + r.text_id + "'");
    }
  }
  return Fnr(Confusion(results, truth));
}

double Auc(std::span<const ScoredLabel> scores) {
  std::vector<double> ai;
  std::vector<double> human;
  for (const auto& s : scores) (s.is_ai ? ai : human).push_back(s.score);
  if (ai.empty() || human.empty()) {
    throw Error(ErrorCode::kUndefined, "AUC needs both AI and human scores");
  }
  std::sort(human.begin(), human.end());
  // Wins and half-ties per AI score via binary search over sorted human scores.
  double wins = 0.0;
  for (double a : ai) {
    const auto lo = std::lower_bound(human.begin(), human.end(), a);
    const auto hi = std::upper_bound(lo, human.end(), a);
    wins += static_cast<double>(lo - human.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(ai.size()) * static_cast<double>(human.size()));
}

double PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pearson correlation needs equal-length inputs");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pearson correlation needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kUndefined, "pearson correlation with zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detectkit
