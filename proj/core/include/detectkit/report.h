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

#ifndef DETECTKIT_REPORT_H_
#define DETECTKIT_REPORT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detectkit/corpus.h"
#include "detectkit/detectors.h"
#include "detectkit/metrics.h"

namespace detectkit {

// How a detector's raw_score maps onto "higher means more AI".
enum class ScoreOrientation {
  kPValue,     // watermark p-value; enters AUC as 1 - p
  kAiPercent,  // already higher-is-AI
};

double AiScore(double raw_score, ScoreOrientation orientation);

struct RateCell {
  ConfusionCounts counts;
  std::optional<double> avg_raw_score;  // mean raw_score of scored texts
  std::optional<double> rate;           // FPR for human cells, FNR for AI cells
};

struct DisciplineRow {
  std::string discipline;
  RateCell human;
  RateCell ai;
};

struct AttackRow {
  std::string attack;  // slug
  RateCell cell;       // rate = ASR
  std::optional<double> fnr_delta;
};

struct PlotPoint {
  std::string text_id;
  std::optional<double> perplexity;
  double score = 0.0;
  std::string discipline;
};

struct EvalReport {
  std::string detector_id;
  ScoreOrientation orientation = ScoreOrientation::kAiPercent;
  ProvenanceKind baseline = ProvenanceKind::kGenerated;

  std::vector<DisciplineRow> per_discipline;
  // Rates recomputed from counts pooled over every discipline.
  DisciplineRow overall_pooled;
  // Unweighted mean of the per-discipline rates and scores that are defined.
  DisciplineRow overall_macro;
  std::vector<AttackRow> per_attack;
  std::optional<double> auc;
  std::vector<PlotPoint> plot;
  // Every text id the report was built from, sorted.
  std::vector<std::string> text_ids;
};

// Aggregates one detector's results over `corpus`. Human records feed the
// FPR cells, records whose provenance is `baseline` feed the FNR cells, and
// paraphrases whose nearest generated/watermarked ancestor is of the baseline
// kind feed the attack rows. Other records are ignored. Results are sorted by
// text_id first, so input order does not matter. Throws kNotFound for results
// naming records outside the corpus.
EvalReport BuildEvalReport(const Corpus& corpus, std::span<const DetectionResult> results,
                           ScoreOrientation orientation, ProvenanceKind baseline);

// Throws kInvalidArgument if pooled counts differ from the per-discipline sums
// or a pooled rate differs from its recomputation.
void CheckReportConsistency(const EvalReport& report);

// Percent with 2 decimals, or "undefined".
std::string FormatRate(const std::optional<double>& fraction);

// Header "discipline,n,avg_score,fpr,fpr_macro,errors": one row per
// discipline and a final "Overall" row; fpr_macro is filled on that row only.
std::string FprTableCsv(const EvalReport& report);
// Same layout with fnr/fnr_macro over the baseline AI texts.
std::string FnrTableCsv(const EvalReport& report);
// Header "attack,n,asr,fnr_delta,errors".
std::string AsrTableCsv(const EvalReport& report);
// Header "text_id,perplexity,score,discipline", one row per scored text.
std::string PlotDataCsv(const EvalReport& report);

std::string ReportToJson(const EvalReport& report);

enum class ReportFormat { kCsv, kPlotData };

// Writes "<detector>_fpr.csv", "<detector>_fnr.csv", "<detector>_asr.csv"
// (kCsv) or "<detector>_plot.csv" (kPlotData) into `dir`; returns the paths.
// Throws kIo on write failure.
std::vector<std::filesystem::path> EmitReport(const EvalReport& report, ReportFormat format,
                                              const std::filesystem::path& dir);

void WriteTextFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace detectkit

#endif  // DETECTKIT_REPORT_H_
