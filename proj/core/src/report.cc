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

#include "detectkit/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "detectkit/attacks.h"
#include "detectkit/error.h"
#include "json.hpp"

namespace detectkit {
namespace {

struct CellAccumulator {
  ConfusionCounts counts;
  double score_sum = 0.0;
  std::size_t scored = 0;

  void Add(const DetectionResult& r, bool is_ai) {
    if (!r.ok()) {
      ++counts.errors;
      return;
    }
    if (is_ai) {
      r.positive ? ++counts.tp : ++counts.fn;
    } else {
      r.positive ? ++counts.fp : ++counts.tn;
    }
    score_sum += r.raw_score;
    ++scored;
  }

  RateCell Finish(bool is_ai) const {
    RateCell cell;
    cell.counts = counts;
    if (scored > 0) cell.avg_raw_score = score_sum / static_cast<double>(scored);
    cell.rate = is_ai ? Fnr(counts) : Fpr(counts);
    return cell;
  }
};

std::optional<double> MeanOfDefined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FormatScore(const std::optional<double>& v) {
  return v ? Fixed(*v, 4) : std::string("undefined");
}

std::string RateTableCsv(const EvalReport& report, bool ai, const char* column) {
  std::string out = std::string("discipline,n,avg_score,") + column + "," + column +
                    "_macro,errors\n";
  auto row = [&](const std::string& name, const RateCell& cell, const std::string& macro) {
    out += CsvField(name) + "," + std::to_string(cell.counts.scored()) + "," +
           FormatScore(cell.avg_raw_score) + "," + FormatRate(cell.rate) + "," + macro + "," +
           std::to_string(cell.counts.errors) + "\n";
  };
  for (const auto& d : report.per_discipline) row(d.discipline, ai ? d.ai : d.human, "");
  const RateCell& pooled = ai ? report.overall_pooled.ai : report.overall_pooled.human;
  const RateCell& macro = ai ? report.overall_macro.ai : report.overall_macro.human;
  row("Overall", pooled, FormatRate(macro.rate));
  return out;
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json CellJson(const RateCell& c) {
  return {{"tp", c.counts.tp},
          {"fp", c.counts.fp},
          {"tn", c.counts.tn},
          {"fn", c.counts.fn},
          {"errors", c.counts.errors},
          {"avg_raw_score", OptionalJson(c.avg_raw_score)},
          {"rate", OptionalJson(c.rate)}};
}

nlohmann::ordered_json RowJson(const DisciplineRow& r) {
  return {{"discipline", r.discipline}, {"human", CellJson(r.human)}, {"ai", CellJson(r.ai)}};
}

bool SameRate(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

}  // namespace

double AiScore(double raw_score, ScoreOrientation orientation) {
  return orientation == ScoreOrientation::kPValue ? 1.0 - raw_score : raw_score;
}

std::string FormatRate(const std::optional<double>& fraction) {
  return fraction ? Fixed(*fraction * 100.0, 2) : std::string("undefined");
}

EvalReport BuildEvalReport(const Corpus& corpus, std::span<const DetectionResult> results,
                           ScoreOrientation orientation, ProvenanceKind baseline) {
  std::vector<const DetectionResult*> sorted;
  sorted.reserve(results.size());
  for (const auto& r : results) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DetectionResult* a, const DetectionResult* b) {
                     return a->text_id < b->text_id;
                   });

  EvalReport report;
  report.orientation = orientation;
  report.baseline = baseline;
  if (!results.empty()) report.detector_id = results.front().detector_id;

  std::map<Discipline, std::pair<CellAccumulator, CellAccumulator>> by_discipline;
  std::map<std::string, CellAccumulator> by_attack;
  CellAccumulator pooled_human, pooled_ai;
  std::vector<ScoredLabel> auc_points;

  for (const DetectionResult* r : sorted) {
    const EssayRecord* rec = corpus.Find(r->text_id);
    if (rec == nullptr) {
      throw Error(ErrorCode::kNotFound, "result for unknown text '" + r->text_id + "'");
    }
    report.text_ids.push_back(rec->id);
    if (r->ok()) {
      PlotPoint p;
      p.text_id = rec->id;
      auto it = r->detail.find("perplexity");
      if (it != r->detail.end()) p.perplexity = std::stod(it->second);
      p.score = r->raw_score;
      p.discipline = rec->discipline.Name();
      report.plot.push_back(std::move(p));
    }

    const ProvenanceKind kind = rec->provenance.kind;
    if (kind == ProvenanceKind::kHuman) {
      by_discipline[rec->discipline].first.Add(*r, false);
      pooled_human.Add(*r, false);
      if (r->ok()) auc_points.push_back({AiScore(r->raw_score, orientation), false});
    } else if (kind == baseline) {
      by_discipline[rec->discipline].second.Add(*r, true);
      pooled_ai.Add(*r, true);
      if (r->ok()) auc_points.push_back({AiScore(r->raw_score, orientation), true});
    } else if (kind == ProvenanceKind::kParaphrased) {
      const EssayRecord* origin = corpus.FindAncestor(rec->id, [](const EssayRecord& a) {
        return a.provenance.kind == ProvenanceKind::kGenerated ||
               a.provenance.kind == ProvenanceKind::kWatermarked;
      });
      if (origin != nullptr && origin->provenance.kind == baseline) {
        by_attack[rec->provenance.attack].Add(*r, true);
      }
    }
  }

  std::vector<std::optional<double>> fprs, fnrs, human_scores, ai_scores;
  for (const auto& [discipline, acc] : by_discipline) {
    DisciplineRow row{discipline.Name(), acc.first.Finish(false), acc.second.Finish(true)};
    fprs.push_back(row.human.rate);
    fnrs.push_back(row.ai.rate);
    human_scores.push_back(row.human.avg_raw_score);
    ai_scores.push_back(row.ai.avg_raw_score);
    report.per_discipline.push_back(std::move(row));
  }
  report.overall_pooled = {"Overall", pooled_human.Finish(false), pooled_ai.Finish(true)};
  report.overall_macro.discipline = "Overall (macro)";
  report.overall_macro.human.counts = pooled_human.counts;
  report.overall_macro.human.rate = MeanOfDefined(fprs);
  report.overall_macro.human.avg_raw_score = MeanOfDefined(human_scores);
  report.overall_macro.ai.counts = pooled_ai.counts;
  report.overall_macro.ai.rate = MeanOfDefined(fnrs);
  report.overall_macro.ai.avg_raw_score = MeanOfDefined(ai_scores);

  auto attack_rank = [](const std::string& slug) {
    const auto& all = AllAttacks();
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (AttackSlug(all[i]) == slug) return i;
    }
    return all.size();
  };
  std::vector<std::string> slugs;
  for (const auto& [slug, acc] : by_attack) slugs.push_back(slug);
  std::stable_sort(slugs.begin(), slugs.end(), [&](const std::string& a, const std::string& b) {
    return attack_rank(a) < attack_rank(b);
  });
  for (const auto& slug : slugs) {
    AttackRow row;
    row.attack = slug;
    row.cell = by_attack.at(slug).Finish(true);
    if (row.cell.rate && report.overall_pooled.ai.rate) {
      row.fnr_delta = FnrDelta(Percent::FromFraction(*row.cell.rate),
                               Percent::FromFraction(*report.overall_pooled.ai.rate))
                          .fraction();
    }
    report.per_attack.push_back(std::move(row));
  }

  try {
    report.auc = Auc(auc_points);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefined) throw;
  }

  CheckReportConsistency(report);
  return report;
}

void CheckReportConsistency(const EvalReport& report) {
  ConfusionCounts human, ai;
  for (const auto& d : report.per_discipline) {
    human += d.human.counts;
    ai += d.ai.counts;
  }
  if (!(human == report.overall_pooled.human.counts) ||
      !(ai == report.overall_pooled.ai.counts)) {
    throw Error(ErrorCode::kInvalidArgument,
                "pooled counts differ from the per-discipline sums");
  }
  if (!SameRate(Fpr(human), report.overall_pooled.human.rate) ||
      !SameRate(Fnr(ai), report.overall_pooled.ai.rate)) {
    throw Error(ErrorCode::kInvalidArgument, "pooled rate differs from its recomputation");
  }
}

std::string FprTableCsv(const EvalReport& report) { return RateTableCsv(report, false, "fpr"); }

std::string FnrTableCsv(const EvalReport& report) { return RateTableCsv(report, true, "fnr"); }

std::string AsrTableCsv(const EvalReport& report) {
  std::string out = "attack,n,asr,fnr_delta,errors\n";
  for (const auto& a : report.per_attack) {
    std::string name = a.attack;
    try {
      name = std::string(AttackDisplayName(ParseAttackName(a.attack)));
    } catch (const Error&) {
    }
    out += CsvField(name) + "," + std::to_string(a.cell.counts.scored()) + "," +
           FormatRate(a.cell.rate) + "," + FormatRate(a.fnr_delta) + "," +
           std::to_string(a.cell.counts.errors) + "\n";
  }
  return out;
}

std::string PlotDataCsv(const EvalReport& report) {
  std::string out = "text_id,perplexity,score,discipline\n";
  for (const auto& p : report.plot) {
    out += CsvField(p.text_id) + "," + (p.perplexity ? Exact(*p.perplexity) : std::string()) +
           "," + Exact(p.score) + "," + CsvField(p.discipline) + "\n";
  }
  return out;
}

std::string ReportToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["detector_id"] = report.detector_id;
  j["score"] = report.orientation == ScoreOrientation::kPValue ? "p_value" : "ai_percent";
  j["baseline"] = Provenance{report.baseline, {}}.ToString();
  j["per_discipline"] = nlohmann::ordered_json::array();
  for (const auto& d : report.per_discipline) j["per_discipline"].push_back(RowJson(d));
  j["overall_pooled"] = RowJson(report.overall_pooled);
  j["overall_macro"] = RowJson(report.overall_macro);
  j["per_attack"] = nlohmann::ordered_json::array();
  for (const auto& a : report.per_attack) {
    j["per_attack"].push_back({{"attack", a.attack},
                               {"asr", OptionalJson(a.cell.rate)},
                               {"fnr_delta", OptionalJson(a.fnr_delta)},
                               {"cell", CellJson(a.cell)}});
  }
  j["auc"] = OptionalJson(report.auc);
  j["text_ids"] = report.text_ids;
  return j.dump(2) + "\n";
}

void WriteTextFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::vector<std::filesystem::path> EmitReport(const EvalReport& report, ReportFormat format,
                                              const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& suffix, const std::string& contents) {
    auto path = dir / (report.detector_id + suffix);
    WriteTextFile(path, contents);
    written.push_back(std::move(path));
  };
  if (format == ReportFormat::kCsv) {
    emit("_fpr.csv", FprTableCsv(report));
    emit("_fnr.csv", FnrTableCsv(report));
    emit("_asr.csv", AsrTableCsv(report));
  } else {
    emit("_plot.csv", PlotDataCsv(report));
  }
  return written;
}

}  // namespace detectkit
