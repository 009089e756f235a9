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

#include "detectkit_cli/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "detectkit/attacks.h"
#include "detectkit/corpus.h"
#include "detectkit/error.h"
#include "detectkit/language_model.h"
#include "detectkit/report.h"
#include "detectkit/rng.h"
#include "detectkit/sampling.h"
#include "detectkit/similarity.h"
#include "detectkit/tokenizer.h"
#include "detectkit/watermark.h"
#include "detectkit_cli/config.h"
#include "json.hpp"

#ifndef DETECTKIT_VERSION
#define DETECTKIT_VERSION "0.0.0"
#endif

namespace detectkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kIngestFile = "corpus.jsonl";
constexpr const char* kGeneratedFile = "generated.jsonl";
constexpr const char* kWatermarkedFile = "watermarked.jsonl";
constexpr const char* kAttackedFile = "attacked.jsonl";

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out_dir;
};

struct StageOptions {
  std::string corpus;
  std::string input;
  std::vector<std::string> detectors;
  std::vector<std::string> attacks;
  std::string format = "csv";
};

struct Context {
  RunConfig config;
  std::string command;
  std::ostream* out = nullptr;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ordered_json extra = ordered_json::object();

  fs::path Out(const std::string& name) const { return config.output_dir / name; }
};

template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string HexDigest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void RequireFile(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::kMissingInputs, what + " '" + p.string() + "' not found");
  }
}

// The newest stage output among `stages`, or the explicit --corpus path.
fs::path InputCorpus(const Context& ctx, const StageOptions& opts,
                     std::initializer_list<const char*> stages) {
  if (!opts.corpus.empty()) {
    RequireFile(opts.corpus, "corpus");
    return opts.corpus;
  }
  for (const char* s : stages) {
    const fs::path p = ctx.Out(s);
    if (fs::is_regular_file(p)) return p;
  }
  throw Error(ErrorCode::kMissingInputs,
              "no input corpus in '" + ctx.config.output_dir.string() + "'; run ingest first");
}

Corpus ReadCorpus(Context& ctx, const fs::path& path) {
  ctx.inputs.push_back(path.string());
  return LoadCorpus(path);
}

void WriteOutput(Context& ctx, const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  WriteTextFile(path, contents);
  ctx.outputs.push_back(path.string());
}

fs::path ModelPath(const Context& ctx) {
  return ctx.config.model.path ? *ctx.config.model.path : ctx.Out("model.json");
}

std::shared_ptr<const NGramModel> ReadModel(Context& ctx) {
  const fs::path p = ModelPath(ctx);
  RequireFile(p, "language model");
  ctx.inputs.push_back(p.string());
  return std::make_shared<const NGramModel>(LoadModel(p));
}

SampleOptions Sampling(const RunConfig& c) {
  SampleOptions s;
  s.max_tokens = c.generation.max_tokens;
  s.min_tokens = c.generation.min_tokens;
  s.temperature = c.generation.temperature;
  s.top_k = c.generation.top_k;
  return s;
}

bool HasChild(const Corpus& corpus, const std::string& id, const Provenance& p) {
  for (const auto* child : corpus.ChildrenOf(id)) {
    if (child->provenance == p) return true;
  }
  return false;
}

// ---- ingest ---------------------------------------------------------------

void Ingest(Context& ctx, const StageOptions& opts) {
  fs::path source = opts.input.empty() ? fs::path() : fs::path(opts.input);
  if (source.empty() && ctx.config.input) source = *ctx.config.input;
  if (source.empty()) throw Error(ErrorCode::kMissingInputs, "ingest needs --input or config.input");
  RequireFile(source, "input");
  Corpus corpus = ReadCorpus(ctx, source);
  const fs::path dest = ctx.Out(kIngestFile);
  WriteOutput(ctx, dest, SerializeCorpus(corpus));
  *ctx.out << "ingested " << corpus.size() << " records into " << dest.string() << "\n";
}

// ---- train-lm -------------------------------------------------------------

void TrainLm(Context& ctx, const StageOptions& opts) {
  const Corpus corpus = ReadCorpus(ctx, InputCorpus(ctx, opts, {kIngestFile}));
  std::vector<std::string> texts;
  for (const auto& r : corpus.records()) {
    if (r.provenance.kind == ProvenanceKind::kHuman) texts.push_back(r.body);
  }
  if (texts.empty()) throw Error(ErrorCode::kMissingInputs, "no human records to train on");
  const NGramModel model =
      TrainNGram(texts, ctx.config.model.order, ctx.config.model.smoothing);
  const fs::path dest = ModelPath(ctx);
  WriteOutput(ctx, dest, SerializeModel(model));
  ctx.extra["training_texts"] = texts.size();
  ctx.extra["vocabulary_size"] = model.vocabulary().size();
  *ctx.out << "trained order-" << ctx.config.model.order << " model on " << texts.size()
           << " texts (vocabulary " << model.vocabulary().size() << ") into " << dest.string()
           << "\n";
}

// ---- generate / watermark-gen ----------------------------------------------

void GenerateStage(Context& ctx, const StageOptions& opts, bool watermark) {
  const fs::path input = watermark ? InputCorpus(ctx, opts, {kGeneratedFile, kIngestFile})
                                   : InputCorpus(ctx, opts, {kIngestFile});
  Corpus corpus = ReadCorpus(ctx, input);
  const auto model = ReadModel(ctx);
  const Provenance kind = watermark ? Provenance::Watermarked() : Provenance::Generated();
  const std::string tag = watermark ? "/wm" : "/gen";

  std::vector<const EssayRecord*> parents;
  for (const auto& r : corpus.records()) {
    if (r.provenance.kind == ProvenanceKind::kHuman && !HasChild(corpus, r.id, kind)) {
      parents.push_back(&r);
    }
  }
  struct Output {
    std::string body;
    std::string prompt;
    std::uint64_t seed = 0;
  };
  std::vector<Output> outputs(parents.size());
  const SampleOptions sampling = Sampling(ctx.config);
  ParallelFor(parents.size(), ctx.config.jobs, [&](std::size_t i) {
    const EssayRecord& parent = *parents[i];
    Output& o = outputs[i];
    o.seed = DeriveSeed(ctx.config.seed, parent.id + tag);
    o.prompt = watermark ? WatermarkPrompt(parent)
                         : BuildGenerationPrompt(parent.discipline, parent.title);
    const TokenSequence prompt = Tokenize(o.prompt, model->vocabulary());
    const TokenSequence ids =
        watermark ? GenerateWatermarked(*model, prompt, ctx.config.watermark, o.seed, sampling)
                  : Sample(*model, prompt, sampling, o.seed);
    o.body = Detokenize(ids, model->vocabulary());
  });

  std::vector<std::string> parent_ids;
  for (const auto* p : parents) parent_ids.push_back(p->id);
  std::size_t appended = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < parent_ids.size(); ++i) {
    if (outputs[i].body.empty()) {
      ++skipped;
      continue;
    }
    Meta meta{{"prompt", outputs[i].prompt}, {"seed", std::to_string(outputs[i].seed)}};
    if (watermark) {
      meta["gamma"] = std::to_string(ctx.config.watermark.gamma);
      meta["delta"] = std::to_string(ctx.config.watermark.delta);
      meta["key"] = HexDigest(ctx.config.watermark.key);
    }
    corpus.AppendDerived(parent_ids[i], std::move(outputs[i].body), kind, std::move(meta));
    ++appended;
  }
  const fs::path dest = ctx.Out(watermark ? kWatermarkedFile : kGeneratedFile);
  WriteOutput(ctx, dest, SerializeCorpus(corpus));
  ctx.extra["appended"] = appended;
  ctx.extra["empty_generations"] = skipped;
  *ctx.out << "appended " << appended << " " << kind.ToString() << " records into "
           << dest.string() << "\n";
}

// ---- attack ---------------------------------------------------------------

void Attack(Context& ctx, const StageOptions& opts) {
  std::vector<AttackSettings> attacks = ctx.config.attacks;
  if (!opts.attacks.empty()) {
    attacks.clear();
    for (const auto& name : opts.attacks) {
      const AttackName parsed = ParseAttackName(name);
      bool found = false;
      for (const auto& a : ctx.config.attacks) {
        if (a.name == parsed) {
          attacks.push_back(a);
          found = true;
        }
      }
      if (!found) {
        AttackSettings a;
        a.name = parsed;
        attacks.push_back(a);
      }
    }
  }
  if (attacks.empty()) throw Error(ErrorCode::kInvalidConfig, "no attacks configured");

  // Everything an attack needs is checked before the first request.
  bool needs_llm = false;
  bool needs_model = false;
  for (const auto& a : attacks) {
    if (a.method == AttackMethod::kLlm) needs_llm = true;
    if (a.method == AttackMethod::kSynonym) {
      needs_model = true;
      RequireFile(*a.lexicon, "lexicon");
    }
  }
  std::unique_ptr<ExternalParaphraser> paraphraser;
  if (needs_llm) {
    if (ctx.config.paraphraser.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "LLM attacks need a 'paraphraser' endpoint");
    }
    CheckEndpointCredentials(ctx.config, {ctx.config.paraphraser});
    paraphraser = std::make_unique<ExternalParaphraser>(
        RequireEndpoint(ctx.config, ctx.config.paraphraser));
  }
  std::shared_ptr<const NGramModel> model;
  if (needs_model) model = ReadModel(ctx);

  Corpus corpus =
      ReadCorpus(ctx, InputCorpus(ctx, opts, {kWatermarkedFile, kGeneratedFile, kIngestFile}));
  ordered_json summary = ordered_json::array();
  for (const auto& a : attacks) {
    const Provenance produced = Provenance::Paraphrased(std::string(AttackSlug(a.name)));
    std::vector<std::string> targets;
    for (const auto& r : corpus.records()) {
      const bool wanted = std::find(a.targets.begin(), a.targets.end(), r.provenance.kind) !=
                          a.targets.end();
      if (wanted && !HasChild(corpus, r.id, produced)) targets.push_back(r.id);
    }
    std::optional<SynonymLexicon> lexicon;
    if (a.method == AttackMethod::kSynonym) {
      ctx.inputs.push_back(a.lexicon->string());
      lexicon = SynonymLexicon::Load(*a.lexicon, model->vocabulary());
    }
    for (const auto& id : targets) {
      if (a.method == AttackMethod::kSynonym) {
        RunSynonymAttack(id, *lexicon, model->vocabulary(), ctx.config.watermark, a.target_rate,
                         DeriveSeed(ctx.config.seed, id + "/" + std::string(AttackSlug(a.name))),
                         corpus);
      } else {
        RunAttack(AttackSpec::For(a.name), id, *paraphraser, corpus);
      }
    }
    summary.push_back({{"attack", AttackSlug(a.name)},
                       {"method", a.method == AttackMethod::kLlm ? "llm" : "synonym"},
                       {"records", targets.size()}});
    *ctx.out << "attack " << AttackSlug(a.name) << ": " << targets.size() << " records\n";
  }
  ctx.extra["attacks"] = summary;
  const fs::path dest = ctx.Out(kAttackedFile);
  WriteOutput(ctx, dest, SerializeCorpus(corpus));
}

// ---- detect ---------------------------------------------------------------

std::vector<DetectorSettings> SelectDetectors(const Context& ctx, const StageOptions& opts) {
  if (ctx.config.detectors.empty()) throw Error(ErrorCode::kInvalidConfig, "no detectors configured");
  if (opts.detectors.empty()) return ctx.config.detectors;
  std::vector<DetectorSettings> out;
  for (const auto& id : opts.detectors) {
    auto it = std::find_if(ctx.config.detectors.begin(), ctx.config.detectors.end(),
                           [&](const DetectorSettings& d) { return d.id == id; });
    if (it == ctx.config.detectors.end()) {
      throw Error(ErrorCode::kInvalidConfig, "no detector with id '" + id + "'");
    }
    out.push_back(*it);
  }
  return out;
}

fs::path DetectionsPath(const Context& ctx, const std::string& id) {
  return ctx.Out("detections") / (id + ".jsonl");
}

void Detect(Context& ctx, const StageOptions& opts) {
  const auto detectors = SelectDetectors(ctx, opts);
  std::vector<std::string> endpoints;
  bool needs_model = false;
  for (const auto& d : detectors) {
    if (d.type == DetectorType::kExternal) endpoints.push_back(d.endpoint);
    if (d.type != DetectorType::kExternal) needs_model = true;
  }
  CheckEndpointCredentials(ctx.config, endpoints);
  std::shared_ptr<const NGramModel> model;
  if (needs_model) model = ReadModel(ctx);
  const Corpus corpus = ReadCorpus(
      ctx, InputCorpus(ctx, opts, {kAttackedFile, kWatermarkedFile, kGeneratedFile, kIngestFile}));

  ordered_json calibrations = ordered_json::object();
  for (const auto& d : detectors) {
    DetectorSpec spec;
    spec.id = d.id;
    switch (d.type) {
      case DetectorType::kWatermark:
        spec.kind = WatermarkSpec{ctx.config.watermark, ctx.config.alpha,
                                  std::make_shared<const Vocabulary>(model->vocabulary())};
        break;
      case DetectorType::kPerplexity: {
        PerplexityCalibration cal;
        if (d.calibration) {
          cal = *d.calibration;
        } else {
          std::vector<TokenSequence> human, ai;
          for (const auto& r : corpus.records()) {
            if (r.provenance.kind == ProvenanceKind::kHuman) {
              human.push_back(Tokenize(r.body, model->vocabulary()));
            } else if (r.provenance.kind == d.baseline) {
              ai.push_back(Tokenize(r.body, model->vocabulary()));
            }
          }
          auto non_empty = [](std::vector<TokenSequence>& v) {
            std::erase_if(v, [](const TokenSequence& t) { return t.empty(); });
          };
          non_empty(human);
          non_empty(ai);
          if (human.empty() || ai.empty()) {
            throw Error(ErrorCode::kMissingInputs,
                        "calibrating '" + d.id + "' needs human and " +
                            Provenance{d.baseline, {}}.ToString() + " records");
          }
          cal = CalibratePerplexity(human, ai, *model);
        }
        calibrations[d.id] = {{"low", cal.low},
                              {"high", cal.high},
                              {"threshold", cal.threshold},
                              {"youden_j", cal.youden_j}};
        spec.kind = PerplexitySpec{model, cal};
        break;
      }
      case DetectorType::kExternal:
        spec.kind = ExternalSpec{RequireEndpoint(ctx.config, d.endpoint), d.rule, d.max_chars};
        break;
    }
    const auto detector = MakeDetector(spec);
    const auto& records = corpus.records();
    std::vector<DetectionResult> results(records.size());
    ParallelFor(records.size(), ctx.config.jobs,
                [&](std::size_t i) { results[i] = Classify(*detector, records[i]); });
    std::string lines;
    std::size_t errors = 0;
    for (const auto& r : results) {
      if (!r.ok()) ++errors;
      lines += DetectionResultToJson(r);
      lines += '\n';
    }
    WriteOutput(ctx, DetectionsPath(ctx, d.id), lines);
    *ctx.out << "detector " << d.id << ": " << results.size() << " texts, " << errors
             << " errors\n";
  }
  if (!calibrations.empty()) ctx.extra["calibration"] = calibrations;
}

// ---- evaluate / report ----------------------------------------------------

std::vector<DetectionResult> ReadDetections(Context& ctx, const std::string& id) {
  const fs::path p = DetectionsPath(ctx, id);
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::kMissingInputs,
                "no detection results for '" + id + "' at '" + p.string() + "'; run detect first");
  }
  ctx.inputs.push_back(p.string());
  std::ifstream in(p, std::ios::binary);
  std::vector<DetectionResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(DetectionResultFromJson(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  p.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kMissingInputs, "detection results for '" + id + "' are empty");
  }
  return out;
}

std::vector<std::pair<DetectorSettings, EvalReport>> BuildReports(Context& ctx,
                                                                  const StageOptions& opts) {
  const auto detectors = SelectDetectors(ctx, opts);
  std::vector<std::pair<DetectorSettings, std::vector<DetectionResult>>> loaded;
  for (const auto& d : detectors) loaded.emplace_back(d, ReadDetections(ctx, d.id));
  const Corpus corpus = ReadCorpus(
      ctx, InputCorpus(ctx, opts, {kAttackedFile, kWatermarkedFile, kGeneratedFile, kIngestFile}));
  std::vector<std::pair<DetectorSettings, EvalReport>> out;
  for (auto& [d, results] : loaded) {
    const auto orientation =
        d.type == DetectorType::kWatermark ? ScoreOrientation::kPValue : ScoreOrientation::kAiPercent;
    EvalReport report = BuildEvalReport(corpus, results, orientation, d.baseline);
    report.detector_id = d.id;
    out.emplace_back(d, std::move(report));
  }
  return out;
}

void Evaluate(Context& ctx, const StageOptions& opts) {
  for (const auto& [d, report] : BuildReports(ctx, opts)) {
    WriteOutput(ctx, ctx.Out("eval") / (d.id + ".json"), ReportToJson(report));
    *ctx.out << d.id << ": FPR " << FormatRate(report.overall_pooled.human.rate) << "%, FNR "
             << FormatRate(report.overall_pooled.ai.rate) << "%, AUC "
             << (report.auc ? std::to_string(*report.auc) : std::string("undefined")) << "\n";
  }
}

void Report(Context& ctx, const StageOptions& opts) {
  ReportFormat format;
  if (opts.format == "csv") {
    format = ReportFormat::kCsv;
  } else if (opts.format == "plot") {
    format = ReportFormat::kPlotData;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--format must be csv or plot");
  }
  const fs::path dir = ctx.Out("reports");
  fs::create_directories(dir);
  for (const auto& [d, report] : BuildReports(ctx, opts)) {
    for (const auto& p : EmitReport(report, format, dir)) {
      ctx.outputs.push_back(p.string());
      *ctx.out << "wrote " << p.string() << "\n";
    }
  }
}

// ---- similarity -----------------------------------------------------------

void Similarity(Context& ctx, const StageOptions& opts) {
  std::unique_ptr<Embedder> embedder;
  if (ctx.config.embedder.empty()) {
    embedder = std::make_unique<HashingEmbedder>();
    ctx.extra["embedder"] = "hashing";
  } else {
    CheckEndpointCredentials(ctx.config, {ctx.config.embedder});
    embedder = std::make_unique<ExternalEmbedder>(RequireEndpoint(ctx.config, ctx.config.embedder));
    ctx.extra["embedder"] = ctx.config.embedder;
  }
  const Corpus corpus = ReadCorpus(
      ctx, InputCorpus(ctx, opts, {kAttackedFile, kWatermarkedFile, kGeneratedFile, kIngestFile}));
  const auto rows = SimilarityReport(corpus, *embedder);
  if (rows.empty()) throw Error(ErrorCode::kMissingInputs, "no text pairs to compare");
  WriteOutput(ctx, ctx.Out("similarity.csv"), SimilarityReportCsv(rows));
  for (const auto& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", r.average);
    *ctx.out << r.label << ": " << buf << " (" << r.pairs << " pairs)\n";
  }
}

// ---- manifest -------------------------------------------------------------

void WriteManifest(Context& ctx) {
  ordered_json m;
  m["tool"] = "detectkit";
  m["version"] = DETECTKIT_VERSION;
  m["command"] = ctx.command;
  m["config_hash"] = HexDigest(Fnv1a64(ctx.config.canonical));
  m["config"] = ctx.config.canonical.empty() ? ordered_json(nullptr)
                                             : ordered_json::parse(ctx.config.canonical);
  m["seed"] = ctx.config.seed;
  m["jobs"] = ctx.config.jobs;
  m["output_dir"] = ctx.config.output_dir.string();
  m["inputs"] = ctx.inputs;
  m["outputs"] = ctx.outputs;
  m["details"] = ctx.extra;
  const fs::path p = ctx.Out("manifest." + ctx.command + ".json");
  fs::create_directories(p.parent_path());
  WriteTextFile(p, m.dump(2) + "\n");
}

}  // namespace

std::string DetectionResultToJson(const DetectionResult& r) {
  ordered_json j;
  j["detector_id"] = r.detector_id;
  j["text_id"] = r.text_id;
  j["raw_score"] = r.raw_score;
  j["positive"] = r.positive;
  j["threshold"] = r.threshold;
  j["detail"] = r.detail;
  j["error"] = r.error ? ordered_json(ErrorCodeName(*r.error)) : ordered_json(nullptr);
  if (r.error) j["error_message"] = r.error_message;
  if (r.ok() && r.detail.count("green_count") && r.detail.count("total") && r.detail.count("z")) {
    j["verdict"] = {{"id", r.text_id},
                    {"g", std::stoll(r.detail.at("green_count"))},
                    {"T", std::stoll(r.detail.at("total"))},
                    {"z", std::stod(r.detail.at("z"))},
                    {"p_value", r.raw_score},
                    {"positive", r.positive}};
  }
  return j.dump();
}

DetectionResult DetectionResultFromJson(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    DetectionResult r;
    r.detector_id = j.at("detector_id").get<std::string>();
    r.text_id = j.at("text_id").get<std::string>();
    r.raw_score = j.at("raw_score").get<double>();
    r.positive = j.at("positive").get<bool>();
    r.threshold = j.value("threshold", 0.0);
    if (j.contains("detail")) r.detail = j.at("detail").get<std::map<std::string, std::string>>();
    if (j.contains("error") && !j.at("error").is_null()) {
      const auto name = j.at("error").get<std::string>();
      r.error = ErrorCodeFromName(name);
      if (!r.error) throw Error(ErrorCode::kParse, "unknown error class '" + name + "'");
      r.error_message = j.value("error_message", std::string());
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad detection record: ") + e.what());
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"detectkit: AI-text detector evaluation pipeline", "detectkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--config", global.config_path, "Run configuration (JSON)");
  app.add_option("--seed", global.seed, "Master seed; overrides the config");
  app.add_option("--jobs", global.jobs, "Parallel workers for local work")->check(CLI::PositiveNumber);
  app.add_option("--out", global.out_dir, "Output directory; overrides the config");
  app.set_version_flag("--version", DETECTKIT_VERSION);

  StageOptions opts;
  auto corpus_opt = [&](CLI::App* sub) {
    sub->add_option("--corpus", opts.corpus, "Input corpus (default: newest stage output)");
  };
  auto detector_opt = [&](CLI::App* sub) {
    sub->add_option("--detector", opts.detectors, "Detector id (repeatable; default: all)");
  };
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a JSONL corpus");
  ingest->add_option("--input", opts.input, "Source JSONL (default: config input)");
  auto* train = app.add_subcommand("train-lm", "Train the n-gram model on human records");
  corpus_opt(train);
  auto* generate = app.add_subcommand("generate", "Generate one essay per human record");
  corpus_opt(generate);
  auto* wm = app.add_subcommand("watermark-gen", "Generate watermarked continuations");
  corpus_opt(wm);
  auto* attack = app.add_subcommand("attack", "Paraphrase generated and watermarked records");
  corpus_opt(attack);
  attack->add_option("--attack", opts.attacks, "Attack name (repeatable; default: config)");
  auto* detect = app.add_subcommand("detect", "Run detectors over every record");
  corpus_opt(detect);
  detector_opt(detect);
  auto* evaluate = app.add_subcommand("evaluate", "Aggregate detection results");
  corpus_opt(evaluate);
  detector_opt(evaluate);
  auto* report = app.add_subcommand("report", "Write FPR/FNR/ASR tables or plot data");
  corpus_opt(report);
  detector_opt(report);
  report->add_option("--format", opts.format, "csv or plot")->check(CLI::IsMember({"csv", "plot"}));
  auto* similarity = app.add_subcommand("similarity", "Average cosine similarity table");
  corpus_opt(similarity);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << DETECTKIT_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  Context ctx;
  ctx.out = &out;
  ctx.command = app.get_subcommands().front()->get_name();
  try {
    ctx.config = global.config_path.empty() ? RunConfig{} : LoadRunConfig(global.config_path);
    if (!global.config_path.empty()) ctx.inputs.push_back(global.config_path);
    if (global.seed) ctx.config.seed = *global.seed;
    if (global.jobs) ctx.config.jobs = *global.jobs;
    if (!global.out_dir.empty()) ctx.config.output_dir = global.out_dir;

    if (ctx.command == "ingest") {
      Ingest(ctx, opts);
    } else if (ctx.command == "train-lm") {
      TrainLm(ctx, opts);
    } else if (ctx.command == "generate") {
      GenerateStage(ctx, opts, false);
    } else if (ctx.command == "watermark-gen") {
      GenerateStage(ctx, opts, true);
    } else if (ctx.command == "attack") {
      Attack(ctx, opts);
    } else if (ctx.command == "detect") {
      Detect(ctx, opts);
    } else if (ctx.command == "evaluate") {
      Evaluate(ctx, opts);
    } else if (ctx.command == "report") {
      Report(ctx, opts);
    } else if (ctx.command == "similarity") {
      Similarity(ctx, opts);
    }
    WriteManifest(ctx);
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: io_error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace detectkit::cli
