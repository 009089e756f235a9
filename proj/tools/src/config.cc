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

#include "detectkit_cli/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "detectkit/error.h"
#include "json.hpp"

namespace detectkit::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, where + ": " + what);
}

void RejectUnknownKeys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) Invalid(where, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!keys.count(k)) Invalid(where, "unknown field '" + k + "'");
  }
}

template <typename T>
T Get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    Invalid(where + "." + key, "wrong type");
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::uint64_t ParseKey(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      const auto key = std::stoull(s, &used, 16);
      if (used == s.size()) return key;
    } catch (const std::exception&) {
    }
  }
  Invalid(where, "key must be a hex string or a non-negative integer");
}

std::chrono::milliseconds Millis(const json& obj, const char* key, const std::string& where,
                                 std::chrono::milliseconds fallback) {
  const auto v = Get<std::int64_t>(obj, key, where, fallback.count());
  if (v < 0) Invalid(where + "." + key, "must be >= 0");
  return std::chrono::milliseconds(v);
}

EndpointConfig ParseEndpoint(const json& j, const std::string& where) {
  RejectUnknownKeys(j, where,
                    {"url", "timeout_ms", "max_retries", "initial_backoff_ms", "max_backoff_ms",
                     "requests_per_minute", "burst", "max_concurrency", "api_key_env"});
  EndpointConfig e;
  e.url = Get<std::string>(j, "url", where, "");
  if (e.url.rfind("http://", 0) != 0) Invalid(where + ".url", "must start with http://");
  e.timeout = Millis(j, "timeout_ms", where, e.timeout);
  e.max_retries = Get<int>(j, "max_retries", where, e.max_retries);
  e.initial_backoff = Millis(j, "initial_backoff_ms", where, e.initial_backoff);
  e.max_backoff = Millis(j, "max_backoff_ms", where, e.max_backoff);
  e.requests_per_minute = Get<double>(j, "requests_per_minute", where, e.requests_per_minute);
  e.burst = Get<int>(j, "burst", where, e.burst);
  e.max_concurrency = Get<int>(j, "max_concurrency", where, e.max_concurrency);
  e.api_key_env = Get<std::string>(j, "api_key_env", where, "");
  if (e.max_retries < 0 || e.burst < 1 || e.max_concurrency < 1) {
    Invalid(where, "max_retries must be >= 0, burst and max_concurrency >= 1");
  }
  return e;
}

ProvenanceKind ParseKind(const std::string& s, const std::string& where) {
  if (s == "generated") return ProvenanceKind::kGenerated;
  if (s == "watermarked") return ProvenanceKind::kWatermarked;
  Invalid(where, "expected 'generated' or 'watermarked', got '" + s + "'");
}

ExternalRule ParseRule(const std::string& s, const std::string& where) {
  if (s == "label_bands") return ExternalRule::kLabelBands;
  if (s == "probability") return ExternalRule::kProbability;
  if (s == "probability_strict") return ExternalRule::kProbabilityStrict;
  Invalid(where, "unknown rule '" + s + "'");
}

DetectorSettings ParseDetector(const json& j, const std::string& where) {
  RejectUnknownKeys(j, where,
                    {"id", "type", "baseline", "calibration", "endpoint", "rule", "max_chars"});
  DetectorSettings d;
  d.id = Get<std::string>(j, "id", where, "");
  if (d.id.empty() || d.id.find_first_of("/\\") != std::string::npos) {
    Invalid(where + ".id", "must be a non-empty file-name-safe string");
  }
  const auto type = Get<std::string>(j, "type", where, "");
  if (type == "watermark") {
    d.type = DetectorType::kWatermark;
    d.baseline = ProvenanceKind::kWatermarked;
  } else if (type == "perplexity") {
    d.type = DetectorType::kPerplexity;
  } else if (type == "external") {
    d.type = DetectorType::kExternal;
    d.endpoint = Get<std::string>(j, "endpoint", where, "");
    if (d.endpoint.empty()) Invalid(where + ".endpoint", "required for external detectors");
    d.rule = ParseRule(Get<std::string>(j, "rule", where, "probability"), where + ".rule");
    d.max_chars = Get<std::size_t>(j, "max_chars", where, d.max_chars);
  } else {
    Invalid(where + ".type", "expected watermark, perplexity or external");
  }
  if (j.contains("baseline")) {
    d.baseline = ParseKind(Get<std::string>(j, "baseline", where, ""), where + ".baseline");
  }
  if (j.contains("calibration")) {
    if (d.type != DetectorType::kPerplexity) Invalid(where, "calibration needs a perplexity type");
    const auto& c = j.at("calibration");
    const std::string cw = where + ".calibration";
    RejectUnknownKeys(c, cw, {"low", "high", "threshold"});
    PerplexityCalibration cal;
    cal.low = Get<double>(c, "low", cw, 0.0);
    cal.high = Get<double>(c, "high", cw, 0.0);
    cal.threshold = Get<double>(c, "threshold", cw, 50.0);
    if (!(cal.low < cal.high)) Invalid(cw, "low must be below high");
    d.calibration = cal;
  }
  return d;
}

AttackSettings ParseAttack(const json& j, const std::string& where, const std::filesystem::path& base) {
  RejectUnknownKeys(j, where, {"name", "method", "lexicon", "target_rate", "targets"});
  AttackSettings a;
  try {
    a.name = ParseAttackName(Get<std::string>(j, "name", where, ""));
  } catch (const Error& e) {
    Invalid(where + ".name", e.what());
  }
  const auto method = Get<std::string>(j, "method", where, "llm");
  if (method == "llm") {
    a.method = AttackMethod::kLlm;
  } else if (method == "synonym") {
    if (a.name != AttackName::kWordReplacement) {
      Invalid(where + ".method", "synonym substitution implements word_replacement only");
    }
    a.method = AttackMethod::kSynonym;
    const auto lex = Get<std::string>(j, "lexicon", where, "");
    if (lex.empty()) Invalid(where + ".lexicon", "required for the synonym method");
    a.lexicon = Resolve(base, lex);
  } else {
    Invalid(where + ".method", "expected llm or synonym");
  }
  a.target_rate = Get<double>(j, "target_rate", where, a.target_rate);
  if (!(a.target_rate >= 0.0 && a.target_rate <= 1.0)) {
    Invalid(where + ".target_rate", "must lie in [0, 1]");
  }
  if (j.contains("targets")) {
    a.targets.clear();
    for (const auto& t : Get<std::vector<std::string>>(j, "targets", where, {})) {
      a.targets.push_back(ParseKind(t, where + ".targets"));
    }
  }
  return a;
}

}  // namespace

RunConfig ParseRunConfig(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RejectUnknownKeys(j, "config",
                    {"input", "output_dir", "seed", "jobs", "model", "generation", "watermark",
                     "endpoints", "paraphraser", "embedder", "detectors", "attacks"});
  RunConfig c;
  c.canonical = j.dump();
  if (j.contains("input")) c.input = Resolve(base_dir, Get<std::string>(j, "input", "config", ""));
  c.output_dir = Resolve(base_dir, Get<std::string>(j, "output_dir", "config", "out"));
  c.seed = Get<std::uint64_t>(j, "seed", "config", 0);
  c.jobs = Get<int>(j, "jobs", "config", 1);
  if (c.jobs < 1) Invalid("config.jobs", "must be >= 1");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    RejectUnknownKeys(m, "model", {"path", "order", "smoothing", "k"});
    if (m.contains("path")) c.model.path = Resolve(base_dir, Get<std::string>(m, "path", "model", ""));
    c.model.order = Get<int>(m, "order", "model", c.model.order);
    if (c.model.order < 1) Invalid("model.order", "must be >= 1");
    const auto smoothing = Get<std::string>(m, "smoothing", "model", "add_k");
    if (smoothing == "add_k") {
      const double k = Get<double>(m, "k", "model", 0.1);
      if (!(k > 0.0)) Invalid("model.k", "must be > 0");
      c.model.smoothing = Smoothing::AddK(k);
    } else if (smoothing == "witten_bell") {
      c.model.smoothing = Smoothing::WittenBell();
    } else {
      Invalid("model.smoothing", "expected add_k or witten_bell");
    }
  }

  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    RejectUnknownKeys(g, "generation", {"max_tokens", "min_tokens", "temperature", "top_k"});
    c.generation.max_tokens = Get<int>(g, "max_tokens", "generation", c.generation.max_tokens);
    c.generation.min_tokens = Get<int>(g, "min_tokens", "generation", c.generation.min_tokens);
    c.generation.temperature = Get<double>(g, "temperature", "generation", 1.0);
    c.generation.top_k = Get<int>(g, "top_k", "generation", 0);
    if (c.generation.max_tokens < 1 || c.generation.min_tokens < 0 ||
        c.generation.min_tokens > c.generation.max_tokens || !(c.generation.temperature > 0.0) ||
        c.generation.top_k < 0) {
      Invalid("generation", "need 0 <= min_tokens <= max_tokens, max_tokens >= 1, "
                            "temperature > 0, top_k >= 0");
    }
  }
  c.watermark.max_tokens = c.generation.max_tokens;

  if (j.contains("watermark")) {
    const auto& w = j.at("watermark");
    RejectUnknownKeys(w, "watermark",
                      {"gamma", "delta", "key", "context_width", "min_detect_tokens", "alpha"});
    c.watermark.gamma = Get<double>(w, "gamma", "watermark", c.watermark.gamma);
    c.watermark.delta = Get<double>(w, "delta", "watermark", c.watermark.delta);
    if (w.contains("key")) c.watermark.key = ParseKey(w.at("key"), "watermark.key");
    c.watermark.context_width = Get<int>(w, "context_width", "watermark", 1);
    c.watermark.min_detect_tokens =
        Get<int>(w, "min_detect_tokens", "watermark", c.watermark.min_detect_tokens);
    c.alpha = Get<double>(w, "alpha", "watermark", c.alpha);
  }
  try {
    c.watermark.Validate();
  } catch (const Error& e) {
    Invalid("watermark", e.what());
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) Invalid("watermark.alpha", "must lie in (0, 1)");

  if (j.contains("endpoints")) {
    const auto& e = j.at("endpoints");
    if (!e.is_object()) Invalid("endpoints", "expected an object");
    for (const auto& [name, v] : e.items()) c.endpoints[name] = ParseEndpoint(v, "endpoints." + name);
  }
  c.paraphraser = Get<std::string>(j, "paraphraser", "config", "");
  c.embedder = Get<std::string>(j, "embedder", "config", "");
  for (const auto* name : {&c.paraphraser, &c.embedder}) {
    if (!name->empty() && !c.endpoints.count(*name)) {
      Invalid("config", "unknown endpoint '" + *name + "'");
    }
  }

  if (j.contains("detectors")) {
    const auto& ds = j.at("detectors");
    if (!ds.is_array()) Invalid("detectors", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto d = ParseDetector(ds[i], "detectors[" + std::to_string(i) + "]");
      if (!ids.insert(d.id).second) Invalid("detectors", "duplicate id '" + d.id + "'");
      if (d.type == DetectorType::kExternal && !c.endpoints.count(d.endpoint)) {
        Invalid("detectors[" + std::to_string(i) + "]", "unknown endpoint '" + d.endpoint + "'");
      }
      c.detectors.push_back(std::move(d));
    }
  }
  if (j.contains("attacks")) {
    const auto& as = j.at("attacks");
    if (!as.is_array()) Invalid("attacks", "expected an array");
    for (std::size_t i = 0; i < as.size(); ++i) {
      c.attacks.push_back(ParseAttack(as[i], "attacks[" + std::to_string(i) + "]", base_dir));
    }
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseRunConfig(buffer.str(), path.parent_path());
}

const EndpointConfig& RequireEndpoint(const RunConfig& config, const std::string& name) {
  auto it = config.endpoints.find(name);
  if (it == config.endpoints.end()) {
    throw Error(ErrorCode::kInvalidConfig, "no endpoint named '" + name + "'");
  }
  return it->second;
}

void CheckEndpointCredentials(const RunConfig& config, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    const auto& e = RequireEndpoint(config, name);
    if (!e.api_key_env.empty() && std::getenv(e.api_key_env.c_str()) == nullptr) {
      throw Error(ErrorCode::kInvalidConfig, "endpoint '" + name + "' needs environment variable " +
                                                 e.api_key_env);
    }
  }
}

}  // namespace detectkit::cli
