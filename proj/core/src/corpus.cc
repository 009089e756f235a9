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

#include "detectkit/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "detectkit/error.h"
#include "detectkit/text.h"
#include "json.hpp"

namespace detectkit {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kPromptWords = 10;

std::string AtLine(std::string_view source, std::size_t line) {
  std::ostringstream os;
  os << source << ": line " << line << ": ";
  return os.str();
}

std::string RequireString(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  if (!it->is_string()) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

EssayRecord RecordFromJson(const nlohmann::json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::kParse, "record is not a JSON object");
  EssayRecord r;
  r.id = RequireString(obj, "id");
  r.discipline = Discipline::Parse(RequireString(obj, "discipline"));
  r.title = text::NormalizeNfc(RequireString(obj, "title"));
  r.body = text::NormalizeNfc(RequireString(obj, "body"));
  r.provenance = Provenance::Parse(RequireString(obj, "provenance"));
  if (auto it = obj.find("parent_id"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kParse, "field 'parent_id' must be a string or null");
    r.parent_id = it->get<std::string>();
  }
  if (auto it = obj.find("meta"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorCode::kParse, "field 'meta' must be an object");
    for (const auto& [key, value] : it->items()) {
      r.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return r;
}

ordered_json RecordToJson(const EssayRecord& r) {
  ordered_json obj;
  obj["id"] = r.id;
  obj["discipline"] = r.discipline.Name();
  obj["title"] = r.title;
  obj["body"] = r.body;
  obj["provenance"] = r.provenance.ToString();
  obj["parent_id"] = r.parent_id ? ordered_json(*r.parent_id) : ordered_json(nullptr);
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : r.meta) meta[k] = v;
  obj["meta"] = std::move(meta);
  return obj;
}

// Checks the per-record invariants that need no other records.
void ValidateLocal(const EssayRecord& r) {
  if (r.id.empty()) throw Error(ErrorCode::kInvalidArgument, "empty id");
  if (text::IsBlank(r.body)) {
    throw Error(ErrorCode::kInvalidArgument, "record '" + r.id + "' has an empty body");
  }
  if (r.provenance.kind == ProvenanceKind::kHuman && r.parent_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "human record '" + r.id + "' must not have a parent_id");
  }
  if (r.provenance.kind != ProvenanceKind::kHuman && !r.parent_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "derived record '" + r.id + "' requires a parent_id");
  }
}

std::string ProvenanceTag(const Provenance& p) {
  switch (p.kind) {
    case ProvenanceKind::kGenerated:
      return "gen";
    case ProvenanceKind::kWatermarked:
      return "wm";
    case ProvenanceKind::kParaphrased:
      return p.attack.empty() ? "para" : p.attack;
    case ProvenanceKind::kHuman:
      break;
  }
  return "human";
}

}  // namespace

Discipline Discipline::Parse(std::string_view name) {
  if (name == "English") return English();
  if (name == "Biology") return Biology();
  if (name == "Political Science" || name == "PoliticalScience") return PoliticalScience();
  if (name == "Philosophy") return Philosophy();
  return Other(std::string(name));
}

std::string Discipline::Name() const {
  switch (kind) {
    case DisciplineKind::kEnglish:
      return "English";
    case DisciplineKind::kBiology:
      return "Biology";
    case DisciplineKind::kPoliticalScience:
      return "Political Science";
    case DisciplineKind::kPhilosophy:
      return "Philosophy";
    case DisciplineKind::kOther:
      break;
  }
  return other_name;
}

Provenance Provenance::Parse(std::string_view s) {
  if (s == "human") return Human();
  if (s == "generated") return Generated();
  if (s == "watermarked") return Watermarked();
  constexpr std::string_view kPrefix = "paraphrased:";
  if (s.substr(0, kPrefix.size()) == kPrefix && s.size() > kPrefix.size()) {
    return Paraphrased(std::string(s.substr(kPrefix.size())));
  }
  throw Error(ErrorCode::kParse, "unknown provenance '" + std::string(s) + "'");
}

std::string Provenance::ToString() const {
  switch (kind) {
    case ProvenanceKind::kHuman:
      return "human";
    case ProvenanceKind::kGenerated:
      return "generated";
    case ProvenanceKind::kWatermarked:
      return "watermarked";
    case ProvenanceKind::kParaphrased:
      return "paraphrased:" + attack;
  }
  return "human";
}

Corpus Corpus::FromRecords(std::vector<EssayRecord> records) {
  Corpus corpus;
  for (auto& r : records) {
    ValidateLocal(r);
    if (corpus.index_.contains(r.id)) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate id '" + r.id + "'");
    }
    corpus.index_.emplace(r.id, corpus.records_.size());
    corpus.records_.push_back(std::move(r));
  }
  for (const auto& r : corpus.records_) {
    if (r.parent_id && !corpus.index_.contains(*r.parent_id)) {
      throw Error(ErrorCode::kNotFound,
                  "record '" + r.id + "' has dangling parent_id '" + *r.parent_id + "'");
    }
  }
  // A chain longer than the corpus must revisit a record.
  for (const auto& r : corpus.records_) {
    const EssayRecord* cur = &r;
    std::size_t hops = 0;
    while (cur->parent_id) {
      cur = &corpus.records_[corpus.index_.at(*cur->parent_id)];
      if (++hops > corpus.records_.size()) {
        throw Error(ErrorCode::kInvalidArgument, "lineage cycle through '" + r.id + "'");
      }
    }
  }
  return corpus;
}

const EssayRecord* Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

const EssayRecord& Corpus::Get(std::string_view id) const {
  const EssayRecord* r = Find(id);
  if (r == nullptr) throw Error(ErrorCode::kNotFound, "unknown record id '" + std::string(id) + "'");
  return *r;
}

std::vector<const EssayRecord*> Corpus::Lineage(std::string_view id) const {
  std::vector<const EssayRecord*> chain;
  const EssayRecord* cur = &Get(id);
  chain.push_back(cur);
  while (cur->parent_id) {
    cur = &Get(*cur->parent_id);
    chain.push_back(cur);
  }
  return chain;
}

const EssayRecord* Corpus::FindAncestor(
    std::string_view id, const std::function<bool(const EssayRecord&)>& pred) const {
  const EssayRecord* cur = &Get(id);
  while (cur->parent_id) {
    cur = &Get(*cur->parent_id);
    if (pred(*cur)) return cur;
  }
  return nullptr;
}

std::vector<const EssayRecord*> Corpus::ChildrenOf(std::string_view id) const {
  std::vector<const EssayRecord*> out;
  for (const auto& r : records_) {
    if (r.parent_id && *r.parent_id == id) out.push_back(&r);
  }
  return out;
}

std::string Corpus::FreshId(std::string_view parent_id, const Provenance& provenance) const {
  const std::string base = std::string(parent_id) + "." + ProvenanceTag(provenance);
  if (!index_.contains(base)) return base;
  for (int n = 2;; ++n) {
    std::string candidate = base + "-" + std::to_string(n);
    if (!index_.contains(candidate)) return candidate;
  }
}

const EssayRecord& Corpus::AppendDerived(std::string_view parent_id, std::string body,
                                         Provenance provenance, Meta meta) {
  if (provenance.kind == ProvenanceKind::kHuman) {
    throw Error(ErrorCode::kInvalidArgument, "derived records cannot have human provenance");
  }
  const EssayRecord* parent = Find(parent_id);
  if (parent == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown parent id '" + std::string(parent_id) + "'");
  }
  EssayRecord r;
  r.id = FreshId(parent_id, provenance);
  r.discipline = parent->discipline;
  r.title = parent->title;
  r.body = text::NormalizeNfc(body);
  r.provenance = std::move(provenance);
  r.parent_id = std::string(parent_id);
  r.meta = std::move(meta);
  return Append(std::move(r));
}

const EssayRecord& Corpus::Append(EssayRecord record) {
  ValidateLocal(record);
  if (index_.contains(record.id)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate id '" + record.id + "'");
  }
  if (record.parent_id && !index_.contains(*record.parent_id)) {
    throw Error(ErrorCode::kNotFound, "unknown parent id '" + *record.parent_id + "'");
  }
  index_.emplace(record.id, records_.size());
  records_.push_back(std::move(record));
  return records_.back();
}

Corpus ParseCorpus(std::string_view jsonl, std::string_view source) {
  std::vector<EssayRecord> records;
  std::unordered_map<std::string, std::size_t> line_of;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      EssayRecord r = RecordFromJson(nlohmann::json::parse(line));
      ValidateLocal(r);
      if (!line_of.emplace(r.id, line_no).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate id '" + r.id + "'");
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, AtLine(source, line_no) + "malformed JSON: " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), AtLine(source, line_no) + e.what());
    }
  }
  for (const auto& r : records) {
    if (r.parent_id && !line_of.contains(*r.parent_id)) {
      throw Error(ErrorCode::kNotFound, AtLine(source, line_of.at(r.id)) + "record '" + r.id +
                                            "' has dangling parent_id '" + *r.parent_id + "'");
    }
  }
  return Corpus::FromRecords(std::move(records));
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open corpus file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCorpus(buffer.str(), path.string());
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records()) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus file '" + path.string() + "'");
  out << SerializeCorpus(corpus);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string BuildGenerationPrompt(const Discipline& discipline, std::string_view title) {
  if (title.empty()) throw Error(ErrorCode::kInvalidArgument, "generation prompt needs a title");
  std::string prompt = "Write a College ";
  prompt += discipline.Name();
  prompt += " class essay titled '";
  prompt += title;
  prompt += "'";
  return prompt;
}

std::string WatermarkPrompt(const EssayRecord& record) {
  if (record.provenance.kind != ProvenanceKind::kHuman) {
    throw Error(ErrorCode::kInvalidArgument,
                "watermark prompts come from human records; '" + record.id + "' is " +
                    record.provenance.ToString());
  }
  const auto words = text::SplitWhitespace(record.body);
  std::string prompt;
  for (std::size_t i = 0; i < words.size() && i < kPromptWords; ++i) {
    if (i > 0) prompt += ' ';
    prompt += words[i];
  }
  return prompt;
}

}  // namespace detectkit
