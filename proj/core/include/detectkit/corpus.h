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

#ifndef DETECTKIT_CORPUS_H_
#define DETECTKIT_CORPUS_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace detectkit {

enum class DisciplineKind { kEnglish, kBiology, kPoliticalScience, kPhilosophy, kOther };

struct Discipline {
  DisciplineKind kind = DisciplineKind::kOther;
  std::string other_name;  // only meaningful for kOther

  static Discipline English() { return {DisciplineKind::kEnglish, {}}; }
  static Discipline Biology() { return {DisciplineKind::kBiology, {}}; }
  static Discipline PoliticalScience() { return {DisciplineKind::kPoliticalScience, {}}; }
  static Discipline Philosophy() { return {DisciplineKind::kPhilosophy, {}}; }
  static Discipline Other(std::string name) { return {DisciplineKind::kOther, std::move(name)}; }

  // Accepts the display names ("Political Science") and the compact enum
  // spelling ("PoliticalScience"); anything else becomes Other(name).
  static Discipline Parse(std::string_view name);

  // Human-readable name as used in prompts and report rows.
  std::string Name() const;

  bool operator==(const Discipline&) const = default;
  auto operator<=>(const Discipline&) const = default;
};

enum class ProvenanceKind { kHuman, kGenerated, kWatermarked, kParaphrased };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::kHuman;
  std::string attack;  // set only for kParaphrased

  static Provenance Human() { return {ProvenanceKind::kHuman, {}}; }
  static Provenance Generated() { return {ProvenanceKind::kGenerated, {}}; }
  static Provenance Watermarked() { return {ProvenanceKind::kWatermarked, {}}; }
  static Provenance Paraphrased(std::string attack) {
    return {ProvenanceKind::kParaphrased, std::move(attack)};
  }

  // "human", "generated", "watermarked", "paraphrased:<attack>".
  static Provenance Parse(std::string_view s);
  std::string ToString() const;

  bool is_ai() const { return kind != ProvenanceKind::kHuman; }

  bool operator==(const Provenance&) const = default;
};

using Meta = std::map<std::string, std::string>;

struct EssayRecord {
  std::string id;
  Discipline discipline;
  std::string title;
  std::string body;
  Provenance provenance;
  std::optional<std::string> parent_id;
  Meta meta;

  bool operator==(const EssayRecord&) const = default;
};

// Ordered, id-indexed collection of essay records with validated lineage.
//
// Every derived record names a parent that exists in the corpus, lineage is
// acyclic, and human records are roots. A Corpus is read-only after
// construction except through AppendDerived, which needs exclusive access.
class Corpus {
 public:
  Corpus() = default;

  // Validates all invariants; throws Error naming the offending record.
  static Corpus FromRecords(std::vector<EssayRecord> records);

  const std::vector<EssayRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const EssayRecord* Find(std::string_view id) const;
  const EssayRecord& Get(std::string_view id) const;

  // Record followed by its ancestors, ending at the root.
  std::vector<const EssayRecord*> Lineage(std::string_view id) const;

  // Closest ancestor (excluding the record itself) matching `pred`.
  const EssayRecord* FindAncestor(
      std::string_view id, const std::function<bool(const EssayRecord&)>& pred) const;

  std::vector<const EssayRecord*> ChildrenOf(std::string_view id) const;

  // Appends a non-human record derived from `parent_id`. The id is
  // "<parent>.<tag>" ("gen", "wm", or the attack name), suffixed "-2", "-3"...
  // on collision. Body is NFC-normalized; discipline and title are inherited.
  const EssayRecord& AppendDerived(std::string_view parent_id, std::string body,
                                   Provenance provenance, Meta meta);

  // Appends a fully-formed record after validating it against the corpus.
  const EssayRecord& Append(EssayRecord record);

  bool operator==(const Corpus& other) const { return records_ == other.records_; }

 private:
  std::string FreshId(std::string_view parent_id, const Provenance& provenance) const;

  std::vector<EssayRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads line-delimited JSON records. The whole file is rejected on the first
// invalid record; messages carry the 1-based line number.
Corpus LoadCorpus(const std::filesystem::path& path);

// Parses the same format from memory; `source` labels error messages.
Corpus ParseCorpus(std::string_view jsonl, std::string_view source = "<memory>");

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);
std::string SerializeCorpus(const Corpus& corpus);

// Write a College {discipline} class essay titled '{title}'
std::string BuildGenerationPrompt(const Discipline& discipline, std::string_view title);

// First ten whitespace-delimited words of a human record's body.
std::string WatermarkPrompt(const EssayRecord& record);

}  // namespace detectkit

#endif  // DETECTKIT_CORPUS_H_
