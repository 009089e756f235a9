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

#include "detectkit/attacks.h"

#include <fstream>
#include <sstream>

#include "detectkit/error.h"
#include "detectkit/rng.h"
#include "detectkit/text.h"
#include "detectkit/tokenizer.h"
#include "json.hpp"

namespace detectkit {
namespace {

constexpr std::string_view kPerplexityTemplate =
    "Paraphrase the following text to increase the average sentence length and the sentence "
    "perplexity: [TEXT]";
constexpr std::string_view kWordReplacementTemplate =
    "Rewrite the following passage, preserving the original meaning but using different words "
    "and sentence structures while keeping the same length of the original passage: [TEXT]";
constexpr std::string_view kCollegeStudentTemplate =
    "Rewrite the following text to make it sound like it was written by a college student. You "
    "can modify sentences, replace words, and make any editorial changes necessary to make the "
    "text more readable and simple: [TEXT]";
constexpr std::string_view kRecursiveTemplate =
    "Paraphrase the following text to make it easier to read and more human-sounding, while "
    "maintaining a formal writing register and the content of the original text: [TEXT]";

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool IsAttackable(const EssayRecord& r) {
  return r.provenance.kind == ProvenanceKind::kGenerated ||
         r.provenance.kind == ProvenanceKind::kWatermarked;
}

std::string NormalizeToken(std::string_view raw) {
  return text::ToLower(text::NormalizeNfc(raw));
}

}  // namespace

AttackSpec AttackSpec::For(AttackName name) {
  switch (name) {
    case AttackName::kPerplexity:
      return {name, std::string(kPerplexityTemplate), StageInput::kOriginal};
    case AttackName::kWordReplacement:
      return {name, std::string(kWordReplacementTemplate), StageInput::kOriginal};
    case AttackName::kCollegeStudent:
      return {name, std::string(kCollegeStudentTemplate), StageInput::kOriginal};
    case AttackName::kRecursive:
      return {name, std::string(kRecursiveTemplate), StageInput::kPerplexityOutput};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown attack");
}

void AttackSpec::Validate() const {
  if (CountOccurrences(prompt_template, kTextPlaceholder) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "attack template needs exactly one [TEXT] placeholder");
  }
  const bool recursive = name == AttackName::kRecursive;
  if (recursive != (stage_input == StageInput::kPerplexityOutput)) {
    throw Error(ErrorCode::kInvalidArgument,
                "only the recursive attack consumes the perplexity attack's output");
  }
}

std::string_view AttackSlug(AttackName name) {
  switch (name) {
    case AttackName::kPerplexity:
      return "perplexity";
    case AttackName::kWordReplacement:
      return "word_replacement";
    case AttackName::kCollegeStudent:
      return "college_student";
    case AttackName::kRecursive:
      return "recursive";
  }
  return "unknown";
}

std::string_view AttackDisplayName(AttackName name) {
  switch (name) {
    case AttackName::kPerplexity:
      return "Perplexity";
    case AttackName::kWordReplacement:
      return "Word Replacement";
    case AttackName::kCollegeStudent:
      return "College Student";
    case AttackName::kRecursive:
      return "Recursive";
  }
  return "Unknown";
}

AttackName ParseAttackName(std::string_view slug) {
  for (AttackName a : AllAttacks()) {
    if (AttackSlug(a) == slug) return a;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown attack '" + std::string(slug) + "'");
}

const std::vector<AttackName>& AllAttacks() {
  static const std::vector<AttackName> kAll = {AttackName::kPerplexity, AttackName::kWordReplacement,
                                               AttackName::kCollegeStudent, AttackName::kRecursive};
  return kAll;
}

std::string RenderAttackPrompt(const AttackSpec& attack, std::string_view text) {
  attack.Validate();
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "attack payload is empty");
  const std::size_t pos = attack.prompt_template.find(kTextPlaceholder);
  std::string out = attack.prompt_template.substr(0, pos);
  out += text;
  out += attack.prompt_template.substr(pos + kTextPlaceholder.size());
  return out;
}

std::string ExtractPayload(const AttackSpec& attack, std::string_view prompt) {
  attack.Validate();
  const std::size_t pos = attack.prompt_template.find(kTextPlaceholder);
  const std::string_view prefix = std::string_view(attack.prompt_template).substr(0, pos);
  const std::string_view suffix =
      std::string_view(attack.prompt_template).substr(pos + kTextPlaceholder.size());
  if (prompt.size() < prefix.size() + suffix.size() || prompt.substr(0, prefix.size()) != prefix ||
      prompt.substr(prompt.size() - suffix.size()) != suffix) {
    throw Error(ErrorCode::kParse, "prompt does not match the attack template");
  }
  return std::string(prompt.substr(prefix.size(), prompt.size() - prefix.size() - suffix.size()));
}

ExternalParaphraser::ExternalParaphraser(EndpointConfig endpoint)
    : client_(std::make_unique<JsonHttpClient>(std::move(endpoint))) {}

std::string ExternalParaphraser::Paraphrase(const std::string& prompt) {
  const nlohmann::json request = {{"prompt", prompt}};
  const std::string raw = client_->Post(request.dump());
  try {
    const auto response = nlohmann::json::parse(raw);
    const auto& t = response.at("text");
    if (!t.is_string()) throw Error(ErrorCode::kParse, "paraphraser 'text' must be a string");
    return t.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("unparseable paraphraser response: ") + e.what());
  }
}

const EssayRecord& RunAttack(const AttackSpec& attack, std::string_view record_id,
                             Paraphraser& paraphraser, Corpus& corpus) {
  attack.Validate();
  const EssayRecord& record = corpus.Get(record_id);
  if (!IsAttackable(record)) {
    throw Error(ErrorCode::kInvalidArgument, "attacks apply to generated or watermarked records; '" +
                                                 record.id + "' is " +
                                                 record.provenance.ToString());
  }
  auto call = [&](const std::string& prompt) {
    std::string out = paraphraser.Paraphrase(prompt);
    if (text::IsBlank(out)) throw Error(ErrorCode::kExternal, "paraphraser returned empty text");
    return out;
  };
  auto meta_for = [](const AttackSpec& a, const std::string& prompt) {
    return Meta{{"attack", std::string(AttackSlug(a.name))}, {"method", "llm"}, {"prompt", prompt}};
  };

  if (attack.stage_input == StageInput::kOriginal) {
    const std::string prompt = RenderAttackPrompt(attack, record.body);
    std::string body = call(prompt);
    return corpus.AppendDerived(record.id, std::move(body),
                                Provenance::Paraphrased(std::string(AttackSlug(attack.name))),
                                meta_for(attack, prompt));
  }

  const std::string perplexity_slug(AttackSlug(AttackName::kPerplexity));
  const EssayRecord* stage_one = nullptr;
  for (const EssayRecord* child : corpus.ChildrenOf(record.id)) {
    if (child->provenance == Provenance::Paraphrased(perplexity_slug)) {
      stage_one = child;
      break;
    }
  }
  // Both calls finish before anything is appended.
  const std::string parent_id = record.id;
  if (stage_one != nullptr) {
    const std::string prompt = RenderAttackPrompt(attack, stage_one->body);
    std::string body = call(prompt);
    return corpus.AppendDerived(stage_one->id, std::move(body),
                                Provenance::Paraphrased(std::string(AttackSlug(attack.name))),
                                meta_for(attack, prompt));
  }
  const AttackSpec perplexity = AttackSpec::For(AttackName::kPerplexity);
  const std::string first_prompt = RenderAttackPrompt(perplexity, record.body);
  std::string first_body = call(first_prompt);
  const std::string second_prompt = RenderAttackPrompt(attack, first_body);
  std::string second_body = call(second_prompt);
  const std::string first_id =
      corpus.AppendDerived(parent_id, std::move(first_body), Provenance::Paraphrased(perplexity_slug),
                           meta_for(perplexity, first_prompt))
          .id;
  return corpus.AppendDerived(first_id, std::move(second_body),
                              Provenance::Paraphrased(std::string(AttackSlug(attack.name))),
                              meta_for(attack, second_prompt));
}

SynonymLexicon SynonymLexicon::Parse(std::string_view tsv, const Vocabulary& vocab) {
  SynonymLexicon lexicon;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto resolve = [&](const std::string& raw, TokenId& out) {
    const auto words = text::SplitWhitespace(raw);
    const std::string tok = NormalizeToken(words.size() == 1 ? words[0] : raw);
    const TokenId id = words.size() == 1 ? vocab.Id(tok) : kUnkId;
    if (id == kUnkId || IsReserved(id)) {
      lexicon.oov_.push_back(tok);
      return false;
    }
    out = id;
    return true;
  };
  while (pos < tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) + ": missing tab");
    }
    TokenId head = 0;
    if (!resolve(std::string(line.substr(0, tab)), head)) continue;
    std::vector<TokenId> candidates;
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      const std::string piece(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (text::IsBlank(piece)) continue;
      TokenId cand = 0;
      if (!resolve(piece, cand)) continue;
      if (cand == head) {
        throw Error(ErrorCode::kParse,
                    "lexicon line " + std::to_string(line_no) + ": token lists itself");
      }
      candidates.push_back(cand);
    }
    if (!candidates.empty()) lexicon.Add(head, std::move(candidates));
  }
  return lexicon;
}

SynonymLexicon SynonymLexicon::Load(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open lexicon '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), vocab);
}

void SynonymLexicon::Add(TokenId token, std::vector<TokenId> candidates) {
  for (TokenId c : candidates) {
    if (c == token) throw Error(ErrorCode::kInvalidArgument, "a token cannot be its own synonym");
  }
  auto& slot = entries_[token];
  slot.insert(slot.end(), candidates.begin(), candidates.end());
}

const std::vector<TokenId>* SynonymLexicon::Candidates(TokenId token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

// True if writing `candidate` at `pos` turns a red scored token green within
// the next context_width positions.
bool RaisesDownstream(const TokenSequence& seq, std::size_t pos, TokenId candidate,
                      const WatermarkConfig& config) {
  const auto width = static_cast<std::size_t>(config.context_width);
  TokenSequence trial(seq.begin() + static_cast<std::ptrdiff_t>(pos + 1 - width),
                      seq.begin() + static_cast<std::ptrdiff_t>(std::min(seq.size(), pos + 1 + width)));
  for (std::size_t j = pos + 1; j < seq.size() && j <= pos + width; ++j) {
    if (IsReserved(seq[j])) continue;
    const std::span<const TokenId> before(seq.data() + (j - width), width);
    const std::size_t offset = j - width - (pos + 1 - width);
    trial[width - 1] = candidate;
    const std::span<const TokenId> after(trial.data() + offset, width);
    if (!IsGreen(config.key, before, seq[j], config.gamma) &&
        IsGreen(config.key, after, seq[j], config.gamma)) {
      return true;
    }
  }
  return false;
}

}  // namespace

TokenSequence SynonymSubstitute(std::span<const TokenId> text, const SynonymLexicon& lexicon,
                                const WatermarkConfig& config, double target_rate,
                                std::uint64_t seed, SubstitutionStats* stats) {
  if (lexicon.empty()) throw Error(ErrorCode::kInvalidArgument, "synonym lexicon is empty");
  if (!(target_rate >= 0.0 && target_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_rate must lie in [0, 1]");
  }
  const auto width = static_cast<std::size_t>(config.context_width);
  TokenSequence out(text.begin(), text.end());
  SubstitutionStats local;
  Rng rng(seed);
  for (std::size_t i = width; i < out.size(); ++i) {
    const TokenId tok = out[i];
    if (IsReserved(tok)) continue;
    const auto* candidates = lexicon.Candidates(tok);
    if (candidates == nullptr) continue;
    const std::span<const TokenId> context(out.data() + (i - width), width);
    const GreenList green(config.key, context, config.gamma);
    if (!green.Contains(tok)) continue;
    ++local.eligible;
    if (!(rng.Uniform() < target_rate)) continue;
    for (TokenId c : *candidates) {
      if (IsReserved(c) || green.Contains(c) || RaisesDownstream(out, i, c, config)) continue;
      out[i] = c;
      ++local.replaced;
      break;
    }
  }
  if (stats != nullptr) *stats = local;
  return out;
}

const EssayRecord& RunSynonymAttack(std::string_view record_id, const SynonymLexicon& lexicon,
                                    const Vocabulary& vocab, const WatermarkConfig& config,
                                    double target_rate, std::uint64_t seed, Corpus& corpus) {
  const EssayRecord& record = corpus.Get(record_id);
  if (!IsAttackable(record)) {
    throw Error(ErrorCode::kInvalidArgument, "attacks apply to generated or watermarked records; '" +
                                                 record.id + "' is " +
                                                 record.provenance.ToString());
  }
  std::vector<std::string> words = TokenizeWords(record.body);
  const TokenSequence ids = vocab.Encode(words);
  SubstitutionStats stats;
  const TokenSequence attacked = SynonymSubstitute(ids, lexicon, config, target_rate, seed, &stats);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (attacked[i] != ids[i]) words[i] = vocab.Token(attacked[i]);
  }
  Meta meta{{"attack", std::string(AttackSlug(AttackName::kWordReplacement))},
            {"method", "synonym_substitution"},
            {"target_rate", std::to_string(target_rate)},
            {"eligible", std::to_string(stats.eligible)},
            {"replaced", std::to_string(stats.replaced)}};
  return corpus.AppendDerived(record.id, Detokenize(words),
                              Provenance::Paraphrased(std::string(AttackSlug(AttackName::kWordReplacement))),
                              std::move(meta));
}

}  // namespace detectkit
