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

#ifndef DETECTKIT_ATTACKS_H_
#define DETECTKIT_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detectkit/corpus.h"
#include "detectkit/http_client.h"
#include "detectkit/vocabulary.h"
#include "detectkit/watermark.h"

namespace detectkit {

enum class AttackName { kPerplexity, kWordReplacement, kCollegeStudent, kRecursive };

enum class StageInput { kOriginal, kPerplexityOutput };

inline constexpr std::string_view kTextPlaceholder = "[TEXT]";

// A paraphrasing prompt. The template holds exactly one [TEXT] placeholder;
// only the recursive attack consumes the perplexity attack's output.
struct AttackSpec {
  AttackName name = AttackName::kPerplexity;
  std::string prompt_template;
  StageInput stage_input = StageInput::kOriginal;

  // The stock prompt for `name`.
  static AttackSpec For(AttackName name);

  void Validate() const;
};

// "perplexity", "word_replacement", "college_student", "recursive"; the form
// used in provenance strings ("paraphrased:recursive").
std::string_view AttackSlug(AttackName name);
// "Perplexity", "Word Replacement", "College Student", "Recursive".
std::string_view AttackDisplayName(AttackName name);
AttackName ParseAttackName(std::string_view slug);
const std::vector<AttackName>& AllAttacks();

// Template with [TEXT] replaced once. The payload is inserted verbatim, so a
// literal "[TEXT]" inside it survives untouched.
std::string RenderAttackPrompt(const AttackSpec& attack, std::string_view text);

// Inverse of RenderAttackPrompt: the payload, or kParse if `prompt` does not
// carry the template's prefix and suffix.
std::string ExtractPayload(const AttackSpec& attack, std::string_view prompt);

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::string Paraphrase(const std::string& prompt) = 0;
};

// POST {"prompt": str} -> {"text": str}
class ExternalParaphraser : public Paraphraser {
 public:
  explicit ExternalParaphraser(EndpointConfig endpoint);
  std::string Paraphrase(const std::string& prompt) override;

  const JsonHttpClient& client() const { return *client_; }

 private:
  std::unique_ptr<JsonHttpClient> client_;
};

// Sends the rendered prompt and appends a Paraphrased(<slug>) child of
// `record_id`, storing the prompt in meta. The recursive attack paraphrases
// the record's existing perplexity child, creating one first if needed. Any
// client failure leaves the corpus untouched.
const EssayRecord& RunAttack(const AttackSpec& attack, std::string_view record_id,
                             Paraphraser& paraphraser, Corpus& corpus);

// token -> replacement candidates, in preference order, over one vocabulary.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Lines of `token<TAB>cand1,cand2,...`; '#' starts a comment line. Tokens
  // are trimmed, lowercased and NFC-normalized. Entries or candidates missing from the
  // vocabulary are skipped and listed in oov(); a token listing itself is a
  // kParse error.
  static SynonymLexicon Parse(std::string_view tsv, const Vocabulary& vocab);
  static SynonymLexicon Load(const std::filesystem::path& path, const Vocabulary& vocab);

  void Add(TokenId token, std::vector<TokenId> candidates);

  // nullptr when the token has no entry.
  const std::vector<TokenId>* Candidates(TokenId token) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::string>& oov() const { return oov_; }

 private:
  std::unordered_map<TokenId, std::vector<TokenId>> entries_;
  std::vector<std::string> oov_;
};

struct SubstitutionStats {
  std::size_t eligible = 0;  // green scored positions with a lexicon entry
  std::size_t replaced = 0;
};

// Word-replacement attack against the watermark. Scans scored positions left
// to right over the sequence as mutated so far. At each green position whose
// token has a lexicon entry, draws one Rng::Uniform(); if it is below
// target_rate the token becomes its first candidate that is red in the
// current context and turns none of the next context_width tokens from red
// to green (left alone when no candidate qualifies). Every replacement thus
// lowers the green count. Length never changes.
TokenSequence SynonymSubstitute(std::span<const TokenId> text, const SynonymLexicon& lexicon,
                                const WatermarkConfig& config, double target_rate,
                                std::uint64_t seed, SubstitutionStats* stats = nullptr);

// SynonymSubstitute applied to a record's body, appended as a
// Paraphrased("word_replacement") child. Words that were not replaced keep
// their original spelling, out-of-vocabulary words included.
const EssayRecord& RunSynonymAttack(std::string_view record_id, const SynonymLexicon& lexicon,
                                    const Vocabulary& vocab, const WatermarkConfig& config,
                                    double target_rate, std::uint64_t seed, Corpus& corpus);

}  // namespace detectkit

#endif  // DETECTKIT_ATTACKS_H_
