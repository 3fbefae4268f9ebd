// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tagsent/corpus.hpp"

namespace tagsent {

// Frequency table over the training corpus, in occurrences per million
// tokens. Drives the HFW/CW/RW split. Thresholds: a word at or above f_c is
// high-frequency, at or below f_h is a regular word; the open band between
// them is resolved by which half it falls in (the lower half goes to HFW,
// the upper half to CW, unless swap_overlap_bands inverts that).
struct VocabStats {
  struct Entry {
    uint64_t count = 0;
    TokenKind kind = TokenKind::Word;
  };
  uint64_t total_tokens = 0;
  std::unordered_map<std::string, Entry> counts;
  double f_h = 100.0;
  double f_c = 1000.0;
  bool swap_overlap_bands = false;

  double freq_per_million(std::string_view surface) const;
};

// Counts every token (words, punctuation runs, and meta-words all included).
// Throws DataError on an empty training set or f_h >= f_c.
VocabStats build_vocab_stats(std::span<const Tweet> training,
                             double f_h = 100.0, double f_c = 1000.0,
                             bool swap_overlap_bands = false);

enum class WordClass : uint8_t { HFW = 0, CW = 1, RW = 2 };

// Punctuation runs and URL/REF/TAG/RT meta-words are always HFW; words go by
// their corpus frequency. Total: every (surface, kind) maps to exactly one
// class, words absent from the table counting as frequency 0.
WordClass classify_word(std::string_view surface, TokenKind kind,
                        const VocabStats& stats);

// TSV dump (surface, freq_per_million, class), sorted by surface.
std::string vocab_dump_tsv(const VocabStats& stats);

enum class FeatureFamily : uint8_t { Word = 0, NGram = 1, Pattern = 2, Punct = 3 };

std::string_view family_name(FeatureFamily f);

// One feature occurrence within one tweet, before corpus-wide weighting.
// count_in_tweet is the weight numerator (occurrences for words/n-grams,
// exact + alpha*approximate matches for patterns, the raw statistic for
// punctuation). corpus_count_term is this tweet's contribution to the
// feature's corpus count (occurrences, or exact matches for patterns;
// unused for punctuation features, whose scale comes from corpus maxima).
struct RawFeature {
  std::string key;
  FeatureFamily family = FeatureFamily::Word;
  double count_in_tweet = 0;
  double corpus_count_term = 0;
};

// Word features: one per distinct word, plus punctuation runs of length >= 2.
// Meta-words and the word "rt" are excluded. Keys are "W:<surface>".
std::vector<RawFeature> extract_word_features(const Tweet& tweet);

// Every window of n consecutive tokens, 2 <= n <= 5 by default, keyed
// "N:<s1 s2 ...>". Windows may contain meta-words and punctuation runs, but
// windows made of meta-words only are dropped.
std::vector<RawFeature> extract_ngram_features(const Tweet& tweet,
                                               int n_min = 2, int n_max = 5);

// An ordered sequence of verbatim HFW surfaces and anonymous CW slots,
// starting and ending with an HFW: 2-6 HFWs, 1-5 slots.
struct Pattern {
  // Slot positions hold the marker "[CW]"; no token surface can collide with
  // it (surfaces never mix letters and punctuation).
  std::vector<std::string> components;

  std::string key() const;  // "P:<c1|c2|...>"

  bool operator==(const Pattern&) const = default;
};

inline constexpr std::string_view kSlotMarker = "[CW]";

// All contiguous RW-free token runs that satisfy the pattern shape, with
// multiplicity.
std::vector<Pattern> extract_patterns(const Tweet& tweet,
                                      const VocabStats& stats);

struct MatchCounts {
  double exact = 0;   // component sequence on consecutive tokens
  double approx = 0;  // in-order with >= 1 intervening tokens, all RW
};

// Counts occurrences as distinct component-to-position assignments; gaps may
// contain only RW tokens, and an assignment with any non-empty gap counts as
// approximate.
MatchCounts match_pattern(const Pattern& pattern, const Tweet& tweet,
                          const VocabStats& stats);

// Distinct patterns of the tweet with their match counts folded into weight
// terms: count_in_tweet = exact + alpha*approx, corpus_count_term = exact.
std::vector<RawFeature> extract_pattern_features(const Tweet& tweet,
                                                 const VocabStats& stats,
                                                 double alpha = 0.1);

// The five tweet-level statistics.
struct PunctStats {
  uint32_t length_words = 0;   // number of Word tokens
  uint32_t exclamations = 0;   // '!' characters across all tokens
  uint32_t questions = 0;      // '?' characters
  uint32_t quotes = 0;         // '"' characters
  uint32_t caps_words = 0;     // captured at preprocessing
};

PunctStats punct_stats(const Tweet& tweet);

inline constexpr std::string_view kPunctKeys[5] = {"U:P1", "U:P2", "U:P3",
                                                   "U:P4", "U:P5"};

// Raw punctuation statistics as features; zero-valued statistics are not
// emitted. corpus_count_term is 0 (weighting uses corpus maxima instead).
std::vector<RawFeature> extract_punct_features(const Tweet& tweet);

// All four families of one tweet.
std::vector<RawFeature> extract_all_features(const Tweet& tweet,
                                             const VocabStats& stats,
                                             double alpha = 0.1);

// ---- Corpus-wide weighting ----

struct FeatureOccurrence {
  std::string tweet_id;
  std::optional<SentimentLabel> label;
  double count_in_tweet = 0;
  double corpus_count_term = 0;
};

struct WeightedPosting {
  std::string tweet_id;
  double weight = 0;
  std::optional<SentimentLabel> label;
};

// Word/n-gram/pattern weighting: weight = count_in_tweet / sum of
// corpus_count_terms over the whole group (T and TT both included).
// Occurrences whose weight falls below `threshold` are dropped; input order
// is preserved.
std::vector<WeightedPosting> compute_weights(
    std::span<const FeatureOccurrence> group, double threshold);

// Maximal surviving weights per family, corpus-wide.
struct FamilyMaxima {
  double word = 0;
  double ngram = 0;
  double pattern = 0;

  double mean() const { return (word + ngram + pattern) / 3.0; }
};

// Punctuation weighting: raw / (max_raw * mean of family maxima). Returns 0
// when either scale is degenerate, which drops the feature at any positive
// threshold.
double punct_weight(double raw, double max_raw, const FamilyMaxima& maxima);

// Candidate matching considers word/n-gram/pattern features only.
inline bool is_matchable_key(std::string_view key) {
  return !(key.size() >= 2 && key[0] == 'U' && key[1] == ':');
}

}  // namespace tagsent
