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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace tagsent {

// Where a sentiment label comes from: a hashtag mark, an emoticon mark, or
// the reserved neutral verdict "neu".
enum class LabelKind : uint8_t { Hashtag = 0, Emoticon = 1, Neutral = 2 };

struct SentimentLabel {
  LabelKind kind = LabelKind::Neutral;
  std::string name = "neu";  // "#bored", ":)", or "neu"

  bool operator==(const SentimentLabel&) const = default;
};

// Reserved neutral label.
SentimentLabel neutral_label();

// Builds a label from its textual name: leading '#' means hashtag, the
// literal "neu" means neutral, anything else is treated as an emoticon.
SentimentLabel label_from_name(std::string_view name);

enum class TokenKind : uint8_t {
  Word = 0,      // lowercased run of non-punctuation characters
  MetaUrl = 1,   // stands in for an http://, https:// or www. link
  MetaRef = 2,   // stands in for an @name mention
  MetaTag = 3,   // stands in for a #tag that is not a configured label
  MetaRt = 4,    // the leading retweet marker
  PunctSeq = 5,  // maximal run of punctuation characters
};

struct Token {
  TokenKind kind = TokenKind::Word;
  std::string surface;  // "URL"/"REF"/"TAG"/"RT" for the meta kinds

  bool operator==(const Token&) const = default;
};

struct Tweet {
  std::string id;
  std::optional<SentimentLabel> label;  // absent for test-set members
  std::vector<Token> tokens;
  std::string raw_text;
  // Captured before lowercasing: words that are ALL-CAPS (length >= 2) or
  // Capitalized. Feeds the fifth punctuation statistic.
  uint32_t caps_words = 0;
  // Occurrences of configured label hashtags/emoticons found in the text.
  // Tweets carrying two or more are not admissible.
  uint32_t label_marks = 0;
};

struct DatasetConfig {
  std::vector<std::string> hashtag_list;   // entries start with '#'
  std::vector<std::string> emoticon_list;  // matched as whole tokens, verbatim
  int min_proper_words = 5;
  std::optional<std::string> dictionary_path;

  // Throws DataError on overlap, missing '#' prefixes, or empty lists when
  // `labeled` ingestion is requested.
  void validate(bool labeled) const;

  bool is_label_name(std::string_view name) const;
};

struct Preprocessed {
  std::vector<Token> tokens;
  uint32_t caps_words = 0;
  uint32_t label_marks = 0;
};

// Text normalization. Splits on whitespace, then per chunk: label emoticons
// and label hashtags are consumed (counted, not tokenized); http://, https://
// and www. prefixes become URL; @name becomes REF; other #tags become TAG; a
// leading "RT" becomes RT; remaining text is cut into maximal punctuation
// runs (PunctSeq) and lowercased words. Total over any byte string.
Preprocessed preprocess(std::string_view raw_text, const DatasetConfig& cfg);

// Re-renders tokens into text that preprocess() maps back to the same token
// list; used to check idempotence and to write admitted datasets.
std::string render_tokens(std::span<const Token> tokens);

// Assembles a Tweet from one dataset row (runs preprocess).
Tweet make_tweet(std::string id, std::optional<SentimentLabel> label,
                 std::string raw_text, const DatasetConfig& cfg);

struct RejectedLine {
  size_t line_number = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<Tweet> tweets;
  std::vector<size_t> line_numbers;  // source line of each parsed tweet
  std::vector<RejectedLine> rejects;
};

// Reads a UTF-8, LF-terminated, tab-separated file with columns
// tweet_id / class / text. In labeled mode column 2 must name a configured
// label or "neu"; in unlabeled mode it is ignored ("-" by convention).
// Malformed rows (wrong column count, invalid UTF-8, unknown class, empty
// id) are collected as rejects; a duplicate tweet id is fatal.
ParseResult parse_dataset(const std::string& path, const DatasetConfig& cfg,
                          bool labeled);

// One word per line, lowercased on load. Empty set if path is absent.
std::unordered_set<std::string> load_dictionary(const std::string& path);

// Reason the tweet fails admission, or nullopt if admissible: needs at least
// cfg.min_proper_words dictionary words (every word counts when the
// dictionary is empty), at most one label mark, and a non-empty token list.
std::optional<std::string> admission_failure(
    const Tweet& tweet, const DatasetConfig& cfg,
    const std::unordered_set<std::string>& dictionary);

bool admit(const Tweet& tweet, const DatasetConfig& cfg,
           const std::unordered_set<std::string>& dictionary);

// True if `data` is well-formed UTF-8.
bool valid_utf8(std::string_view data);

}  // namespace tagsent
