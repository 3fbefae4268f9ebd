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

#include "tagsent/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "tagsent/errors.hpp"

namespace tagsent {

namespace {

bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }

char to_ascii_lower(char c) {
  return is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_ascii_lower(c);
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

// ALL-CAPS of length >= 2 (every letter uppercase, at least one letter) or
// Capitalized (first character an uppercase letter).
bool counts_as_caps_word(std::string_view word) {
  if (!word.empty() && is_ascii_upper(word[0])) return true;
  if (word.size() < 2) return false;
  bool has_letter = false;
  for (char c : word) {
    if (is_ascii_lower(c)) return false;
    if (is_ascii_upper(c)) has_letter = true;
  }
  return has_letter;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> chunks;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r'))
      ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\n' && text[i] != '\r')
      ++i;
    if (i > start) chunks.push_back(text.substr(start, i - start));
  }
  return chunks;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

}  // namespace

SentimentLabel neutral_label() { return SentimentLabel{LabelKind::Neutral, "neu"}; }

SentimentLabel label_from_name(std::string_view name) {
  if (name == "neu") return neutral_label();
  if (!name.empty() && name[0] == '#')
    return SentimentLabel{LabelKind::Hashtag, std::string(name)};
  return SentimentLabel{LabelKind::Emoticon, std::string(name)};
}

void DatasetConfig::validate(bool labeled) const {
  if (labeled && hashtag_list.empty() && emoticon_list.empty())
    throw DataError("dataset config: labeled ingestion needs a non-empty "
                    "hashtag or emoticon list");
  for (const auto& h : hashtag_list) {
    if (h.empty() || h[0] != '#')
      throw DataError("dataset config: hashtag label \"" + h +
                      "\" must begin with '#'");
  }
  for (const auto& e : emoticon_list) {
    if (e.empty()) throw DataError("dataset config: empty emoticon label");
    if (e == "neu")
      throw DataError("dataset config: \"neu\" is reserved for the neutral class");
    for (const auto& h : hashtag_list) {
      if (e == h)
        throw DataError("dataset config: label \"" + e +
                        "\" appears in both lists");
    }
  }
  if (min_proper_words < 0)
    throw DataError("dataset config: min_proper_words must be >= 0");
}

bool DatasetConfig::is_label_name(std::string_view name) const {
  for (const auto& h : hashtag_list)
    if (name == h) return true;
  for (const auto& e : emoticon_list)
    if (name == e) return true;
  return false;
}

Preprocessed preprocess(std::string_view raw_text, const DatasetConfig& cfg) {
  Preprocessed out;

  auto is_label_hashtag = [&](std::string_view chunk) {
    const std::string low = lowercase(chunk);
    for (const auto& h : cfg.hashtag_list)
      if (low == lowercase(h)) return true;
    return false;
  };
  auto is_label_emoticon = [&](std::string_view s) {
    for (const auto& e : cfg.emoticon_list)
      if (s == e) return true;
    return false;
  };

  const auto chunks = split_ws(raw_text);
  for (size_t ci = 0; ci < chunks.size(); ++ci) {
    const std::string_view chunk = chunks[ci];

    if (ci == 0 && chunk == "RT") {
      out.tokens.push_back({TokenKind::MetaRt, "RT"});
      continue;
    }
    // Label emoticons are consumed before the punctuation splitter can see
    // them; they become the class, not a token.
    if (is_label_emoticon(chunk)) {
      ++out.label_marks;
      continue;
    }
    if (starts_with(chunk, "http://") || starts_with(chunk, "https://") ||
        starts_with(chunk, "www.")) {
      out.tokens.push_back({TokenKind::MetaUrl, "URL"});
      continue;
    }
    if (chunk.size() > 1 && chunk[0] == '@' && !is_ascii_punct(chunk[1])) {
      out.tokens.push_back({TokenKind::MetaRef, "REF"});
      continue;
    }
    if (chunk.size() > 1 && chunk[0] == '#' && !is_ascii_punct(chunk[1])) {
      if (is_label_hashtag(chunk)) {
        ++out.label_marks;
      } else {
        out.tokens.push_back({TokenKind::MetaTag, "TAG"});
      }
      continue;
    }

    // Cut into maximal punctuation runs and word segments.
    size_t i = 0;
    while (i < chunk.size()) {
      const bool punct = is_ascii_punct(chunk[i]);
      size_t j = i;
      while (j < chunk.size() && is_ascii_punct(chunk[j]) == punct) ++j;
      std::string_view seg = chunk.substr(i, j - i);
      if (punct) {
        if (is_label_emoticon(seg)) {
          ++out.label_marks;
        } else {
          out.tokens.push_back({TokenKind::PunctSeq, std::string(seg)});
        }
      } else {
        if (counts_as_caps_word(seg)) ++out.caps_words;
        out.tokens.push_back({TokenKind::Word, lowercase(seg)});
      }
      i = j;
    }
  }
  return out;
}

std::string render_tokens(std::span<const Token> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    switch (tokens[i].kind) {
      case TokenKind::MetaUrl: out += "http://URL"; break;
      case TokenKind::MetaRef: out += "@REF"; break;
      case TokenKind::MetaTag: out += "#TAG"; break;
      case TokenKind::MetaRt: out += "RT"; break;
      default: out += tokens[i].surface; break;
    }
  }
  return out;
}

Tweet make_tweet(std::string id, std::optional<SentimentLabel> label,
                 std::string raw_text, const DatasetConfig& cfg) {
  Tweet t;
  t.id = std::move(id);
  t.label = std::move(label);
  Preprocessed p = preprocess(raw_text, cfg);
  t.tokens = std::move(p.tokens);
  t.caps_words = p.caps_words;
  t.label_marks = p.label_marks;
  t.raw_text = std::move(raw_text);
  return t;
}

bool valid_utf8(std::string_view data) {
  size_t i = 0;
  const size_t n = data.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(data[i]);
    size_t len;
    uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (size_t k = 1; k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(data[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlongs, surrogates, out-of-range.
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    if (cp > 0x10FFFF) return false;
    i += len;
  }
  return true;
}

ParseResult parse_dataset(const std::string& path, const DatasetConfig& cfg,
                          bool labeled) {
  cfg.validate(labeled);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  ParseResult result;
  std::unordered_map<std::string, size_t> seen_ids;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    const std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (line.empty()) {
      result.rejects.push_back({line_no, "empty line"});
      continue;
    }
    if (!valid_utf8(line)) {
      result.rejects.push_back({line_no, "invalid UTF-8"});
      continue;
    }
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 3) {
      result.rejects.push_back(
          {line_no, "expected 3 tab-separated fields, got " +
                        std::to_string(fields.size())});
      continue;
    }
    const std::string id(fields[0]);
    if (id.empty()) {
      result.rejects.push_back({line_no, "empty tweet id"});
      continue;
    }

    std::optional<SentimentLabel> label;
    if (labeled) {
      const std::string_view cls = fields[1];
      if (cls == "neu") {
        label = neutral_label();
      } else if (cfg.is_label_name(cls)) {
        label = label_from_name(cls);
      } else {
        result.rejects.push_back(
            {line_no, "class \"" + std::string(cls) + "\" is not a configured label"});
        continue;
      }
    }

    auto [it, inserted] = seen_ids.emplace(id, line_no);
    if (!inserted) {
      throw DataError("duplicate tweet id \"" + id + "\" on line " +
                      std::to_string(line_no) + " (first seen on line " +
                      std::to_string(it->second) + ")");
    }
    result.tweets.push_back(
        make_tweet(id, std::move(label), std::string(fields[2]), cfg));
    result.line_numbers.push_back(line_no);
  }
  return result;
}

std::unordered_set<std::string> load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dictionary file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(lowercase(line));
  }
  return words;
}

std::optional<std::string> admission_failure(
    const Tweet& tweet, const DatasetConfig& cfg,
    const std::unordered_set<std::string>& dictionary) {
  if (tweet.tokens.empty()) return "no tokens after preprocessing";
  if (tweet.label_marks >= 2)
    return "contains " + std::to_string(tweet.label_marks) + " label marks";
  int proper = 0;
  for (const Token& t : tweet.tokens) {
    if (t.kind != TokenKind::Word) continue;
    if (dictionary.empty() || dictionary.contains(t.surface)) ++proper;
  }
  if (proper < cfg.min_proper_words)
    return "only " + std::to_string(proper) + " proper words, need " +
           std::to_string(cfg.min_proper_words);
  return std::nullopt;
}

bool admit(const Tweet& tweet, const DatasetConfig& cfg,
           const std::unordered_set<std::string>& dictionary) {
  return !admission_failure(tweet, cfg, dictionary).has_value();
}

}  // namespace tagsent
