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

#include "tagsent/features.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "tagsent/errors.hpp"

namespace tagsent {

double VocabStats::freq_per_million(std::string_view surface) const {
  if (total_tokens == 0) return 0.0;
  auto it = counts.find(std::string(surface));
  if (it == counts.end()) return 0.0;
  return 1e6 * static_cast<double>(it->second.count) /
         static_cast<double>(total_tokens);
}

VocabStats build_vocab_stats(std::span<const Tweet> training, double f_h,
                             double f_c, bool swap_overlap_bands) {
  if (!(f_h < f_c))
    throw DataError("vocab stats: f_h must be below f_c");
  VocabStats stats;
  stats.f_h = f_h;
  stats.f_c = f_c;
  stats.swap_overlap_bands = swap_overlap_bands;
  for (const Tweet& t : training) {
    for (const Token& tok : t.tokens) {
      auto& entry = stats.counts[tok.surface];
      entry.count += 1;
      entry.kind = tok.kind;
      ++stats.total_tokens;
    }
  }
  if (stats.total_tokens == 0)
    throw DataError("vocab stats: training set has no tokens");
  return stats;
}

WordClass classify_word(std::string_view surface, TokenKind kind,
                        const VocabStats& stats) {
  if (kind != TokenKind::Word) return WordClass::HFW;
  const double fr = stats.freq_per_million(surface);
  if (fr >= stats.f_c) return WordClass::HFW;
  if (fr <= stats.f_h) return WordClass::RW;
  const double mid = (stats.f_h + stats.f_c) / 2.0;
  const bool lower_band = fr < mid;
  if (stats.swap_overlap_bands) return lower_band ? WordClass::CW : WordClass::HFW;
  return lower_band ? WordClass::HFW : WordClass::CW;
}

std::string vocab_dump_tsv(const VocabStats& stats) {
  std::map<std::string_view, const VocabStats::Entry*> sorted;
  for (const auto& [surface, entry] : stats.counts) sorted[surface] = &entry;
  std::string out = "# surface\tfreq_per_million\tclass\n";
  char buf[64];
  for (const auto& [surface, entry] : sorted) {
    const double fr = stats.freq_per_million(surface);
    const WordClass cls = classify_word(surface, entry->kind, stats);
    std::snprintf(buf, sizeof(buf), "%.4f", fr);
    out.append(surface);
    out.push_back('\t');
    out.append(buf);
    out.push_back('\t');
    out.append(cls == WordClass::HFW ? "HFW" : cls == WordClass::CW ? "CW" : "RW");
    out.push_back('\n');
  }
  return out;
}

std::string_view family_name(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::Word: return "word";
    case FeatureFamily::NGram: return "ngram";
    case FeatureFamily::Pattern: return "pattern";
    case FeatureFamily::Punct: return "punct";
  }
  return "?";
}

namespace {

bool is_meta(TokenKind k) {
  return k == TokenKind::MetaUrl || k == TokenKind::MetaRef ||
         k == TokenKind::MetaTag || k == TokenKind::MetaRt;
}

}  // namespace

std::vector<RawFeature> extract_word_features(const Tweet& tweet) {
  std::map<std::string, double> counts;
  for (const Token& tok : tweet.tokens) {
    if (tok.kind == TokenKind::Word) {
      if (tok.surface == "rt") continue;  // ubiquitous retweet word
      counts["W:" + tok.surface] += 1;
    } else if (tok.kind == TokenKind::PunctSeq && tok.surface.size() >= 2) {
      counts["W:" + tok.surface] += 1;
    }
  }
  std::vector<RawFeature> out;
  out.reserve(counts.size());
  for (auto& [key, n] : counts)
    out.push_back({key, FeatureFamily::Word, n, n});
  return out;
}

std::vector<RawFeature> extract_ngram_features(const Tweet& tweet, int n_min,
                                               int n_max) {
  std::map<std::string, double> counts;
  const auto& toks = tweet.tokens;
  const int len = static_cast<int>(toks.size());
  for (int start = 0; start < len; ++start) {
    std::string key = "N:";
    bool all_meta = true;
    for (int n = 1; n <= n_max && start + n <= len; ++n) {
      const Token& tok = toks[start + n - 1];
      if (n > 1) key.push_back(' ');
      key += tok.surface;
      all_meta = all_meta && is_meta(tok.kind);
      if (n >= n_min && !all_meta) counts[key] += 1;
    }
  }
  std::vector<RawFeature> out;
  out.reserve(counts.size());
  for (auto& [key, n] : counts)
    out.push_back({key, FeatureFamily::NGram, n, n});
  return out;
}

std::string Pattern::key() const {
  std::string out = "P:";
  for (size_t i = 0; i < components.size(); ++i) {
    if (i > 0) out.push_back('|');
    out += components[i];
  }
  return out;
}

namespace {

std::vector<WordClass> classify_tokens(const Tweet& tweet,
                                       const VocabStats& stats) {
  std::vector<WordClass> cls;
  cls.reserve(tweet.tokens.size());
  for (const Token& tok : tweet.tokens)
    cls.push_back(classify_word(tok.surface, tok.kind, stats));
  return cls;
}

constexpr int kMinHfw = 2, kMaxHfw = 6;
constexpr int kMinSlots = 1, kMaxSlots = 5;

}  // namespace

std::vector<Pattern> extract_patterns(const Tweet& tweet,
                                      const VocabStats& stats) {
  const auto cls = classify_tokens(tweet, stats);
  const auto& toks = tweet.tokens;
  const int len = static_cast<int>(toks.size());
  std::vector<Pattern> out;

  for (int i = 0; i < len; ++i) {
    if (cls[i] != WordClass::HFW) continue;
    int hfw = 0, slots = 0;
    std::vector<std::string> components;
    for (int j = i; j < len; ++j) {
      if (cls[j] == WordClass::RW) break;
      if (cls[j] == WordClass::HFW) {
        ++hfw;
        if (hfw > kMaxHfw) break;
        components.push_back(toks[j].surface);
      } else {
        ++slots;
        if (slots > kMaxSlots) break;
        components.emplace_back(kSlotMarker);
      }
      if (j > i && cls[j] == WordClass::HFW && hfw >= kMinHfw &&
          slots >= kMinSlots) {
        out.push_back(Pattern{components});
      }
    }
  }
  return out;
}

MatchCounts match_pattern(const Pattern& pattern, const Tweet& tweet,
                          const VocabStats& stats) {
  const auto cls = classify_tokens(tweet, stats);
  const auto& toks = tweet.tokens;
  const int len = static_cast<int>(toks.size());
  const int m = static_cast<int>(pattern.components.size());
  if (m == 0 || len == 0) return {};

  auto matches = [&](int comp, int pos) {
    const std::string& c = pattern.components[comp];
    if (c == kSlotMarker) return cls[pos] == WordClass::CW;
    return cls[pos] == WordClass::HFW && toks[pos].surface == c;
  };

  // rw_before[i]: length of the RW run ending at position i-1.
  std::vector<int> rw_before(len, 0);
  for (int i = 1; i < len; ++i)
    rw_before[i] = (cls[i - 1] == WordClass::RW) ? rw_before[i - 1] + 1 : 0;

  // Count component-to-position assignments. `all` permits RW-only gaps of
  // any size; `exact` requires consecutive positions.
  std::vector<double> all(len), exact(len);
  for (int i = 0; i < len; ++i) all[i] = exact[i] = matches(0, i) ? 1.0 : 0.0;
  for (int comp = 1; comp < m; ++comp) {
    std::vector<double> all_next(len, 0.0), exact_next(len, 0.0);
    for (int i = 0; i < len; ++i) {
      if (!matches(comp, i)) continue;
      if (i > 0) exact_next[i] = exact[i - 1];
      const int lo = i - 1 - rw_before[i];
      for (int p = std::max(0, lo); p <= i - 1; ++p) all_next[i] += all[p];
    }
    all = std::move(all_next);
    exact = std::move(exact_next);
  }
  MatchCounts counts;
  for (int i = 0; i < len; ++i) {
    counts.exact += exact[i];
    counts.approx += all[i] - exact[i];
  }
  return counts;
}

std::vector<RawFeature> extract_pattern_features(const Tweet& tweet,
                                                 const VocabStats& stats,
                                                 double alpha) {
  std::map<std::string, Pattern> distinct;
  for (Pattern& p : extract_patterns(tweet, stats))
    distinct.emplace(p.key(), std::move(p));

  std::vector<RawFeature> out;
  out.reserve(distinct.size());
  for (const auto& [key, pattern] : distinct) {
    const MatchCounts mc = match_pattern(pattern, tweet, stats);
    out.push_back({key, FeatureFamily::Pattern,
                   mc.exact + alpha * mc.approx, mc.exact});
  }
  return out;
}

PunctStats punct_stats(const Tweet& tweet) {
  PunctStats s;
  s.caps_words = tweet.caps_words;
  for (const Token& tok : tweet.tokens) {
    if (tok.kind == TokenKind::Word) ++s.length_words;
    for (char c : tok.surface) {
      if (c == '!') ++s.exclamations;
      if (c == '?') ++s.questions;
      if (c == '"') ++s.quotes;
    }
  }
  return s;
}

std::vector<RawFeature> extract_punct_features(const Tweet& tweet) {
  const PunctStats s = punct_stats(tweet);
  const uint32_t values[5] = {s.length_words, s.exclamations, s.questions,
                              s.quotes, s.caps_words};
  std::vector<RawFeature> out;
  for (int i = 0; i < 5; ++i) {
    if (values[i] == 0) continue;
    out.push_back({std::string(kPunctKeys[i]), FeatureFamily::Punct,
                   static_cast<double>(values[i]), 0.0});
  }
  return out;
}

std::vector<RawFeature> extract_all_features(const Tweet& tweet,
                                             const VocabStats& stats,
                                             double alpha) {
  std::vector<RawFeature> out = extract_word_features(tweet);
  auto append = [&out](std::vector<RawFeature>&& more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
  };
  append(extract_ngram_features(tweet));
  append(extract_pattern_features(tweet, stats, alpha));
  append(extract_punct_features(tweet));
  return out;
}

std::vector<WeightedPosting> compute_weights(
    std::span<const FeatureOccurrence> group, double threshold) {
  double denom = 0;
  for (const auto& occ : group) denom += occ.corpus_count_term;
  std::vector<WeightedPosting> out;
  if (denom <= 0) return out;
  for (const auto& occ : group) {
    const double w = occ.count_in_tweet / denom;
    if (w < threshold) continue;
    out.push_back({occ.tweet_id, w, occ.label});
  }
  return out;
}

double punct_weight(double raw, double max_raw, const FamilyMaxima& maxima) {
  const double scale = maxima.mean();
  if (max_raw <= 0 || scale <= 0) return 0.0;
  return raw / (max_raw * scale);
}

}  // namespace tagsent
