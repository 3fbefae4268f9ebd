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

#include "tagsent/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "tagsent/errors.hpp"
#include "tagsent/wire.hpp"

namespace tagsent::records {

namespace {

void put_label(std::string& out, const std::optional<SentimentLabel>& label) {
  wire::put_u8(out, label.has_value() ? 1 : 0);
  if (label) {
    wire::put_u8(out, static_cast<uint8_t>(label->kind));
    wire::put_str(out, label->name);
  }
}

std::optional<SentimentLabel> get_label(wire::Reader& r) {
  if (r.u8() == 0) return std::nullopt;
  SentimentLabel label;
  label.kind = static_cast<LabelKind>(r.u8());
  label.name = std::string(r.str());
  return label;
}

void put_entries(std::string& out, std::span<const VectorEntry> entries) {
  wire::put_u32(out, static_cast<uint32_t>(entries.size()));
  for (const VectorEntry& e : entries) {
    wire::put_str(out, e.key);
    wire::put_f64(out, e.weight);
  }
}

std::vector<VectorEntry> get_entries(wire::Reader& r) {
  const uint32_t n = r.u32();
  std::vector<VectorEntry> entries;
  entries.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    VectorEntry e;
    e.key = std::string(r.str());
    e.weight = r.f64();
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

std::string encode_tweet(const Tweet& tweet) {
  std::string out;
  put_label(out, tweet.label);
  wire::put_u32(out, tweet.caps_words);
  wire::put_u32(out, static_cast<uint32_t>(tweet.tokens.size()));
  for (const Token& t : tweet.tokens) {
    wire::put_u8(out, static_cast<uint8_t>(t.kind));
    wire::put_str(out, t.surface);
  }
  return out;
}

Tweet decode_tweet(std::string_view id, std::string_view value) {
  wire::Reader r(value);
  Tweet t;
  t.id = std::string(id);
  t.label = get_label(r);
  t.caps_words = r.u32();
  const uint32_t n = r.u32();
  t.tokens.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    Token tok;
    tok.kind = static_cast<TokenKind>(r.u8());
    tok.surface = std::string(r.str());
    t.tokens.push_back(std::move(tok));
  }
  r.expect_done();
  return t;
}

std::string encode_feature_emission(const FeatureEmission& e) {
  std::string out;
  wire::put_u8(out, static_cast<uint8_t>(e.family));
  wire::put_str(out, e.tweet_id);
  wire::put_f64(out, e.count);
  wire::put_f64(out, e.denom);
  put_label(out, e.label);
  return out;
}

FeatureEmission decode_feature_emission(std::string_view value) {
  wire::Reader r(value);
  FeatureEmission e;
  e.family = static_cast<FeatureFamily>(r.u8());
  e.tweet_id = std::string(r.str());
  e.count = r.f64();
  e.denom = r.f64();
  e.label = get_label(r);
  r.expect_done();
  return e;
}

std::string encode_postings(std::span<const IndexPosting> postings) {
  std::string out;
  wire::put_u8(out, 0);
  wire::put_u32(out, static_cast<uint32_t>(postings.size()));
  for (const IndexPosting& p : postings) {
    wire::put_str(out, p.tweet_id);
    wire::put_u8(out, static_cast<uint8_t>(p.family));
    wire::put_f64(out, p.weight);
    put_label(out, p.label);
  }
  return out;
}

std::string encode_raw_punct(double max_raw,
                             std::span<const RawPunctPosting> raw) {
  std::string out;
  wire::put_u8(out, 1);
  wire::put_f64(out, max_raw);
  wire::put_u32(out, static_cast<uint32_t>(raw.size()));
  for (const RawPunctPosting& p : raw) {
    wire::put_str(out, p.tweet_id);
    wire::put_f64(out, p.raw);
    put_label(out, p.label);
  }
  return out;
}

IndexValue decode_index_value(std::string_view value) {
  wire::Reader r(value);
  IndexValue v;
  const uint8_t tag = r.u8();
  if (tag == 0) {
    const uint32_t n = r.u32();
    v.postings.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
      IndexPosting p;
      p.tweet_id = std::string(r.str());
      p.family = static_cast<FeatureFamily>(r.u8());
      p.weight = r.f64();
      p.label = get_label(r);
      v.postings.push_back(std::move(p));
    }
  } else if (tag == 1) {
    v.is_raw_punct = true;
    v.max_raw = r.f64();
    const uint32_t n = r.u32();
    v.raw.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
      RawPunctPosting p;
      p.tweet_id = std::string(r.str());
      p.raw = r.f64();
      p.label = get_label(r);
      v.raw.push_back(std::move(p));
    }
  } else {
    throw InternalError("index record: unknown tag");
  }
  r.expect_done();
  return v;
}

std::string encode_dimension(const VectorEntry& entry,
                             const std::optional<SentimentLabel>& label) {
  std::string out;
  wire::put_u8(out, 0);
  wire::put_str(out, entry.key);
  wire::put_f64(out, entry.weight);
  put_label(out, label);
  return out;
}

std::string encode_match_refs(std::span<const MatchRef> refs) {
  std::string out;
  wire::put_u8(out, 1);
  wire::put_u32(out, static_cast<uint32_t>(refs.size()));
  for (const MatchRef& m : refs) {
    wire::put_str(out, m.train_id);
    wire::put_u8(out, static_cast<uint8_t>(m.label.kind));
    wire::put_str(out, m.label.name);
  }
  return out;
}

std::string encode_vector(const VectorRecord& v) {
  std::string out;
  wire::put_u8(out, v.is_test ? 1 : 0);
  put_label(out, v.label);
  put_entries(out, v.entries);
  if (v.is_test) {
    wire::put_u32(out, static_cast<uint32_t>(v.match_list.size()));
    for (const MatchRef& m : v.match_list) {
      wire::put_str(out, m.train_id);
      wire::put_u8(out, static_cast<uint8_t>(m.label.kind));
      wire::put_str(out, m.label.name);
    }
  }
  return out;
}

VectorRecord decode_vector(std::string_view value) {
  wire::Reader r(value);
  VectorRecord v;
  v.is_test = r.u8() != 0;
  v.label = get_label(r);
  v.entries = get_entries(r);
  if (v.is_test) {
    const uint32_t n = r.u32();
    v.match_list.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
      MatchRef m;
      m.train_id = std::string(r.str());
      m.label.kind = static_cast<LabelKind>(r.u8());
      m.label.name = std::string(r.str());
      v.match_list.push_back(std::move(m));
    }
  }
  r.expect_done();
  return v;
}

std::string encode_vector_payload(std::string_view tweet_id,
                                  const std::optional<SentimentLabel>& label,
                                  std::span<const VectorEntry> entries) {
  std::string out;
  wire::put_str(out, tweet_id);
  put_label(out, label);
  put_entries(out, entries);
  return out;
}

std::string encode_train_side(const SentimentLabel& label,
                              std::span<const VectorEntry> entries) {
  std::string out;
  wire::put_u8(out, 0);
  wire::put_u8(out, static_cast<uint8_t>(label.kind));
  wire::put_str(out, label.name);
  put_entries(out, entries);
  return out;
}

std::string encode_probe_side(std::string_view test_id,
                              std::span<const VectorEntry> entries) {
  std::string out;
  wire::put_u8(out, 1);
  wire::put_str(out, test_id);
  put_entries(out, entries);
  return out;
}

std::string format_distance(double d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

std::string encode_neighbor(const NeighborRecord& n) {
  std::string out;
  wire::put_str(out, n.train_id);
  wire::put_u8(out, static_cast<uint8_t>(n.label.kind));
  wire::put_str(out, n.label.name);
  wire::put_str(out, format_distance(n.distance));
  return out;
}

NeighborRecord decode_neighbor(std::string_view value) {
  wire::Reader r(value);
  NeighborRecord n;
  n.train_id = std::string(r.str());
  n.label.kind = static_cast<LabelKind>(r.u8());
  n.label.name = std::string(r.str());
  const std::string text(r.str());
  n.distance = std::strtod(text.c_str(), nullptr);
  r.expect_done();
  return n;
}

std::string encode_label_value(const SentimentLabel& label) {
  std::string out;
  wire::put_u8(out, static_cast<uint8_t>(label.kind));
  wire::put_str(out, label.name);
  return out;
}

SentimentLabel decode_label_value(std::string_view value) {
  wire::Reader r(value);
  SentimentLabel label;
  label.kind = static_cast<LabelKind>(r.u8());
  label.name = std::string(r.str());
  r.expect_done();
  return label;
}

double euclidean_distance(std::span<const VectorEntry> a,
                          std::span<const VectorEntry> b) {
  double sum = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int cmp = a[i].key.compare(b[j].key);
    if (cmp == 0) {
      const double d = a[i].weight - b[j].weight;
      sum += d * d;
      ++i;
      ++j;
    } else if (cmp < 0) {
      sum += a[i].weight * a[i].weight;
      ++i;
    } else {
      sum += b[j].weight * b[j].weight;
      ++j;
    }
  }
  for (; i < a.size(); ++i) sum += a[i].weight * a[i].weight;
  for (; j < b.size(); ++j) sum += b[j].weight * b[j].weight;
  return std::sqrt(sum);
}

}  // namespace tagsent::records
