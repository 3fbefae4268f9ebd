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
#include <vector>

#include "tagsent/corpus.hpp"
#include "tagsent/features.hpp"

// Serialized record layouts flowing between the four jobs. All values are the
// little-endian wire encoding; the record key is always carried by the
// engine, never duplicated unstated inside the value.
namespace tagsent::records {

// ---- tweets (chain input; key = tweet id) ----
std::string encode_tweet(const Tweet& tweet);
Tweet decode_tweet(std::string_view id, std::string_view value);

// ---- feature extraction emissions (job 1 map; key = feature key) ----
struct FeatureEmission {
  FeatureFamily family = FeatureFamily::Word;
  std::string tweet_id;
  double count = 0;  // weight numerator term
  double denom = 0;  // corpus count term
  std::optional<SentimentLabel> label;
};
std::string encode_feature_emission(const FeatureEmission&);
FeatureEmission decode_feature_emission(std::string_view value);

// ---- inverted index (job 1 output; key = feature key) ----
struct IndexPosting {
  std::string tweet_id;
  FeatureFamily family = FeatureFamily::Word;
  double weight = 0;
  std::optional<SentimentLabel> label;
};
struct RawPunctPosting {
  std::string tweet_id;
  double raw = 0;
  std::optional<SentimentLabel> label;
};
// Either a weighted posting list or, before the normalization pass, the raw
// per-tweet values of one punctuation statistic with their corpus maximum.
struct IndexValue {
  bool is_raw_punct = false;
  double max_raw = 0;
  std::vector<IndexPosting> postings;
  std::vector<RawPunctPosting> raw;
};
std::string encode_postings(std::span<const IndexPosting> postings);
std::string encode_raw_punct(double max_raw,
                             std::span<const RawPunctPosting> raw);
IndexValue decode_index_value(std::string_view value);

// ---- vector construction emissions (job 2 map; key = tweet id) ----
struct VectorEntry {
  std::string key;
  double weight = 0;
};
struct MatchRef {
  std::string train_id;
  SentimentLabel label;
};
// tag 0: one feature dimension of the keyed tweet (carries the tweet's own
// label); tag 1: the training tweets sharing one feature with a test tweet.
std::string encode_dimension(const VectorEntry& entry,
                             const std::optional<SentimentLabel>& label);
std::string encode_match_refs(std::span<const MatchRef> refs);

// ---- feature vectors (job 2 output; key = tweet id) ----
struct VectorRecord {
  bool is_test = false;
  std::optional<SentimentLabel> label;
  std::vector<VectorEntry> entries;    // sorted by key
  std::vector<MatchRef> match_list;    // test vectors only; sorted by id
};
std::string encode_vector(const VectorRecord&);
VectorRecord decode_vector(std::string_view value);

// The id + label + entries serialization whose byte count the compression
// report totals (no match list).
std::string encode_vector_payload(std::string_view tweet_id,
                                  const std::optional<SentimentLabel>& label,
                                  std::span<const VectorEntry> entries);

// ---- distance computation (job 3; map key = training id) ----
// tag 0: a training vector; tag 1: a probing test vector.
std::string encode_train_side(const SentimentLabel& label,
                              std::span<const VectorEntry> entries);
std::string encode_probe_side(std::string_view test_id,
                              std::span<const VectorEntry> entries);

struct NeighborRecord {
  std::string train_id;
  SentimentLabel label;
  double distance = 0;
};
// Distance is serialized as a 17-significant-digit decimal so reruns are
// byte-identical.
std::string encode_neighbor(const NeighborRecord&);
NeighborRecord decode_neighbor(std::string_view value);
std::string format_distance(double d);

// ---- verdicts (job 4 output; key = test id) ----
std::string encode_label_value(const SentimentLabel&);
SentimentLabel decode_label_value(std::string_view value);

// Euclidean distance over the union of dimensions, both inputs sorted by key.
double euclidean_distance(std::span<const VectorEntry> a,
                          std::span<const VectorEntry> b);

}  // namespace tagsent::records
