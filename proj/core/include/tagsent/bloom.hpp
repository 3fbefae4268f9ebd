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
#include <string>
#include <string_view>
#include <vector>

#include "tagsent/hash.hpp"

namespace tagsent {

// Parameters of the fixed-size Bloom filter. The same parameters drive the
// feature-key encoder, so they are part of a run's reproducibility contract.
struct BloomParams {
  uint32_t bits = 999;    // length z of the bit vector
  uint32_t hashes = 3;    // number q of hash functions
  uint64_t seed1 = kBloomSeed1Default;
  uint64_t seed2 = kBloomSeed2Default;
};

// The index positions an element maps to: at most `hashes` distinct values in
// [0, bits), strictly ascending. Doubles as the compressed feature key.
struct EncodedKey {
  std::vector<uint32_t> indices;

  // Wire form "B:i1,i2,...": what replaces the canonical text key when
  // Bloom encoding is enabled.
  std::string wire() const;

  bool operator==(const EncodedKey&) const = default;
  auto operator<=>(const EncodedKey&) const = default;
};

// Membership filter over opaque byte strings. False positives possible,
// false negatives impossible. Not internally synchronized; concurrent
// writers must keep private filters and merge() them afterwards.
class BloomFilter {
 public:
  explicit BloomFilter(const BloomParams& params);

  void insert(std::string_view element);
  bool contains(std::string_view element) const;

  // Bitwise OR of another filter built with identical parameters.
  void merge(const BloomFilter& other);

  size_t popcount() const;
  const BloomParams& params() const { return params_; }

 private:
  BloomParams params_;
  std::vector<uint64_t> words_;
};

// Deterministic index derivation: two seeded 64-bit hashes h1, h2 of the
// element combined as (h1 + j*h2) mod bits for j = 0..hashes-1, duplicates
// removed, result sorted. Same element and parameters always produce the
// same key.
EncodedKey encode_key(std::string_view element, const BloomParams& params);

}  // namespace tagsent
