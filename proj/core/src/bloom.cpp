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

#include "tagsent/bloom.hpp"

#include <algorithm>
#include <bit>

#include "tagsent/errors.hpp"

namespace tagsent {

namespace {

void check_params(const BloomParams& p) {
  if (p.bits < 1) throw DataError("bloom: bits must be >= 1");
  if (p.hashes < 1) throw DataError("bloom: hashes must be >= 1");
}

}  // namespace

std::string EncodedKey::wire() const {
  std::string out = "B:";
  for (size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += std::to_string(indices[i]);
  }
  return out;
}

BloomFilter::BloomFilter(const BloomParams& params) : params_(params) {
  check_params(params_);
  words_.assign((params_.bits + 63) / 64, 0);
}

void BloomFilter::insert(std::string_view element) {
  const uint64_t h1 = xxh64(element, params_.seed1);
  const uint64_t h2 = xxh64(element, params_.seed2);
  for (uint32_t j = 0; j < params_.hashes; ++j) {
    const uint64_t idx = (h1 + j * h2) % params_.bits;
    words_[idx / 64] |= uint64_t{1} << (idx % 64);
  }
}

bool BloomFilter::contains(std::string_view element) const {
  const uint64_t h1 = xxh64(element, params_.seed1);
  const uint64_t h2 = xxh64(element, params_.seed2);
  for (uint32_t j = 0; j < params_.hashes; ++j) {
    const uint64_t idx = (h1 + j * h2) % params_.bits;
    if (!(words_[idx / 64] & (uint64_t{1} << (idx % 64)))) return false;
  }
  return true;
}

void BloomFilter::merge(const BloomFilter& other) {
  if (other.words_.size() != words_.size())
    throw InternalError("bloom: merge of filters with different geometry");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

size_t BloomFilter::popcount() const {
  size_t n = 0;
  for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
  return n;
}

EncodedKey encode_key(std::string_view element, const BloomParams& params) {
  check_params(params);
  const uint64_t h1 = xxh64(element, params.seed1);
  const uint64_t h2 = xxh64(element, params.seed2);
  EncodedKey key;
  key.indices.reserve(params.hashes);
  for (uint32_t j = 0; j < params.hashes; ++j) {
    key.indices.push_back(static_cast<uint32_t>((h1 + j * h2) % params.bits));
  }
  std::sort(key.indices.begin(), key.indices.end());
  key.indices.erase(std::unique(key.indices.begin(), key.indices.end()),
                    key.indices.end());
  return key;
}

}  // namespace tagsent
