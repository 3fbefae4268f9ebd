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
#include <string_view>

namespace tagsent {

// Seeded 64-bit hash (the XXH64 algorithm). Every hash-dependent decision in
// the system (Bloom indices, shuffle partitioning) goes through this one
// function so that runs are bit-reproducible across platforms.
uint64_t xxh64(std::string_view data, uint64_t seed);

// Default seeds for the Bloom filter's double-hashing scheme. Recorded in
// run.toml so an encoded dataset can always be re-derived.
inline constexpr uint64_t kBloomSeed1Default = 0x9E3779B97F4A7C15ULL;
inline constexpr uint64_t kBloomSeed2Default = 0xC2B2AE3D27D4EB4FULL;

// Seed reserved for map/shuffle partitioning; distinct from the Bloom seeds
// so feature encoding and record routing stay statistically independent.
inline constexpr uint64_t kPartitionSeed = 0x6D722D656E67696EULL;

}  // namespace tagsent
