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
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tagsent::mr {

// Opaque key/value pair. Values are whatever bytes the job serialized;
// the engine only ever compares them.
struct KVRecord {
  std::string key;
  std::string value;

  bool operator==(const KVRecord&) const = default;
};

using MapFn = std::function<std::vector<KVRecord>(const KVRecord&)>;
using ReduceFn = std::function<std::vector<KVRecord>(
    const std::string& key, std::span<const std::string> values)>;

// One map/shuffle/reduce stage. map_fn and reduce_fn must be deterministic
// and safe to call from multiple threads at once; the engine gives each call
// a single-threaded view.
struct JobSpec {
  std::string name;
  MapFn map_fn;
  ReduceFn reduce_fn;
  int num_reducers = 12;
};

struct EngineOptions {
  int workers = default_workers();
  size_t spill_budget_bytes = 256ull << 20;  // per-partition grouping budget
  std::filesystem::path temp_dir = std::filesystem::temp_directory_path();
  // When set, run_chain persists every job's output here, as the binary
  // record format plus a human-readable TSV rendering.
  std::optional<std::filesystem::path> keep_dir;

  static int default_workers();
};

// Runs one job: map over every input record, group emissions by key (hash
// partitioned, num_reducers ways), reduce once per key. Within a reduce call
// values arrive sorted by their serialized bytes, and the returned stream is
// sorted by (key, value), so output bytes do not depend on workers or
// num_reducers. A map/reduce failure aborts the job, naming the job and the
// offending key.
std::vector<KVRecord> run_job(const JobSpec& spec, std::vector<KVRecord> input,
                              const EngineOptions& opts);

// Sequential composition: each job's output is the next job's input.
std::vector<KVRecord> run_chain(std::span<const JobSpec> jobs,
                                std::vector<KVRecord> input,
                                const EngineOptions& opts);

// Groups records by key within `budget_bytes` of record memory, spilling
// sorted runs to files under temp_dir and merging them back. Grouping output
// is identical to unbounded in-memory grouping.
class GroupedReader {
 public:
  GroupedReader(std::vector<KVRecord> records, size_t budget_bytes,
                const std::filesystem::path& temp_dir,
                const std::string& job_name);
  ~GroupedReader();

  GroupedReader(const GroupedReader&) = delete;
  GroupedReader& operator=(const GroupedReader&) = delete;

  // Advances to the next key group; values come out sorted by bytes.
  bool next(std::string& key, std::vector<std::string>& values);

  bool spilled() const { return !runs_.empty(); }

 private:
  struct Run {
    std::ifstream in;
    KVRecord head;
    bool exhausted = false;
  };

  bool refill(Run& run);

  std::vector<KVRecord> sorted_;  // in-memory mode
  size_t pos_ = 0;
  std::vector<Run> runs_;  // spill mode
  std::filesystem::path spill_dir_;
  std::string job_name_;
};

inline GroupedReader spill_group(std::vector<KVRecord> records,
                                 size_t budget_bytes,
                                 const std::filesystem::path& temp_dir) {
  return GroupedReader(std::move(records), budget_bytes, temp_dir, "group");
}

// Partition routing, shared with nothing else: hash(key) mod num_reducers.
uint32_t partition_of(std::string_view key, int num_reducers);

// Length-prefixed binary record files (u32 key length, key bytes, u32 value
// length, value bytes) and an escaped TSV rendering for inspection.
void write_records(const std::filesystem::path& file,
                   std::span<const KVRecord> records);
std::vector<KVRecord> read_records(const std::filesystem::path& file);
std::string render_records_tsv(std::span<const KVRecord> records);

}  // namespace tagsent::mr
