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

#include "tagsent/mr/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <queue>
#include <thread>

#include "tagsent/errors.hpp"
#include "tagsent/hash.hpp"
#include "tagsent/wire.hpp"

namespace tagsent::mr {

namespace fs = std::filesystem;

namespace {

bool record_less(const KVRecord& a, const KVRecord& b) {
  if (a.key != b.key) return a.key < b.key;
  return a.value < b.value;
}

size_t record_footprint(const KVRecord& r) {
  return r.key.size() + r.value.size() + 32;
}

void write_one(std::ofstream& out, const KVRecord& r) {
  std::string buf;
  wire::put_str(buf, r.key);
  wire::put_str(buf, r.value);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

bool read_one(std::ifstream& in, KVRecord& r) {
  char len_buf[4];
  if (!in.read(len_buf, 4)) return false;
  uint32_t klen;
  std::memcpy(&klen, len_buf, 4);
  r.key.resize(klen);
  if (klen && !in.read(r.key.data(), klen))
    throw InternalError("record file: truncated key");
  if (!in.read(len_buf, 4)) throw InternalError("record file: truncated record");
  uint32_t vlen;
  std::memcpy(&vlen, len_buf, 4);
  r.value.resize(vlen);
  if (vlen && !in.read(r.value.data(), vlen))
    throw InternalError("record file: truncated value");
  return true;
}

std::atomic<uint64_t> g_spill_counter{0};

[[noreturn]] void rethrow_with_context(const std::string& job,
                                       const std::string& phase,
                                       const std::string& key,
                                       const std::exception& e) {
  const std::string msg = "job '" + job + "': " + phase + " failed on key '" +
                          key + "': " + e.what();
  if (dynamic_cast<const DataError*>(&e)) throw DataError(msg);
  throw InternalError(msg);
}

}  // namespace

int EngineOptions::default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

uint32_t partition_of(std::string_view key, int num_reducers) {
  return static_cast<uint32_t>(xxh64(key, kPartitionSeed) %
                               static_cast<uint64_t>(num_reducers));
}

GroupedReader::GroupedReader(std::vector<KVRecord> records,
                             size_t budget_bytes, const fs::path& temp_dir,
                             const std::string& job_name)
    : job_name_(job_name) {
  if (budget_bytes == 0)
    throw DataError("spill budget must be positive");

  size_t total = 0;
  for (const KVRecord& r : records) total += record_footprint(r);
  if (total <= budget_bytes) {
    sorted_ = std::move(records);
    std::sort(sorted_.begin(), sorted_.end(), record_less);
    return;
  }

  spill_dir_ = temp_dir / ("tagsent-spill-" + std::to_string(::getpid()) +
                           "-" + std::to_string(g_spill_counter.fetch_add(1)));
  std::error_code ec;
  fs::create_directories(spill_dir_, ec);
  if (ec)
    throw InternalError("job '" + job_name_ +
                        "': cannot create spill directory " +
                        spill_dir_.string() + ": " + ec.message());

  std::vector<fs::path> run_files;
  size_t begin = 0, run_bytes = 0;
  auto flush_run = [&](size_t end) {
    if (end == begin) return;
    std::sort(records.begin() + static_cast<ptrdiff_t>(begin),
              records.begin() + static_cast<ptrdiff_t>(end), record_less);
    const fs::path file =
        spill_dir_ / ("run-" + std::to_string(run_files.size()) + ".bin");
    std::ofstream out(file, std::ios::binary);
    if (!out)
      throw InternalError("job '" + job_name_ + "': cannot open spill file " +
                          file.string());
    for (size_t i = begin; i < end; ++i) {
      write_one(out, records[i]);
      records[i] = KVRecord{};  // release memory as we go
    }
    out.flush();
    if (!out)
      throw InternalError("job '" + job_name_ + "': spill write failed on " +
                          file.string());
    run_files.push_back(file);
    begin = end;
    run_bytes = 0;
  };

  for (size_t i = 0; i < records.size(); ++i) {
    const size_t fp = record_footprint(records[i]);
    if (run_bytes > 0 && run_bytes + fp > budget_bytes) flush_run(i);
    run_bytes += fp;
  }
  flush_run(records.size());
  records.clear();
  records.shrink_to_fit();

  runs_.resize(run_files.size());
  for (size_t i = 0; i < run_files.size(); ++i) {
    runs_[i].in.open(run_files[i], std::ios::binary);
    if (!runs_[i].in)
      throw InternalError("job '" + job_name_ + "': cannot reopen spill file " +
                          run_files[i].string());
    refill(runs_[i]);
  }
}

GroupedReader::~GroupedReader() {
  if (!spill_dir_.empty()) {
    std::error_code ec;
    for (Run& r : runs_) r.in.close();
    fs::remove_all(spill_dir_, ec);
  }
}

bool GroupedReader::refill(Run& run) {
  if (!read_one(run.in, run.head)) {
    run.exhausted = true;
    return false;
  }
  return true;
}

bool GroupedReader::next(std::string& key, std::vector<std::string>& values) {
  values.clear();
  if (runs_.empty()) {
    if (pos_ >= sorted_.size()) return false;
    key = std::move(sorted_[pos_].key);
    while (pos_ < sorted_.size() && sorted_[pos_].key == key) {
      values.push_back(std::move(sorted_[pos_].value));
      ++pos_;
    }
    return true;
  }

  // K-way merge across sorted runs; equal keys are contiguous across the
  // frontier because every run is (key, value)-sorted.
  int min_run = -1;
  for (int i = 0; i < static_cast<int>(runs_.size()); ++i) {
    if (runs_[i].exhausted) continue;
    if (min_run < 0 || record_less(runs_[i].head, runs_[min_run].head))
      min_run = i;
  }
  if (min_run < 0) return false;
  key = runs_[min_run].head.key;
  while (true) {
    int pick = -1;
    for (int i = 0; i < static_cast<int>(runs_.size()); ++i) {
      if (runs_[i].exhausted || runs_[i].head.key != key) continue;
      if (pick < 0 || runs_[i].head.value < runs_[pick].head.value) pick = i;
    }
    if (pick < 0) break;
    values.push_back(std::move(runs_[pick].head.value));
    refill(runs_[pick]);
  }
  return true;
}

std::vector<KVRecord> run_job(const JobSpec& spec, std::vector<KVRecord> input,
                              const EngineOptions& opts) {
  if (spec.num_reducers < 1) throw DataError("num_reducers must be >= 1");
  if (opts.workers < 1) throw DataError("workers must be >= 1");
  const int R = spec.num_reducers;
  const int W = std::min<int>(opts.workers,
                              std::max<size_t>(input.size(), 1));

  // Map phase: contiguous shards, one emission buffer per (worker, partition).
  std::vector<std::vector<std::vector<KVRecord>>> buffers(
      W, std::vector<std::vector<KVRecord>>(R));
  std::vector<std::exception_ptr> errors(W);

  auto map_shard = [&](int w) {
    const size_t n = input.size();
    const size_t lo = n * static_cast<size_t>(w) / W;
    const size_t hi = n * static_cast<size_t>(w + 1) / W;
    try {
      for (size_t i = lo; i < hi; ++i) {
        std::vector<KVRecord> emitted;
        try {
          emitted = spec.map_fn(input[i]);
        } catch (const std::exception& e) {
          rethrow_with_context(spec.name, "map", input[i].key, e);
        }
        for (KVRecord& rec : emitted) {
          if (rec.key.empty())
            throw InternalError("job '" + spec.name +
                                "': map emitted an empty key");
          buffers[w][partition_of(rec.key, R)].push_back(std::move(rec));
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (W == 1) {
    map_shard(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(W);
    for (int w = 0; w < W; ++w) threads.emplace_back(map_shard, w);
    for (auto& t : threads) t.join();
  }
  for (int w = 0; w < W; ++w)
    if (errors[w]) std::rethrow_exception(errors[w]);
  input.clear();
  input.shrink_to_fit();

  // Shuffle barrier passed: group and reduce each partition.
  std::vector<std::vector<KVRecord>> outputs(R);
  std::vector<std::exception_ptr> reduce_errors(R);
  std::atomic<int> next_partition{0};

  auto reduce_partition = [&](int p) {
    try {
      std::vector<KVRecord> emissions;
      size_t total = 0;
      for (int w = 0; w < W; ++w) total += buffers[w][p].size();
      emissions.reserve(total);
      for (int w = 0; w < W; ++w) {
        auto& buf = buffers[w][p];
        emissions.insert(emissions.end(),
                         std::make_move_iterator(buf.begin()),
                         std::make_move_iterator(buf.end()));
        buf.clear();
        buf.shrink_to_fit();
      }
      GroupedReader reader(std::move(emissions), opts.spill_budget_bytes,
                           opts.temp_dir, spec.name);
      std::string key;
      std::vector<std::string> values;
      while (reader.next(key, values)) {
        std::vector<KVRecord> reduced;
        try {
          reduced = spec.reduce_fn(key, values);
        } catch (const std::exception& e) {
          rethrow_with_context(spec.name, "reduce", key, e);
        }
        outputs[p].insert(outputs[p].end(),
                          std::make_move_iterator(reduced.begin()),
                          std::make_move_iterator(reduced.end()));
      }
    } catch (...) {
      reduce_errors[p] = std::current_exception();
    }
  };

  const int pool = std::min(opts.workers, R);
  if (pool == 1) {
    for (int p = 0; p < R; ++p) reduce_partition(p);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int t = 0; t < pool; ++t) {
      threads.emplace_back([&] {
        for (int p = next_partition.fetch_add(1); p < R;
             p = next_partition.fetch_add(1))
          reduce_partition(p);
      });
    }
    for (auto& t : threads) t.join();
  }
  for (int p = 0; p < R; ++p)
    if (reduce_errors[p]) std::rethrow_exception(reduce_errors[p]);

  std::vector<KVRecord> result;
  size_t total = 0;
  for (auto& o : outputs) total += o.size();
  result.reserve(total);
  for (auto& o : outputs)
    result.insert(result.end(), std::make_move_iterator(o.begin()),
                  std::make_move_iterator(o.end()));
  std::sort(result.begin(), result.end(), record_less);
  return result;
}

std::vector<KVRecord> run_chain(std::span<const JobSpec> jobs,
                                std::vector<KVRecord> input,
                                const EngineOptions& opts) {
  for (size_t i = 0; i < jobs.size(); ++i) {
    try {
      input = run_job(jobs[i], std::move(input), opts);
    } catch (const DataError& e) {
      throw DataError("chain position " + std::to_string(i + 1) + "/" +
                      std::to_string(jobs.size()) + ": " + e.what());
    } catch (const std::exception& e) {
      throw InternalError("chain position " + std::to_string(i + 1) + "/" +
                          std::to_string(jobs.size()) + ": " + e.what());
    }
    if (opts.keep_dir) {
      const std::string stem =
          std::to_string(i + 1) + "_" + (jobs[i].name.empty() ? "job" : jobs[i].name);
      std::error_code ec;
      fs::create_directories(*opts.keep_dir, ec);
      write_records(*opts.keep_dir / (stem + ".bin"), input);
      std::ofstream tsv(*opts.keep_dir / (stem + ".tsv"));
      tsv << render_records_tsv(input);
    }
  }
  return input;
}

void write_records(const fs::path& file, std::span<const KVRecord> records) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot open record file for writing: " + file.string());
  for (const KVRecord& r : records) write_one(out, r);
  out.flush();
  if (!out) throw DataError("write failed: " + file.string());
}

std::vector<KVRecord> read_records(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open record file: " + file.string());
  std::vector<KVRecord> records;
  KVRecord r;
  while (read_one(in, r)) records.push_back(std::move(r));
  return records;
}

std::string render_records_tsv(std::span<const KVRecord> records) {
  auto escape = [](std::string_view s, std::string& out) {
    char buf[8];
    for (char c : s) {
      const unsigned char u = static_cast<unsigned char>(c);
      if (c == '\t') out += "\\t";
      else if (c == '\n') out += "\\n";
      else if (c == '\\') out += "\\\\";
      else if (u >= 0x20 && u < 0x7F) out.push_back(c);
      else {
        std::snprintf(buf, sizeof(buf), "\\x%02X", u);
        out += buf;
      }
    }
  };
  std::string out;
  for (const KVRecord& r : records) {
    escape(r.key, out);
    out.push_back('\t');
    escape(r.value, out);
    out.push_back('\n');
  }
  return out;
}

}  // namespace tagsent::mr
