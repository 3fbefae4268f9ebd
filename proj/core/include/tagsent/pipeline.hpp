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

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "tagsent/bloom.hpp"
#include "tagsent/corpus.hpp"
#include "tagsent/features.hpp"
#include "tagsent/mr/engine.hpp"
#include "tagsent/records.hpp"

namespace tagsent {

// Everything a classification run depends on. Defaults mirror the reference
// experimental setup: k=50, 999-bit/3-hash Bloom filters, inclusion threshold
// 0.005, frequency thresholds 100 and 1000 per million, alpha 0.1, 12
// reducers.
struct PipelineConfig {
  DatasetConfig dataset;
  double f_h = 100.0;
  double f_c = 1000.0;
  bool swap_overlap_bands = false;
  double alpha = 0.1;
  double weight_threshold = 0.005;
  bool bloom_enabled = false;
  BloomParams bloom;
  int k = 50;
  int num_reducers = 12;
  mr::EngineOptions engine;
};

struct Verdict {
  std::string test_id;
  SentimentLabel label;
};

struct ClassifyStats {
  size_t train_total = 0;
  size_t train_admitted = 0;
  size_t test_total = 0;
  size_t test_admitted = 0;
  // Admitted test tweets with no matching vectors; they are labeled "neu".
  size_t no_match = 0;
  double no_match_fraction = 0;
};

struct ClassifyResult {
  std::vector<Verdict> verdicts;  // sorted by test id
  ClassifyStats stats;
};

// Admission filtering plus the training-side vocabulary statistics.
struct PreparedCorpus {
  std::vector<Tweet> train;
  std::vector<Tweet> test;
  std::shared_ptr<const VocabStats> vocab;
  ClassifyStats stats;
};

PreparedCorpus prepare_corpus(std::span<const Tweet> training,
                              std::span<const Tweet> test,
                              const PipelineConfig& cfg);

// Job 1: per tweet, extract all features and emit one record per feature
// (Bloom-encoded keys when enabled); the reduce sums corpus counts, applies
// the inclusion threshold, and emits one posting list per surviving feature.
mr::JobSpec make_feature_extraction_job(
    std::shared_ptr<const VocabStats> vocab, const PipelineConfig& cfg);

// The punctuation statistics are scaled by corpus-wide maxima that only
// exist once every posting list is known, so their raw records are rewritten
// into weighted postings in this pass between jobs 1 and 2. Output is again
// (key, value)-sorted.
std::vector<mr::KVRecord> normalize_punct_postings(
    std::vector<mr::KVRecord> index, double threshold);

// Job 2: invert the index into per-tweet sparse vectors; every test tweet
// additionally collects the deduplicated union of training tweets sharing at
// least one word/n-gram/pattern feature.
mr::JobSpec make_vector_construction_job(const PipelineConfig& cfg);

// Job 3: route each test vector to the training tweets in its match list and
// compute Euclidean distances (punctuation dimensions included).
mr::JobSpec make_distance_job(const PipelineConfig& cfg);

// Job 4: keep the k nearest neighbors (ties on distance broken by ascending
// training id) and emit the modal class; modal ties prefer the smaller
// summed distance, then the lexicographically smaller label name.
mr::JobSpec make_classification_job(int k, const PipelineConfig& cfg);

std::vector<mr::KVRecord> tweets_to_records(std::span<const Tweet> tweets);

// Runs job 1 plus punctuation normalization.
std::vector<mr::KVRecord> build_inverted_index(const PreparedCorpus& corpus,
                                               const PipelineConfig& cfg);

// Runs through job 2; one feature-vector record per tweet.
std::vector<mr::KVRecord> build_vectors(const PreparedCorpus& corpus,
                                        const PipelineConfig& cfg);

// The full four-job chain. Admitted test tweets that never reach job 4
// (empty match list, or no feature survived the threshold) are labeled
// "neu". With engine.keep_dir set, every job's output is persisted.
ClassifyResult classify_corpus(std::span<const Tweet> training,
                               std::span<const Tweet> test,
                               const PipelineConfig& cfg);

// Same chain run once through job 3, then classified at several k values;
// cheaper than re-running the chain per k.
std::map<int, ClassifyResult> classify_corpus_sweep(
    std::span<const Tweet> training, std::span<const Tweet> test,
    const PipelineConfig& cfg, std::span<const int> ks);

// TSV rendering: test_id <TAB> label, one row per verdict.
std::string verdicts_tsv(std::span<const Verdict> verdicts);

}  // namespace tagsent
