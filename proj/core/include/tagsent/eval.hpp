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
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tagsent/pipeline.hpp"

namespace tagsent {

// Seeded Fisher-Yates; mt19937_64 output is pinned by the standard, so the
// permutation is identical on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

// Stratified fold assignment: per class, ids are sorted, shuffled by the
// seed, and dealt round-robin, so per-class counts differ by at most one
// across folds and the plan is independent of input order.
struct FoldPlan {
  int num_folds = 10;
  uint64_t seed = 0;
  std::map<std::string, int> assignment;  // tweet id -> fold
};

// Requires every class to have at least num_folds members (error names the
// class) and every tweet to be labeled.
FoldPlan make_folds(std::span<const Tweet> labeled, int num_folds,
                    uint64_t seed);

enum class EvalSetting { MultiClass, Binary };

struct ClassScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct LabeledPrediction {
  std::string truth;
  std::string predicted;
};

// Per-class precision/recall/f1 over pooled predictions. A prediction
// outside `classes` (the neutral verdict in multi-class mode) counts against
// its truth class's recall but is no class's false positive.
std::map<std::string, ClassScore> score_predictions(
    std::span<const LabeledPrediction> predictions,
    const std::set<std::string>& classes);

double macro_f1(const std::map<std::string, ClassScore>& per_class);

struct EvalReport {
  EvalSetting setting = EvalSetting::MultiClass;
  bool bloom = false;
  int k = 50;
  int num_folds = 10;
  uint64_t seed = 0;
  std::map<std::string, ClassScore> per_class;
  double macro = 0;                // unweighted mean f1
  double no_match_fraction = 0;    // test tweets with no matching vectors
  double random_baseline = 0;      // 1/|classes| multi-class, 0.5 binary
  // k beyond the characterized range (k > 200): results are extrapolation.
  bool k_extrapolated = false;
};

// Multi-class: per fold, train on the other folds and classify the held-out
// one; predictions are pooled across folds before scoring. A "neu" verdict
// is an error for the true class. Binary: per label, that label's tweets
// plus an equal-size seeded sample of the "neu" tweets form a two-class
// problem with its own stratified folds (plan supplies num_folds and seed);
// the reported macro averages each label's two-class mean f1.
EvalReport cross_validate(std::span<const Tweet> labeled, const FoldPlan& plan,
                          const PipelineConfig& cfg, EvalSetting setting);

struct CompressionReport {
  uint64_t bytes_plain = 0;
  uint64_t bytes_bloom = 0;
  double ratio = 0;  // 1 - bytes_bloom / bytes_plain; negative is possible
};

// Serializes every feature vector twice, canonical text keys vs encoded
// keys, and totals the bytes.
CompressionReport measure_compression(std::span<const Tweet> training,
                                      std::span<const Tweet> test,
                                      const PipelineConfig& cfg);

struct ScalingCell {
  double fraction = 1.0;
  int workers = 1;
  double seconds = 0;
  double speedup = 1.0;  // relative to workers=1 at the same fraction
};

// Runs the full chain per (fraction, workers) cell on nested seeded
// subsamples. workers_list must contain 1 (the speedup baseline).
std::vector<ScalingCell> measure_scaling(std::span<const Tweet> training,
                                         std::span<const Tweet> test,
                                         const PipelineConfig& cfg,
                                         std::span<const double> fractions,
                                         std::span<const int> workers_list,
                                         uint64_t seed);

std::string eval_report_tsv(const EvalReport& report);
std::string compression_report_tsv(const CompressionReport& report);
std::string scaling_report_tsv(std::span<const ScalingCell> cells);

}  // namespace tagsent
