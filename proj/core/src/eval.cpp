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

#include "tagsent/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "tagsent/errors.hpp"
#include "tagsent/hash.hpp"

namespace tagsent {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Groups tweets by label name; throws on unlabeled input.
std::map<std::string, std::vector<const Tweet*>> by_class(
    std::span<const Tweet> labeled) {
  std::map<std::string, std::vector<const Tweet*>> groups;
  for (const Tweet& t : labeled) {
    if (!t.label)
      throw DataError("tweet \"" + t.id + "\" is unlabeled; folds need labels");
    groups[t.label->name].push_back(&t);
  }
  return groups;
}

Tweet strip_label(const Tweet& t) {
  Tweet copy = t;
  copy.label.reset();
  return copy;
}

struct FoldOutcome {
  std::vector<LabeledPrediction> predictions;
  size_t no_match = 0;
  size_t tested = 0;
};

FoldOutcome run_folds(std::span<const Tweet> tweets, const FoldPlan& plan,
                      const PipelineConfig& cfg) {
  FoldOutcome outcome;
  for (int fold = 0; fold < plan.num_folds; ++fold) {
    std::vector<Tweet> train;
    std::vector<Tweet> test;
    std::map<std::string, std::string> truth;
    for (const Tweet& t : tweets) {
      auto it = plan.assignment.find(t.id);
      if (it == plan.assignment.end())
        throw DataError("tweet \"" + t.id + "\" is missing from the fold plan");
      if (it->second == fold) {
        truth[t.id] = t.label->name;
        test.push_back(strip_label(t));
      } else {
        train.push_back(t);
      }
    }
    if (test.empty())
      throw DataError("fold " + std::to_string(fold) + " is empty");
    const ClassifyResult result = classify_corpus(train, test, cfg);
    for (const Verdict& v : result.verdicts)
      outcome.predictions.push_back({truth.at(v.test_id), v.label.name});
    outcome.no_match += result.stats.no_match;
    outcome.tested += result.stats.test_admitted;
  }
  return outcome;
}

}  // namespace

FoldPlan make_folds(std::span<const Tweet> labeled, int num_folds,
                    uint64_t seed) {
  if (num_folds < 2) throw DataError("cross validation needs at least 2 folds");
  FoldPlan plan;
  plan.num_folds = num_folds;
  plan.seed = seed;
  for (auto& [name, members] : by_class(labeled)) {
    if (members.size() < static_cast<size_t>(num_folds))
      throw DataError("class \"" + name + "\" has " +
                      std::to_string(members.size()) +
                      " members, fewer than " + std::to_string(num_folds) +
                      " folds");
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (const Tweet* t : members) ids.push_back(t->id);
    std::sort(ids.begin(), ids.end());
    deterministic_shuffle(ids, seed ^ xxh64(name, seed));
    for (size_t i = 0; i < ids.size(); ++i) {
      auto [it, inserted] =
          plan.assignment.emplace(ids[i], static_cast<int>(i % num_folds));
      if (!inserted)
        throw DataError("duplicate tweet id \"" + ids[i] + "\" across classes");
    }
  }
  return plan;
}

std::map<std::string, ClassScore> score_predictions(
    std::span<const LabeledPrediction> predictions,
    const std::set<std::string>& classes) {
  std::map<std::string, size_t> tp, fp, fn;
  for (const LabeledPrediction& p : predictions) {
    if (!classes.contains(p.truth))
      throw DataError("truth label \"" + p.truth + "\" is not a class");
    if (p.predicted == p.truth) {
      ++tp[p.truth];
    } else {
      ++fn[p.truth];
      if (classes.contains(p.predicted)) ++fp[p.predicted];
    }
  }
  std::map<std::string, ClassScore> scores;
  for (const std::string& c : classes) {
    const double tpc = static_cast<double>(tp[c]);
    const double fpc = static_cast<double>(fp[c]);
    const double fnc = static_cast<double>(fn[c]);
    ClassScore s;
    s.precision = (tpc + fpc) > 0 ? tpc / (tpc + fpc) : 0.0;
    s.recall = (tpc + fnc) > 0 ? tpc / (tpc + fnc) : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    scores[c] = s;
  }
  return scores;
}

double macro_f1(const std::map<std::string, ClassScore>& per_class) {
  if (per_class.empty()) return 0.0;
  double sum = 0;
  for (const auto& [name, s] : per_class) sum += s.f1;
  return sum / static_cast<double>(per_class.size());
}

EvalReport cross_validate(std::span<const Tweet> labeled, const FoldPlan& plan,
                          const PipelineConfig& cfg, EvalSetting setting) {
  EvalReport report;
  report.setting = setting;
  report.bloom = cfg.bloom_enabled;
  report.k = cfg.k;
  report.num_folds = plan.num_folds;
  report.seed = plan.seed;
  report.k_extrapolated = cfg.k > 200;

  if (setting == EvalSetting::MultiClass) {
    std::set<std::string> classes;
    for (const Tweet& t : labeled) {
      if (!t.label) throw DataError("unlabeled tweet in evaluation input");
      classes.insert(t.label->name);
    }
    const FoldOutcome outcome = run_folds(labeled, plan, cfg);
    report.per_class = score_predictions(outcome.predictions, classes);
    report.macro = macro_f1(report.per_class);
    report.no_match_fraction =
        outcome.tested ? static_cast<double>(outcome.no_match) / outcome.tested
                       : 0.0;
    report.random_baseline = 1.0 / static_cast<double>(classes.size());
    return report;
  }

  // Binary: each sentiment label against an equal-size neutral sample.
  auto groups = by_class(labeled);
  auto neu_it = groups.find("neu");
  if (neu_it == groups.end())
    throw DataError("binary evaluation needs \"neu\" tweets");
  std::vector<std::string> neu_ids;
  std::map<std::string, const Tweet*> neu_by_id;
  for (const Tweet* t : neu_it->second) {
    neu_ids.push_back(t->id);
    neu_by_id[t->id] = t;
  }
  std::sort(neu_ids.begin(), neu_ids.end());
  deterministic_shuffle(neu_ids, plan.seed);

  size_t total_no_match = 0, total_tested = 0;
  double macro_sum = 0;
  size_t label_count = 0;
  for (const auto& [name, members] : groups) {
    if (name == "neu") continue;
    ++label_count;
    if (neu_ids.size() < members.size())
      throw DataError("not enough \"neu\" tweets to balance class \"" + name +
                      "\" (" + std::to_string(neu_ids.size()) + " < " +
                      std::to_string(members.size()) + ")");
    std::vector<Tweet> subset;
    subset.reserve(members.size() * 2);
    for (const Tweet* t : members) subset.push_back(*t);
    for (size_t i = 0; i < members.size(); ++i)
      subset.push_back(*neu_by_id.at(neu_ids[i]));

    const FoldPlan subplan = make_folds(subset, plan.num_folds, plan.seed);
    const FoldOutcome outcome = run_folds(subset, subplan, cfg);
    const auto scores =
        score_predictions(outcome.predictions, {name, "neu"});
    report.per_class[name] = scores.at(name);
    macro_sum += (scores.at(name).f1 + scores.at("neu").f1) / 2.0;
    total_no_match += outcome.no_match;
    total_tested += outcome.tested;
  }
  if (label_count == 0)
    throw DataError("binary evaluation needs at least one sentiment label");
  report.macro = macro_sum / static_cast<double>(label_count);
  report.no_match_fraction =
      total_tested ? static_cast<double>(total_no_match) / total_tested : 0.0;
  report.random_baseline = 0.5;
  return report;
}

CompressionReport measure_compression(std::span<const Tweet> training,
                                      std::span<const Tweet> test,
                                      const PipelineConfig& cfg) {
  auto total_bytes = [&](bool bloom_on) -> uint64_t {
    PipelineConfig variant = cfg;
    variant.bloom_enabled = bloom_on;
    const PreparedCorpus corpus = prepare_corpus(training, test, variant);
    uint64_t bytes = 0;
    for (const mr::KVRecord& rec : build_vectors(corpus, variant)) {
      const records::VectorRecord v = records::decode_vector(rec.value);
      bytes +=
          records::encode_vector_payload(rec.key, v.label, v.entries).size();
    }
    return bytes;
  };

  CompressionReport report;
  report.bytes_plain = total_bytes(false);
  report.bytes_bloom =
      cfg.bloom_enabled ? total_bytes(true) : report.bytes_plain;
  if (report.bytes_plain == 0)
    throw DataError("no feature vectors survive the threshold; nothing to measure");
  report.ratio = 1.0 - static_cast<double>(report.bytes_bloom) /
                           static_cast<double>(report.bytes_plain);
  return report;
}

std::vector<ScalingCell> measure_scaling(std::span<const Tweet> training,
                                         std::span<const Tweet> test,
                                         const PipelineConfig& cfg,
                                         std::span<const double> fractions,
                                         std::span<const int> workers_list,
                                         uint64_t seed) {
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw DataError("fractions must lie in (0, 1]");
  if (std::find(workers_list.begin(), workers_list.end(), 1) ==
      workers_list.end())
    throw DataError("workers list must include 1 (the speedup baseline)");

  // Nested subsamples: one seeded permutation per dataset, prefixes per F.
  std::vector<size_t> train_order(training.size()), test_order(test.size());
  for (size_t i = 0; i < train_order.size(); ++i) train_order[i] = i;
  for (size_t i = 0; i < test_order.size(); ++i) test_order[i] = i;
  deterministic_shuffle(train_order, seed);
  deterministic_shuffle(test_order, seed + 1);

  std::vector<ScalingCell> cells;
  for (double f : fractions) {
    const size_t n_train = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(f * static_cast<double>(training.size()))));
    const size_t n_test = static_cast<size_t>(
        std::ceil(f * static_cast<double>(test.size())));
    std::vector<Tweet> sub_train, sub_test;
    sub_train.reserve(n_train);
    sub_test.reserve(n_test);
    for (size_t i = 0; i < n_train && i < training.size(); ++i)
      sub_train.push_back(training[train_order[i]]);
    for (size_t i = 0; i < n_test && i < test.size(); ++i)
      sub_test.push_back(test[test_order[i]]);

    double baseline = 0;
    for (int w : workers_list) {
      PipelineConfig variant = cfg;
      variant.engine.workers = w;
      const auto start = std::chrono::steady_clock::now();
      (void)classify_corpus(sub_train, sub_test, variant);
      const auto stop = std::chrono::steady_clock::now();
      ScalingCell cell;
      cell.fraction = f;
      cell.workers = w;
      cell.seconds = std::chrono::duration<double>(stop - start).count();
      if (w == 1) baseline = cell.seconds;
      cell.speedup = cell.seconds > 0 ? baseline / cell.seconds : 1.0;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string eval_report_tsv(const EvalReport& report) {
  std::string out;
  out += "# setting=";
  out += report.setting == EvalSetting::MultiClass ? "multi-class" : "binary";
  out += " bloom=";
  out += report.bloom ? "on" : "off";
  out += " k=" + std::to_string(report.k);
  out += " folds=" + std::to_string(report.num_folds);
  out += " seed=" + std::to_string(report.seed);
  out += "\n";
  if (report.k_extrapolated)
    out += "# note: k > 200 is outside the characterized range; "
           "scores are extrapolation\n";
  out += "class\tprecision\trecall\tf1\n";
  for (const auto& [name, s] : report.per_class) {
    out += name + "\t" + fmt(s.precision) + "\t" + fmt(s.recall) + "\t" +
           fmt(s.f1) + "\n";
  }
  out += "macro_f1\t" + fmt(report.macro) + "\n";
  out += "no_match_fraction\t" + fmt(report.no_match_fraction) + "\n";
  out += "random_baseline\t" + fmt(report.random_baseline) + "\n";
  return out;
}

std::string compression_report_tsv(const CompressionReport& report) {
  std::string out;
  out += "# feature-vector serialization, canonical text keys vs Bloom-encoded keys\n";
  out += "# reference: comparable corpora compress by 15-20%\n";
  out += "bytes_plain\t" + std::to_string(report.bytes_plain) + "\n";
  out += "bytes_bloom\t" + std::to_string(report.bytes_bloom) + "\n";
  out += "ratio\t" + fmt(report.ratio) + "\n";
  return out;
}

std::string scaling_report_tsv(std::span<const ScalingCell> cells) {
  std::string out = "# fraction\tworkers\tseconds\tspeedup\n";
  for (const ScalingCell& c : cells) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.2f\t%d\t%.4f\t%.4f\n", c.fraction,
                  c.workers, c.seconds, c.speedup);
    out += buf;
  }
  return out;
}

}  // namespace tagsent
