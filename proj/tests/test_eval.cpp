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

#include <doctest.h>

#include <algorithm>
#include <array>

#include "support/oracle.hpp"
#include "support/synth.hpp"
#include "tagsent/errors.hpp"

using namespace tagsent;

namespace {

std::vector<Tweet> balanced_tweets(int per_class, int classes,
                                   DatasetConfig& cfg) {
  cfg.hashtag_list.clear();
  for (int c = 0; c < classes; ++c)
    cfg.hashtag_list.push_back("#k" + std::to_string(c));
  cfg.min_proper_words = 0;
  std::vector<Tweet> tweets;
  testsupport::Rng rng(7);
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const std::string id = "c" + std::to_string(c) + "n" + std::to_string(i);
      std::string text = "base" + std::to_string(c);
      for (int w = 0; w < 4; ++w)
        text += " w" + std::to_string(c) + "v" + std::to_string(rng.below(6));
      tweets.push_back(
          make_tweet(id, label_from_name(cfg.hashtag_list[c]), text, cfg));
    }
  }
  return tweets;
}

}  // namespace

TEST_CASE("stratified folds balance every class") {
  DatasetConfig cfg;
  const auto tweets = balanced_tweets(50, 2, cfg);
  const FoldPlan plan = make_folds(tweets, 10, 42);
  std::array<std::array<int, 2>, 10> counts{};
  for (const Tweet& t : tweets) {
    const int fold = plan.assignment.at(t.id);
    const int cls = t.label->name == "#k0" ? 0 : 1;
    ++counts[fold][cls];
  }
  for (const auto& fold : counts) {
    CHECK(fold[0] == 5);
    CHECK(fold[1] == 5);
  }
}

TEST_CASE("fold assignment is deterministic and order-independent") {
  DatasetConfig cfg;
  auto tweets = balanced_tweets(20, 3, cfg);
  const FoldPlan a = make_folds(tweets, 5, 9);
  const FoldPlan b = make_folds(tweets, 5, 9);
  CHECK(a.assignment == b.assignment);
  std::reverse(tweets.begin(), tweets.end());
  const FoldPlan c = make_folds(tweets, 5, 9);
  CHECK(a.assignment == c.assignment);
  const FoldPlan d = make_folds(tweets, 5, 10);
  CHECK(a.assignment != d.assignment);
}

TEST_CASE("a class smaller than the fold count is fatal") {
  DatasetConfig cfg;
  auto tweets = balanced_tweets(4, 1, cfg);
  try {
    make_folds(tweets, 10, 1);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("#k0") != std::string::npos);
  }
}

TEST_CASE("scoring a perfect classifier") {
  std::vector<LabeledPrediction> preds;
  for (int i = 0; i < 30; ++i) preds.push_back({"#a", "#a"});
  for (int i = 0; i < 30; ++i) preds.push_back({"#b", "#b"});
  const auto scores = score_predictions(preds, {"#a", "#b"});
  CHECK(macro_f1(scores) == doctest::Approx(1.0));
}

TEST_CASE("scoring a constant classifier on a balanced set") {
  std::vector<LabeledPrediction> preds;
  for (int i = 0; i < 40; ++i) preds.push_back({"#a", "#a"});
  for (int i = 0; i < 40; ++i) preds.push_back({"#b", "#a"});
  const auto scores = score_predictions(preds, {"#a", "#b"});
  CHECK(scores.at("#a").recall == doctest::Approx(1.0));
  CHECK(scores.at("#a").precision == doctest::Approx(0.5));
  CHECK(scores.at("#b").f1 == 0.0);
}

TEST_CASE("neutral verdicts are errors in multi-class scoring") {
  std::vector<LabeledPrediction> preds = {{"#a", "neu"}, {"#a", "#a"}};
  const auto scores = score_predictions(preds, {"#a", "#b"});
  CHECK(scores.at("#a").recall == doctest::Approx(0.5));
  CHECK(scores.at("#a").precision == doctest::Approx(1.0));
}

TEST_CASE("random verdicts score near the uniform baseline") {
  testsupport::Rng rng(271828);
  const int classes = 4;
  std::vector<LabeledPrediction> preds;
  std::set<std::string> class_set;
  for (int c = 0; c < classes; ++c) class_set.insert("#k" + std::to_string(c));
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < 3000; ++i) {
      preds.push_back({"#k" + std::to_string(c),
                       "#k" + std::to_string(rng.below(classes))});
    }
  }
  const double macro = macro_f1(score_predictions(preds, class_set));
  CHECK(macro == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("multi-class cross validation on a synthetic corpus") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 120, .test_tweets = 0, .num_classes = 3, .seed = 61});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  cfg.k = 5;
  const FoldPlan plan = make_folds(corpus.train, 4, 17);
  const EvalReport report =
      cross_validate(corpus.train, plan, cfg, EvalSetting::MultiClass);
  CHECK(report.per_class.size() == 3);
  for (const auto& [name, s] : report.per_class) {
    CHECK(s.precision >= 0.0);
    CHECK(s.precision <= 1.0);
    CHECK(s.recall >= 0.0);
    CHECK(s.recall <= 1.0);
  }
  CHECK(report.macro >= 0.0);
  CHECK(report.macro <= 1.0);
  CHECK(report.no_match_fraction >= 0.0);
  CHECK(report.no_match_fraction <= 1.0);
  CHECK(report.random_baseline == doctest::Approx(1.0 / 3));
  CHECK_FALSE(report.k_extrapolated);

  SUBCASE("reports are permutation-invariant") {
    std::vector<Tweet> shuffled = corpus.train;
    std::reverse(shuffled.begin(), shuffled.end());
    const EvalReport again =
        cross_validate(shuffled, plan, cfg, EvalSetting::MultiClass);
    CHECK(again.macro == report.macro);
    CHECK(again.no_match_fraction == report.no_match_fraction);
    for (const auto& [name, s] : report.per_class) {
      CHECK(again.per_class.at(name).f1 == s.f1);
    }
  }
}

TEST_CASE("binary cross validation balances against neutral samples") {
  auto corpus = testsupport::make_corpus(
      {.train_tweets = 80, .test_tweets = 0, .num_classes = 2, .seed = 63});
  // Add a neutral pool from a different vocabulary.
  std::vector<Tweet> labeled = corpus.train;
  for (int i = 0; i < 60; ++i) {
    labeled.push_back(make_tweet(
        "neu" + std::to_string(i), neutral_label(),
        "calm plain text n" + std::to_string(i % 7) + " m" +
            std::to_string(i % 5) + " k" + std::to_string(i % 3),
        corpus.cfg));
  }
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  cfg.k = 3;
  const FoldPlan plan = make_folds(labeled, 4, 19);
  const EvalReport report =
      cross_validate(labeled, plan, cfg, EvalSetting::Binary);
  CHECK(report.random_baseline == doctest::Approx(0.5));
  CHECK(report.per_class.size() == 2);  // one entry per sentiment label
  CHECK(report.macro >= 0.0);
  CHECK(report.macro <= 1.0);
}

TEST_CASE("binary evaluation without enough neutral tweets is fatal") {
  auto corpus = testsupport::make_corpus(
      {.train_tweets = 40, .test_tweets = 0, .num_classes = 2, .seed = 65});
  std::vector<Tweet> labeled = corpus.train;
  labeled.push_back(
      make_tweet("neu0", neutral_label(), "just one neutral line", corpus.cfg));
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  const FoldPlan plan{.num_folds = 4, .seed = 1, .assignment = {}};
  CHECK_THROWS_AS(cross_validate(labeled, plan, cfg, EvalSetting::Binary),
                  DataError);
}

TEST_CASE("no-match fraction equals the oracle count") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 70, .test_tweets = 30, .num_classes = 3, .seed = 67});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  const ClassifyResult r = classify_corpus(corpus.train, corpus.test, cfg);
  const auto oracle =
      testsupport::brute_force_classify(corpus.train, corpus.test, cfg);
  CHECK(r.stats.no_match == oracle.no_match_ids.size());
  CHECK(r.stats.no_match_fraction ==
        doctest::Approx(double(oracle.no_match_ids.size()) /
                        double(r.stats.test_admitted)));
}

TEST_CASE("compression ratio is zero with encoding disabled") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 40, .test_tweets = 10, .num_classes = 2, .seed = 71});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  cfg.bloom_enabled = false;
  const CompressionReport report =
      measure_compression(corpus.train, corpus.test, cfg);
  CHECK(report.bytes_plain == report.bytes_bloom);
  CHECK(report.ratio == 0.0);
}

TEST_CASE("short keys can make the encoding larger, reported honestly") {
  // Single-letter vocabulary: "W:a" is 3 bytes, its encoding ~10.
  PipelineConfig cfg;
  cfg.dataset.hashtag_list = {"#x", "#y"};
  cfg.dataset.min_proper_words = 0;
  cfg.bloom_enabled = true;
  cfg.engine.workers = 1;
  std::vector<Tweet> train;
  const char* texts[] = {"a b", "b c", "c d", "d e"};
  for (int i = 0; i < 4; ++i)
    train.push_back(make_tweet("t" + std::to_string(i),
                               label_from_name(i % 2 ? "#x" : "#y"), texts[i],
                               cfg.dataset));
  const CompressionReport report = measure_compression(train, {}, cfg);
  CHECK(report.bytes_bloom > report.bytes_plain);
  CHECK(report.ratio < 0.0);
}

TEST_CASE("compression with bloom on a realistic corpus") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 120, .test_tweets = 20, .num_classes = 3, .seed = 73});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  cfg.bloom_enabled = true;
  const CompressionReport report =
      measure_compression(corpus.train, corpus.test, cfg);
  CHECK(report.bytes_plain > 0);
  CHECK(report.bytes_bloom > 0);
  CHECK(report.bytes_bloom != report.bytes_plain);
  const std::string tsv = compression_report_tsv(report);
  CHECK(tsv.find("bytes_plain") != std::string::npos);
  CHECK(tsv.find("15-20%") != std::string::npos);
}

TEST_CASE("scaling measurement validates its inputs") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 30, .test_tweets = 10, .num_classes = 2, .seed = 79});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 1;
  const std::vector<double> bad_fracs = {0.0, 0.5};
  const std::vector<int> with_one = {1};
  CHECK_THROWS_AS(measure_scaling(corpus.train, corpus.test, cfg, bad_fracs,
                                  with_one, 5),
                  DataError);
  const std::vector<double> fracs = {0.5, 1.0};
  const std::vector<int> no_one = {2, 4};
  CHECK_THROWS_AS(
      measure_scaling(corpus.train, corpus.test, cfg, fracs, no_one, 5),
      DataError);
}

TEST_CASE("scaling cells carry timings and unit baseline speedup") {
  const auto corpus = testsupport::make_corpus(
      {.train_tweets = 40, .test_tweets = 10, .num_classes = 2, .seed = 83});
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 1;
  const std::vector<double> fracs = {0.5, 1.0};
  const std::vector<int> workers = {1};
  const auto cells =
      measure_scaling(corpus.train, corpus.test, cfg, fracs, workers, 5);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    CHECK(c.seconds >= 0.0);
    CHECK(c.speedup == doctest::Approx(1.0));
  }
  const std::string tsv = scaling_report_tsv(cells);
  CHECK(tsv.find("fraction") != std::string::npos);
}

TEST_CASE("report rendering mentions extrapolated k") {
  EvalReport report;
  report.k = 500;
  report.k_extrapolated = true;
  const std::string tsv = eval_report_tsv(report);
  CHECK(tsv.find("extrapolation") != std::string::npos);
}
