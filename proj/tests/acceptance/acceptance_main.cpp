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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracle.hpp"
#include "support/synth.hpp"
#include "tagsent/bloom.hpp"
#include "tagsent/eval.hpp"
#include "tagsent/pipeline.hpp"

using namespace tagsent;
using testsupport::Rng;

namespace {

struct Context {
  // Filled by criterion 1, consumed by criterion 9.
  bool no_match_matches_oracle = true;
  size_t corpora_checked = 0;
};

struct Check {
  bool ok = true;
  std::ostringstream detail;

  template <typename T>
  void expect(bool cond, const T& message) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << message;
    }
  }
};

PipelineConfig config_for(const testsupport::SynthCorpus& corpus) {
  PipelineConfig cfg;
  cfg.dataset = corpus.cfg;
  cfg.engine.workers = 2;
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence across randomized corpora, k in {1,5,50}, Bloom
//    on and off.
// ---------------------------------------------------------------------------
bool criterion_oracle_equivalence(Context& ctx, Check& check) {
  const auto started = std::chrono::steady_clock::now();
  const std::vector<int> ks = {1, 5, 50};
  for (int i = 0; i < 22; ++i) {
    const int total = 200 + i * 38;  // 200..998
    testsupport::SynthSpec spec;
    spec.num_classes = 3 + (i % 11);  // 3..13
    spec.test_tweets = total * 15 / 100;
    spec.train_tweets = total - spec.test_tweets;
    spec.seed = 9000 + i;
    const auto corpus = testsupport::make_corpus(spec);
    for (bool bloom : {false, true}) {
      PipelineConfig cfg = config_for(corpus);
      cfg.bloom_enabled = bloom;
      const auto actual =
          classify_corpus_sweep(corpus.train, corpus.test, cfg, ks);
      const auto expected = testsupport::brute_force_classify_sweep(
          corpus.train, corpus.test, cfg, ks);
      for (int k : ks) {
        const auto& got = actual.at(k);
        const auto& want = expected.at(k);
        bool equal = got.verdicts.size() == want.verdicts.size();
        if (equal) {
          for (size_t v = 0; v < got.verdicts.size(); ++v) {
            if (got.verdicts[v].test_id != want.verdicts[v].test_id ||
                got.verdicts[v].label.name != want.verdicts[v].label.name) {
              equal = false;
              break;
            }
          }
        }
        check.expect(equal, "verdict mismatch (corpus " + std::to_string(i) +
                                ", k=" + std::to_string(k) +
                                (bloom ? ", bloom)" : ")"));
        if (got.stats.no_match != want.no_match_ids.size())
          ctx.no_match_matches_oracle = false;
      }
      ++ctx.corpora_checked;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  check.detail << "22 corpora x {plain,bloom} x k{1,5,50} in " << std::fixed
               << seconds << "s";
  check.expect(seconds < 120.0, "exceeded the 2 minute budget");
  return check.ok;
}

// ---------------------------------------------------------------------------
// 2. Worker and reducer invariance: byte-identical stage outputs.
// ---------------------------------------------------------------------------
bool criterion_worker_invariance(Check& check) {
  testsupport::SynthSpec spec;
  spec.train_tweets = 850;
  spec.test_tweets = 150;
  spec.num_classes = 5;
  spec.seed = 4242;
  const auto corpus = testsupport::make_corpus(spec);

  const auto stage_files = {
      "1_feature_extraction.bin", "2_vector_construction.bin",
      "3_distance_computation.bin", "4_sentiment_classification.bin"};

  std::vector<std::map<std::string, std::string>> snapshots;
  std::vector<std::string> verdict_snapshots;
  for (int workers : {1, 4, 8}) {
    for (int reducers : {1, 12}) {
      PipelineConfig cfg = config_for(corpus);
      cfg.engine.workers = workers;
      cfg.num_reducers = reducers;
      const auto keep = std::filesystem::temp_directory_path() /
                        ("tagsent-acc2-" + std::to_string(::getpid()));
      std::filesystem::remove_all(keep);
      cfg.engine.keep_dir = keep;
      const ClassifyResult result =
          classify_corpus(corpus.train, corpus.test, cfg);
      std::map<std::string, std::string> snapshot;
      for (const char* file : stage_files) {
        std::string bytes;
        for (const auto& rec : mr::read_records(keep / file)) {
          bytes += rec.key;
          bytes.push_back('\0');
          bytes += rec.value;
          bytes.push_back('\n');
        }
        snapshot[file] = std::move(bytes);
      }
      snapshots.push_back(std::move(snapshot));
      verdict_snapshots.push_back(verdicts_tsv(result.verdicts));
      std::filesystem::remove_all(keep);
    }
  }
  for (size_t i = 1; i < snapshots.size(); ++i) {
    check.expect(snapshots[i] == snapshots[0],
                 "stage outputs differ at combination " + std::to_string(i));
    check.expect(verdict_snapshots[i] == verdict_snapshots[0],
                 "verdicts differ at combination " + std::to_string(i));
  }
  check.detail << "workers{1,4,8} x reducers{1,12}, 1000-tweet corpus";
  return check.ok;
}

// ---------------------------------------------------------------------------
// 3. Weight formulas against a direct recount.
// ---------------------------------------------------------------------------

// Independent assignment counter: recursion instead of the production DP.
double count_assignments_rec(const std::vector<std::string>& comps,
                             const std::vector<Token>& toks,
                             const std::vector<WordClass>& cls,
                             bool exact_only) {
  const size_t m = comps.size();
  const size_t n = toks.size();
  auto matches = [&](size_t ci, size_t p) {
    if (comps[ci] == std::string(kSlotMarker)) return cls[p] == WordClass::CW;
    return cls[p] == WordClass::HFW && toks[p].surface == comps[ci];
  };
  std::function<double(size_t, size_t)> rest = [&](size_t ci,
                                                   size_t prev) -> double {
    if (ci == m) return 1.0;
    double total = 0;
    if (exact_only) {
      const size_t p = prev + 1;
      if (p < n && matches(ci, p)) total += rest(ci + 1, p);
      return total;
    }
    bool gap_ok = true;
    for (size_t p = prev + 1; p < n && gap_ok; ++p) {
      if (matches(ci, p)) total += rest(ci + 1, p);
      gap_ok = cls[p] == WordClass::RW;  // the gap may only contain RWs
    }
    return total;
  };
  double total = 0;
  for (size_t p = 0; p < n; ++p)
    if (matches(0, p)) total += rest(1, p);
  return total;
}

bool criterion_weight_formulas(Check& check) {
  testsupport::SynthSpec spec;
  spec.train_tweets = 85;
  spec.test_tweets = 15;
  spec.num_classes = 4;
  spec.seed = 777;
  const auto corpus = testsupport::make_corpus(spec);
  PipelineConfig cfg = config_for(corpus);

  // Production path: job 1 plus punctuation normalization.
  const PreparedCorpus prepared = prepare_corpus(corpus.train, corpus.test, cfg);
  std::map<std::pair<std::string, std::string>, double> actual;  // (key,id)->w
  for (const auto& rec : build_inverted_index(prepared, cfg)) {
    const auto value = records::decode_index_value(rec.value);
    for (const auto& p : value.postings)
      actual[{rec.key, p.tweet_id}] = p.weight;
  }

  // Direct recount, straight from the token streams.
  std::vector<const Tweet*> tweets;
  for (const Tweet& t : prepared.train) tweets.push_back(&t);
  for (const Tweet& t : prepared.test) tweets.push_back(&t);
  const VocabStats& vocab = *prepared.vocab;

  struct Numbers {
    double numer = 0;
    double denom = 0;
  };
  std::map<std::string, std::map<std::string, Numbers>> recount;  // key->id->
  std::map<std::string, double> punct_raw_max;
  std::map<std::string, std::map<std::string, double>> punct_raw;

  for (const Tweet* t : tweets) {
    const auto& toks = t->tokens;
    std::vector<WordClass> cls;
    for (const Token& tok : toks)
      cls.push_back(classify_word(tok.surface, tok.kind, vocab));

    // Words: every Word token except "rt", punctuation runs of length >= 2.
    for (const Token& tok : toks) {
      const bool word = tok.kind == TokenKind::Word && tok.surface != "rt";
      const bool punct_run =
          tok.kind == TokenKind::PunctSeq && tok.surface.size() >= 2;
      if (!word && !punct_run) continue;
      auto& nums = recount["W:" + tok.surface][t->id];
      nums.numer += 1;
      nums.denom += 1;
    }
    // N-grams: all windows of 2..5, skipping all-meta windows.
    for (size_t i = 0; i < toks.size(); ++i) {
      std::string key = "N:";
      bool all_meta = true;
      for (size_t n = 1; n <= 5 && i + n <= toks.size(); ++n) {
        const Token& tok = toks[i + n - 1];
        if (n > 1) key.push_back(' ');
        key += tok.surface;
        const bool meta = tok.kind == TokenKind::MetaUrl ||
                          tok.kind == TokenKind::MetaRef ||
                          tok.kind == TokenKind::MetaTag ||
                          tok.kind == TokenKind::MetaRt;
        all_meta = all_meta && meta;
        if (n >= 2 && !all_meta) {
          auto& nums = recount[key][t->id];
          nums.numer += 1;
          nums.denom += 1;
        }
      }
    }
    // Patterns: enumerate RW-free windows, then count assignments
    // recursively.
    std::set<std::vector<std::string>> pattern_set;
    for (size_t i = 0; i < toks.size(); ++i) {
      if (cls[i] != WordClass::HFW) continue;
      int hfw = 0, slots = 0;
      std::vector<std::string> comps;
      for (size_t j = i; j < toks.size(); ++j) {
        if (cls[j] == WordClass::RW) break;
        if (cls[j] == WordClass::HFW) {
          if (++hfw > 6) break;
          comps.push_back(toks[j].surface);
        } else {
          if (++slots > 5) break;
          comps.push_back(std::string(kSlotMarker));
        }
        if (j > i && cls[j] == WordClass::HFW && hfw >= 2 && slots >= 1)
          pattern_set.insert(comps);
      }
    }
    for (const auto& comps : pattern_set) {
      const double exact = count_assignments_rec(comps, toks, cls, true);
      const double all = count_assignments_rec(comps, toks, cls, false);
      std::string key = "P:";
      for (size_t c = 0; c < comps.size(); ++c) {
        if (c > 0) key.push_back('|');
        key += comps[c];
      }
      auto& nums = recount[key][t->id];
      nums.numer = exact + cfg.alpha * (all - exact);
      nums.denom = exact;
    }
    // Punctuation: character recounts.
    double counts[5] = {0, 0, 0, 0, 0};
    for (const Token& tok : toks) {
      if (tok.kind == TokenKind::Word) counts[0] += 1;
      for (char ch : tok.surface) {
        if (ch == '!') counts[1] += 1;
        if (ch == '?') counts[2] += 1;
        if (ch == '"') counts[3] += 1;
      }
    }
    counts[4] = t->caps_words;
    for (int s = 0; s < 5; ++s) {
      if (counts[s] <= 0) continue;
      const std::string key = "U:P" + std::to_string(s + 1);
      punct_raw[key][t->id] = counts[s];
      punct_raw_max[key] = std::max(punct_raw_max[key], counts[s]);
    }
  }

  // Expected weights with thresholding, plus family maxima for punctuation.
  std::map<std::pair<std::string, std::string>, double> expected;
  double max_w = 0, max_ng = 0, max_pa = 0;
  for (const auto& [key, per_tweet] : recount) {
    double corpus_count = 0;
    for (const auto& [id, nums] : per_tweet) corpus_count += nums.denom;
    if (corpus_count <= 0) continue;
    for (const auto& [id, nums] : per_tweet) {
      const double w = nums.numer / corpus_count;
      if (w < cfg.weight_threshold || w <= 0) continue;
      expected[{key, id}] = w;
      if (key[0] == 'W') max_w = std::max(max_w, w);
      if (key[0] == 'N') max_ng = std::max(max_ng, w);
      if (key[0] == 'P') max_pa = std::max(max_pa, w);
    }
  }
  const double scale = (max_w + max_ng + max_pa) / 3.0;
  for (const auto& [key, per_tweet] : punct_raw) {
    const double max_raw = punct_raw_max[key];
    if (max_raw <= 0 || scale <= 0) continue;
    for (const auto& [id, raw] : per_tweet) {
      const double w = raw / (max_raw * scale);
      if (w < cfg.weight_threshold || w <= 0) continue;
      expected[{key, id}] = w;
    }
  }

  check.expect(actual.size() == expected.size(),
               "posting count mismatch: got " + std::to_string(actual.size()) +
                   ", recount " + std::to_string(expected.size()));
  size_t compared = 0;
  double worst = 0;
  for (const auto& [key_id, w] : expected) {
    auto it = actual.find(key_id);
    if (it == actual.end()) {
      check.expect(false, "missing posting " + key_id.first + "/" +
                              key_id.second);
      continue;
    }
    worst = std::max(worst, std::abs(it->second - w));
    ++compared;
  }
  check.expect(worst <= 1e-12, "max deviation " + std::to_string(worst));
  check.detail << compared << " postings recounted, max |dw| " << worst;
  return check.ok;
}

// ---------------------------------------------------------------------------
// 4. Bloom behavior: no false negatives; false-positive rate within 3 sigma.
// ---------------------------------------------------------------------------
bool criterion_bloom(Check& check) {
  const BloomParams params;  // 999 bits, 3 hashes
  {
    BloomFilter filter(params);
    bool all_found = true;
    for (int i = 0; i < 100000; ++i) {
      const std::string e = "elem-" + std::to_string(i);
      filter.insert(e);
      all_found = all_found && filter.contains(e);
    }
    check.expect(all_found, "false negative observed");
  }
  for (int n : {50, 200, 500}) {
    BloomFilter filter(params);
    for (int i = 0; i < n; ++i) filter.insert("in-" + std::to_string(i));
    const int probes = 10000;
    int hits = 0;
    for (int i = 0; i < probes; ++i)
      if (filter.contains("out-" + std::to_string(i))) ++hits;
    const double q = params.hashes, z = params.bits;
    const double p = std::pow(1.0 - std::exp(-q * n / z), q);
    const double sigma = std::sqrt(p * (1 - p) / probes);
    const double rate = double(hits) / probes;
    check.expect(std::abs(rate - p) <= 3 * sigma,
                 "n=" + std::to_string(n) + ": rate " + std::to_string(rate) +
                     " vs " + std::to_string(p) + " +- " +
                     std::to_string(3 * sigma));
    check.detail << "n=" << n << " rate " << rate << " (expect " << p << ") ";
  }
  return check.ok;
}

// ---------------------------------------------------------------------------
// 5. The frequency-class rule, exhaustively over the printed table.
// ---------------------------------------------------------------------------
bool criterion_word_class_table(Check& check) {
  VocabStats stats;
  stats.total_tokens = 1000000;
  const std::pair<uint64_t, WordClass> table[] = {
      {0, WordClass::RW},     {50, WordClass::RW},    {100, WordClass::RW},
      {101, WordClass::HFW},  {300, WordClass::HFW},  {549, WordClass::HFW},
      {550, WordClass::CW},   {700, WordClass::CW},   {999, WordClass::CW},
      {1000, WordClass::HFW}, {5000, WordClass::HFW},
  };
  for (const auto& [fr, expected] : table) {
    const std::string word = "w" + std::to_string(fr);
    stats.counts[word] = {fr, TokenKind::Word};
  }
  for (const auto& [fr, expected] : table) {
    const std::string word = "w" + std::to_string(fr);
    const WordClass got = classify_word(word, TokenKind::Word, stats);
    check.expect(got == expected, "fr=" + std::to_string(fr) + " classified " +
                                      std::to_string(int(got)) + " want " +
                                      std::to_string(int(expected)));
  }
  check.detail << "fr in {0,50,100,101,300,549,550,700,999,1000,5000}";
  return check.ok;
}

// ---------------------------------------------------------------------------
// 6. Random baselines: 1/13 and 1/4 within +-0.02.
// ---------------------------------------------------------------------------
bool criterion_random_baseline(Check& check) {
  auto run = [&](int classes, int per_class, uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledPrediction> preds;
    std::set<std::string> class_set;
    for (int c = 0; c < classes; ++c)
      class_set.insert("#k" + std::to_string(c));
    for (int c = 0; c < classes; ++c)
      for (int i = 0; i < per_class; ++i)
        preds.push_back({"#k" + std::to_string(c),
                         "#k" + std::to_string(rng.below(classes))});
    return macro_f1(score_predictions(preds, class_set));
  };
  const double m13 = run(13, 1500, 31337);
  const double m4 = run(4, 3000, 31338);
  check.expect(std::abs(m13 - 1.0 / 13) <= 0.02,
               "13-class macro " + std::to_string(m13));
  check.expect(std::abs(m4 - 0.25) <= 0.02,
               "4-class macro " + std::to_string(m4));
  check.detail << "13-class " << m13 << " (1/13=" << 1.0 / 13 << "), 4-class "
               << m4 << " (0.25)";
  return check.ok;
}

// ---------------------------------------------------------------------------
// 7. Compression report against a hand-computed fixture.
// ---------------------------------------------------------------------------
bool criterion_compression_fixture(Check& check) {
  // Fixture: two training tweets, "aa bb" and "bb cc". All words are HFW
  // (no patterns), every weight survives threshold 0.005.
  PipelineConfig cfg;
  cfg.dataset.hashtag_list = {"#a", "#b"};
  cfg.dataset.min_proper_words = 0;
  cfg.bloom_enabled = true;
  cfg.engine.workers = 1;
  const std::vector<Tweet> train = {
      make_tweet("t1", label_from_name("#a"), "aa bb", cfg.dataset),
      make_tweet("t2", label_from_name("#b"), "bb cc", cfg.dataset),
  };

  // Plain serialization, per vector: id (4+2) + label (1+1+4+2) + entry
  // count (4) + per entry (4 + keylen + 8). Keys per tweet: one 7-byte
  // n-gram, "U:P1", and two 4-byte words -> 19 key bytes, 4 entries.
  const uint64_t per_vector_plain = 6 + 8 + 4 + 4 * 12 + 19;
  const uint64_t expected_plain = 2 * per_vector_plain;

  // Encoded: the word and n-gram keys are replaced by their index form;
  // "U:P1" stays literal.
  auto encoded_len = [&](const std::string& canonical) {
    return encode_key(canonical, cfg.bloom).wire().size();
  };
  const uint64_t t1_keys = encoded_len("W:aa") + encoded_len("W:bb") +
                           encoded_len("N:aa bb") + 4;
  const uint64_t t2_keys = encoded_len("W:bb") + encoded_len("W:cc") +
                           encoded_len("N:bb cc") + 4;
  const uint64_t expected_bloom =
      (6 + 8 + 4 + 4 * 12 + t1_keys) + (6 + 8 + 4 + 4 * 12 + t2_keys);

  const CompressionReport report = measure_compression(train, {}, cfg);
  check.expect(report.bytes_plain == expected_plain,
               "plain bytes " + std::to_string(report.bytes_plain) + " want " +
                   std::to_string(expected_plain));
  check.expect(report.bytes_bloom == expected_bloom,
               "encoded bytes " + std::to_string(report.bytes_bloom) +
                   " want " + std::to_string(expected_bloom));
  const std::string rendered = compression_report_tsv(report);
  check.expect(rendered.find("15-20%") != std::string::npos,
               "reference band missing from the report");
  check.detail << "plain " << report.bytes_plain << "B, encoded "
               << report.bytes_bloom << "B, ratio " << report.ratio
               << " (reference band 15-20% on comparable corpora)";
  return check.ok;
}

// ---------------------------------------------------------------------------
// 8. Scalability: wall time roughly linear in the dataset fraction.
// ---------------------------------------------------------------------------
bool criterion_scalability(Check& check) {
  testsupport::SynthSpec spec;
  spec.train_tweets = 45000;
  spec.test_tweets = 5000;
  spec.num_classes = 8;
  spec.seed = 50505;
  const auto corpus = testsupport::make_corpus(spec);
  PipelineConfig cfg = config_for(corpus);
  cfg.engine.workers = 2;

  const std::vector<double> fractions = {0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<int> workers = {1};
  const auto started = std::chrono::steady_clock::now();
  {
    // Warm allocator and page cache so the first measured cell is not biased.
    const std::vector<double> warm = {0.1};
    measure_scaling(corpus.train, corpus.test, cfg, warm, workers, 2024);
  }
  const auto cells = measure_scaling(corpus.train, corpus.test, cfg, fractions,
                                     workers, 2024);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  // Least-squares line through (fraction, seconds); R^2 against it.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(cells.size());
  for (const auto& c : cells) {
    sx += c.fraction;
    sy += c.seconds;
    sxx += c.fraction * c.fraction;
    sxy += c.fraction * c.seconds;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& c : cells) {
    const double fit = intercept + slope * c.fraction;
    ss_res += (c.seconds - fit) * (c.seconds - fit);
    ss_tot += (c.seconds - sy / n) * (c.seconds - sy / n);
  }
  const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;

  check.detail << "seconds:";
  for (const auto& c : cells) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), " F=%.1f %.2fs", c.fraction, c.seconds);
    check.detail << buf;
  }
  check.detail << ", R2 " << r2 << ", total " << total << "s";
  check.expect(r2 >= 0.9, "R2 below 0.9");
  check.expect(total < 600.0, "exceeded the 10 minute budget");
  check.expect(slope > 0, "wall time not increasing with data size");
  return check.ok;
}

// ---------------------------------------------------------------------------
// 9. No-match accounting: oracle equality (from criterion 1) and the
//    Bloom-collision direction on a constructed corpus.
// ---------------------------------------------------------------------------
bool criterion_no_match(const Context& ctx, Check& check) {
  check.expect(ctx.corpora_checked > 0, "criterion 1 did not run");
  check.expect(ctx.no_match_matches_oracle,
               "no_match_fraction deviated from the oracle in criterion 1");

  // Find two distinct words with identical encodings under the default
  // geometry, then build a corpus where the merged corpus count pushes the
  // shared feature below the threshold.
  PipelineConfig cfg;
  cfg.dataset.hashtag_list = {"#x", "#y"};
  cfg.dataset.min_proper_words = 0;
  cfg.engine.workers = 2;

  std::map<std::string, std::string> first_with_key;
  std::string word_a, word_b;
  for (int i = 0; i < 2000000 && word_a.empty(); ++i) {
    const std::string w = "col" + std::to_string(i);
    const std::string key = encode_key("W:" + w, cfg.bloom).wire();
    auto [it, inserted] = first_with_key.emplace(key, w);
    if (!inserted) {
      word_a = it->second;
      word_b = w;
    }
  }
  check.expect(!word_a.empty(), "no colliding word pair found");
  if (word_a.empty()) return false;

  std::vector<Tweet> train, test;
  train.push_back(make_tweet("ta", label_from_name("#x"),
                             word_a + " va1 va2", cfg.dataset));
  for (int i = 0; i < 220; ++i) {
    train.push_back(make_tweet("tb" + std::to_string(i),
                               label_from_name("#y"),
                               word_b + " f" + std::to_string(i) + "a f" +
                                   std::to_string(i) + "b",
                               cfg.dataset));
  }
  test.push_back(
      make_tweet("u0", std::nullopt, word_a + " uu1 uu2", cfg.dataset));

  PipelineConfig plain = cfg;
  plain.bloom_enabled = false;
  PipelineConfig bloomed = cfg;
  bloomed.bloom_enabled = true;

  const ClassifyResult without =
      classify_corpus(train, test, plain);
  const ClassifyResult with = classify_corpus(train, test, bloomed);
  check.expect(without.stats.no_match == 0,
               "plain run unexpectedly lost the match");
  check.expect(with.stats.no_match >= 1,
               "bloom run still found matching vectors");
  check.expect(with.stats.no_match >= without.stats.no_match,
               "bloom did not increase the no-match count");
  check.detail << "collision pair (" << word_a << ", " << word_b
               << "): no_match plain " << without.stats.no_match << ", bloom "
               << with.stats.no_match;
  return check.ok;
}

}  // namespace

int main() {
  Context ctx;
  struct Criterion {
    int id;
    const char* title;
    std::function<bool(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence (classify_corpus == brute force)",
       [&](Check& c) { return criterion_oracle_equivalence(ctx, c); }},
      {2, "worker and reducer invariance (byte-identical outputs)",
       [](Check& c) { return criterion_worker_invariance(c); }},
      {3, "weight formulas vs direct recount (1e-12)",
       [](Check& c) { return criterion_weight_formulas(c); }},
      {4, "bloom filter: no false negatives, 3-sigma false-positive rate",
       [](Check& c) { return criterion_bloom(c); }},
      {5, "frequency class rule table",
       [](Check& c) { return criterion_word_class_table(c); }},
      {6, "random verdict baselines (1/13 and 1/4)",
       [](Check& c) { return criterion_random_baseline(c); }},
      {7, "compression report byte totals",
       [](Check& c) { return criterion_compression_fixture(c); }},
      {8, "scalability: linear wall time in dataset fraction",
       [](Check& c) { return criterion_scalability(c); }},
      {9, "no-match accounting and bloom collision direction",
       [&](Check& c) { return criterion_no_match(ctx, c); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto started = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criterion.run(check);
    } catch (const std::exception& e) {
      check.detail << "exception: " << e.what();
      ok = false;
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - started)
                               .count();
    std::printf("criterion %d [%s] %s (%.1fs) %s\n", criterion.id,
                ok ? "PASS" : "FAIL", criterion.title, seconds,
                check.detail.str().c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0)
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
