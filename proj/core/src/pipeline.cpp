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

#include "tagsent/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "tagsent/errors.hpp"
#include "tagsent/wire.hpp"

namespace tagsent {

using mr::JobSpec;
using mr::KVRecord;
using namespace records;

namespace {

bool record_less(const KVRecord& a, const KVRecord& b) {
  if (a.key != b.key) return a.key < b.key;
  return a.value < b.value;
}

void persist_stage(const PipelineConfig& cfg, int index, const char* name,
                   std::span<const KVRecord> records) {
  if (!cfg.engine.keep_dir) return;
  std::error_code ec;
  std::filesystem::create_directories(*cfg.engine.keep_dir, ec);
  const std::string stem = std::to_string(index) + "_" + name;
  mr::write_records(*cfg.engine.keep_dir / (stem + ".bin"), records);
  std::ofstream tsv(*cfg.engine.keep_dir / (stem + ".tsv"));
  tsv << mr::render_records_tsv(records);
}

struct VoteTally {
  SentimentLabel label;
  size_t count = 0;
  double dist_sum = 0;
};

}  // namespace

PreparedCorpus prepare_corpus(std::span<const Tweet> training,
                              std::span<const Tweet> test,
                              const PipelineConfig& cfg) {
  PreparedCorpus out;
  const auto dictionary = cfg.dataset.dictionary_path
                              ? load_dictionary(*cfg.dataset.dictionary_path)
                              : std::unordered_set<std::string>{};
  out.stats.train_total = training.size();
  out.stats.test_total = test.size();
  for (const Tweet& t : training) {
    if (!t.label)
      throw DataError("training tweet \"" + t.id + "\" has no label");
    if (admit(t, cfg.dataset, dictionary)) out.train.push_back(t);
  }
  for (const Tweet& t : test) {
    if (admit(t, cfg.dataset, dictionary)) out.test.push_back(t);
  }
  out.stats.train_admitted = out.train.size();
  out.stats.test_admitted = out.test.size();
  if (out.train.empty())
    throw DataError("no admissible training tweets");
  out.vocab = std::make_shared<const VocabStats>(build_vocab_stats(
      out.train, cfg.f_h, cfg.f_c, cfg.swap_overlap_bands));
  return out;
}

std::vector<KVRecord> tweets_to_records(std::span<const Tweet> tweets) {
  std::vector<KVRecord> records;
  records.reserve(tweets.size());
  for (const Tweet& t : tweets) records.push_back({t.id, encode_tweet(t)});
  return records;
}

JobSpec make_feature_extraction_job(std::shared_ptr<const VocabStats> vocab,
                                    const PipelineConfig& cfg) {
  JobSpec job;
  job.name = "feature_extraction";
  job.num_reducers = cfg.num_reducers;

  const bool bloom_on = cfg.bloom_enabled;
  const BloomParams bloom = cfg.bloom;
  const double alpha = cfg.alpha;
  job.map_fn = [vocab, bloom_on, bloom, alpha](const KVRecord& rec) {
    const Tweet tweet = decode_tweet(rec.key, rec.value);
    std::vector<KVRecord> out;
    for (RawFeature& f : extract_all_features(tweet, *vocab, alpha)) {
      FeatureEmission e;
      e.family = f.family;
      e.tweet_id = tweet.id;
      e.count = f.count_in_tweet;
      e.denom = f.corpus_count_term;
      e.label = tweet.label;
      std::string key = (bloom_on && f.family != FeatureFamily::Punct)
                            ? encode_key(f.key, bloom).wire()
                            : std::move(f.key);
      out.push_back({std::move(key), encode_feature_emission(e)});
    }
    return out;
  };

  const double threshold = cfg.weight_threshold;
  job.reduce_fn = [threshold](const std::string& key,
                              std::span<const std::string> values) {
    std::vector<KVRecord> out;
    if (!is_matchable_key(key)) {
      // Raw punctuation statistic: normalization happens after the job, once
      // the family maxima exist. Pass values through with their maximum.
      std::vector<RawPunctPosting> raw;
      raw.reserve(values.size());
      double max_raw = 0;
      for (const std::string& v : values) {
        const FeatureEmission e = decode_feature_emission(v);
        raw.push_back({e.tweet_id, e.count, e.label});
        max_raw = std::max(max_raw, e.count);
      }
      std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
        return a.tweet_id < b.tweet_id;
      });
      out.push_back({key, encode_raw_punct(max_raw, raw)});
      return out;
    }

    // Merge per tweet (several raw features of one tweet can collide into
    // one encoded key), then weight against the corpus count.
    struct Acc {
      double count = 0;
      double denom = 0;
      FeatureFamily family = FeatureFamily::Punct;
      std::optional<SentimentLabel> label;
      bool seen = false;
    };
    std::map<std::string, Acc> by_tweet;
    double corpus_count = 0;
    for (const std::string& v : values) {
      const FeatureEmission e = decode_feature_emission(v);
      Acc& acc = by_tweet[e.tweet_id];
      acc.count += e.count;
      acc.denom += e.denom;
      if (!acc.seen || static_cast<uint8_t>(e.family) <
                           static_cast<uint8_t>(acc.family))
        acc.family = e.family;
      acc.label = e.label;
      acc.seen = true;
      corpus_count += e.denom;
    }
    if (corpus_count <= 0) return out;
    std::vector<IndexPosting> postings;
    for (const auto& [tweet_id, acc] : by_tweet) {
      const double w = acc.count / corpus_count;
      if (w < threshold || w <= 0) continue;
      postings.push_back({tweet_id, acc.family, w, acc.label});
    }
    if (!postings.empty()) out.push_back({key, encode_postings(postings)});
    return out;
  };
  return job;
}

std::vector<KVRecord> normalize_punct_postings(std::vector<KVRecord> index,
                                               double threshold) {
  FamilyMaxima maxima;
  for (const KVRecord& rec : index) {
    if (!is_matchable_key(rec.key)) continue;
    const IndexValue v = decode_index_value(rec.value);
    for (const IndexPosting& p : v.postings) {
      switch (p.family) {
        case FeatureFamily::Word: maxima.word = std::max(maxima.word, p.weight); break;
        case FeatureFamily::NGram: maxima.ngram = std::max(maxima.ngram, p.weight); break;
        case FeatureFamily::Pattern: maxima.pattern = std::max(maxima.pattern, p.weight); break;
        case FeatureFamily::Punct: break;
      }
    }
  }

  std::vector<KVRecord> out;
  out.reserve(index.size());
  for (KVRecord& rec : index) {
    if (is_matchable_key(rec.key)) {
      out.push_back(std::move(rec));
      continue;
    }
    const IndexValue v = decode_index_value(rec.value);
    if (!v.is_raw_punct)
      throw InternalError("punct record already normalized: " + rec.key);
    std::vector<IndexPosting> postings;
    for (const RawPunctPosting& p : v.raw) {
      const double w = punct_weight(p.raw, v.max_raw, maxima);
      if (w < threshold || w <= 0) continue;
      postings.push_back({p.tweet_id, FeatureFamily::Punct, w, p.label});
    }
    if (!postings.empty())
      out.push_back({rec.key, encode_postings(postings)});
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

JobSpec make_vector_construction_job(const PipelineConfig& cfg) {
  JobSpec job;
  job.name = "vector_construction";
  job.num_reducers = cfg.num_reducers;

  job.map_fn = [](const KVRecord& rec) {
    const IndexValue v = decode_index_value(rec.value);
    if (v.is_raw_punct)
      throw InternalError("unnormalized punctuation record reached job 2");
    std::vector<KVRecord> out;
    out.reserve(v.postings.size());
    for (const IndexPosting& p : v.postings)
      out.push_back({p.tweet_id,
                     encode_dimension({rec.key, p.weight}, p.label)});
    if (is_matchable_key(rec.key)) {
      std::vector<MatchRef> refs;
      for (const IndexPosting& p : v.postings)
        if (p.label) refs.push_back({p.tweet_id, *p.label});
      if (!refs.empty()) {
        const std::string ref_value = encode_match_refs(refs);
        for (const IndexPosting& p : v.postings)
          if (!p.label) out.push_back({p.tweet_id, ref_value});
      }
    }
    return out;
  };

  job.reduce_fn = [](const std::string& tweet_id,
                     std::span<const std::string> values) {
    VectorRecord vec;
    std::map<std::string, double> entries;
    std::map<std::string, SentimentLabel> candidates;
    bool saw_dimension = false;
    for (const std::string& v : values) {
      wire::Reader r(v);
      const uint8_t tag = r.u8();
      if (tag == 0) {
        std::string fkey(r.str());
        const double w = r.f64();
        const uint8_t has_label = r.u8();
        if (has_label) {
          SentimentLabel label;
          label.kind = static_cast<LabelKind>(r.u8());
          label.name = std::string(r.str());
          vec.label = std::move(label);
        }
        entries[std::move(fkey)] = w;
        saw_dimension = true;
      } else if (tag == 1) {
        const uint32_t n = r.u32();
        for (uint32_t i = 0; i < n; ++i) {
          std::string id(r.str());
          SentimentLabel label;
          label.kind = static_cast<LabelKind>(r.u8());
          label.name = std::string(r.str());
          candidates.emplace(std::move(id), std::move(label));
        }
      } else {
        throw InternalError("vector construction: unknown value tag");
      }
    }
    if (!saw_dimension)
      throw InternalError("tweet '" + tweet_id + "' received match refs only");
    vec.is_test = !vec.label.has_value();
    vec.entries.reserve(entries.size());
    for (auto& [k, w] : entries) vec.entries.push_back({k, w});
    if (vec.is_test) {
      vec.match_list.reserve(candidates.size());
      for (auto& [id, label] : candidates)
        vec.match_list.push_back({id, std::move(label)});
    }
    return std::vector<KVRecord>{{tweet_id, encode_vector(vec)}};
  };
  return job;
}

JobSpec make_distance_job(const PipelineConfig& cfg) {
  JobSpec job;
  job.name = "distance_computation";
  job.num_reducers = cfg.num_reducers;

  job.map_fn = [](const KVRecord& rec) {
    const VectorRecord v = decode_vector(rec.value);
    std::vector<KVRecord> out;
    if (v.is_test) {
      if (v.match_list.empty()) return out;  // labeled "neu" after the chain
      const std::string probe = encode_probe_side(rec.key, v.entries);
      out.reserve(v.match_list.size());
      for (const MatchRef& m : v.match_list) out.push_back({m.train_id, probe});
    } else {
      out.push_back({rec.key, encode_train_side(*v.label, v.entries)});
    }
    return out;
  };

  job.reduce_fn = [](const std::string& train_id,
                     std::span<const std::string> values) {
    std::optional<SentimentLabel> train_label;
    std::vector<VectorEntry> train_entries;
    struct Probe {
      std::string test_id;
      std::vector<VectorEntry> entries;
    };
    std::vector<Probe> probes;
    for (const std::string& v : values) {
      wire::Reader r(v);
      const uint8_t tag = r.u8();
      if (tag == 0) {
        if (train_label)
          throw InternalError("duplicate training vector for id '" +
                              train_id + "'");
        SentimentLabel label;
        label.kind = static_cast<LabelKind>(r.u8());
        label.name = std::string(r.str());
        train_label = std::move(label);
        const uint32_t n = r.u32();
        train_entries.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
          VectorEntry e;
          e.key = std::string(r.str());
          e.weight = r.f64();
          train_entries.push_back(std::move(e));
        }
      } else if (tag == 1) {
        Probe p;
        p.test_id = std::string(r.str());
        const uint32_t n = r.u32();
        p.entries.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
          VectorEntry e;
          e.key = std::string(r.str());
          e.weight = r.f64();
          p.entries.push_back(std::move(e));
        }
        probes.push_back(std::move(p));
      } else {
        throw InternalError("distance computation: unknown value tag");
      }
    }
    if (!train_label) {
      throw InternalError("match list references training id '" + train_id +
                          "' with no vector");
    }
    std::vector<KVRecord> out;
    out.reserve(probes.size());
    for (const Probe& p : probes) {
      NeighborRecord n;
      n.train_id = train_id;
      n.label = *train_label;
      n.distance = euclidean_distance(p.entries, train_entries);
      out.push_back({p.test_id, encode_neighbor(n)});
    }
    return out;
  };
  return job;
}

JobSpec make_classification_job(int k, const PipelineConfig& cfg) {
  if (k < 1) throw DataError("k must be >= 1");
  JobSpec job;
  job.name = "sentiment_classification";
  job.num_reducers = cfg.num_reducers;

  job.map_fn = [](const KVRecord& rec) { return std::vector<KVRecord>{rec}; };

  job.reduce_fn = [k](const std::string& test_id,
                      std::span<const std::string> values) {
    std::vector<NeighborRecord> neighbors;
    neighbors.reserve(values.size());
    for (const std::string& v : values) neighbors.push_back(decode_neighbor(v));
    std::sort(neighbors.begin(), neighbors.end(),
              [](const NeighborRecord& a, const NeighborRecord& b) {
                if (a.distance != b.distance) return a.distance < b.distance;
                return a.train_id < b.train_id;
              });
    if (neighbors.size() > static_cast<size_t>(k)) neighbors.resize(k);

    std::map<std::string, VoteTally> tallies;
    for (const NeighborRecord& n : neighbors) {
      VoteTally& t = tallies[n.label.name];
      t.label = n.label;
      t.count += 1;
      t.dist_sum += n.distance;
    }
    const VoteTally* best = nullptr;
    for (const auto& [name, t] : tallies) {
      if (!best || t.count > best->count ||
          (t.count == best->count && t.dist_sum < best->dist_sum)) {
        best = &t;
      }
      // Equal count and equal sum: the map iterates names ascending, so the
      // first seen wins the lexicographic tie.
    }
    return std::vector<KVRecord>{{test_id, encode_label_value(best->label)}};
  };
  return job;
}

std::vector<KVRecord> build_inverted_index(const PreparedCorpus& corpus,
                                           const PipelineConfig& cfg) {
  std::vector<KVRecord> input = tweets_to_records(corpus.train);
  std::vector<KVRecord> test_records = tweets_to_records(corpus.test);
  input.insert(input.end(), std::make_move_iterator(test_records.begin()),
               std::make_move_iterator(test_records.end()));
  std::vector<KVRecord> index = mr::run_job(
      make_feature_extraction_job(corpus.vocab, cfg), std::move(input),
      cfg.engine);
  return normalize_punct_postings(std::move(index), cfg.weight_threshold);
}

std::vector<KVRecord> build_vectors(const PreparedCorpus& corpus,
                                    const PipelineConfig& cfg) {
  return mr::run_job(make_vector_construction_job(cfg),
                     build_inverted_index(corpus, cfg), cfg.engine);
}

namespace {

ClassifyResult assemble_verdicts(const PreparedCorpus& corpus,
                                 std::span<const KVRecord> job4_output) {
  ClassifyResult result;
  result.stats = corpus.stats;

  std::set<std::string> pending;
  for (const Tweet& t : corpus.test) pending.insert(t.id);

  for (const KVRecord& rec : job4_output) {
    if (!pending.erase(rec.key))
      throw InternalError("verdict for unknown test id '" + rec.key + "'");
    result.verdicts.push_back({rec.key, decode_label_value(rec.value)});
  }
  result.stats.no_match = pending.size();
  for (const std::string& id : pending)
    result.verdicts.push_back({id, neutral_label()});
  std::sort(result.verdicts.begin(), result.verdicts.end(),
            [](const Verdict& a, const Verdict& b) {
              return a.test_id < b.test_id;
            });
  result.stats.no_match_fraction =
      corpus.test.empty()
          ? 0.0
          : static_cast<double>(result.stats.no_match) / corpus.test.size();
  return result;
}

}  // namespace

ClassifyResult classify_corpus(std::span<const Tweet> training,
                               std::span<const Tweet> test,
                               const PipelineConfig& cfg) {
  const PreparedCorpus corpus = prepare_corpus(training, test, cfg);

  std::vector<KVRecord> index = build_inverted_index(corpus, cfg);
  persist_stage(cfg, 1, "feature_extraction", index);

  std::vector<KVRecord> vectors = mr::run_job(
      make_vector_construction_job(cfg), std::move(index), cfg.engine);
  persist_stage(cfg, 2, "vector_construction", vectors);

  std::vector<KVRecord> distances = mr::run_job(
      make_distance_job(cfg), std::move(vectors), cfg.engine);
  persist_stage(cfg, 3, "distance_computation", distances);

  std::vector<KVRecord> labeled = mr::run_job(
      make_classification_job(cfg.k, cfg), std::move(distances), cfg.engine);
  persist_stage(cfg, 4, "sentiment_classification", labeled);

  return assemble_verdicts(corpus, labeled);
}

std::map<int, ClassifyResult> classify_corpus_sweep(
    std::span<const Tweet> training, std::span<const Tweet> test,
    const PipelineConfig& cfg, std::span<const int> ks) {
  const PreparedCorpus corpus = prepare_corpus(training, test, cfg);
  std::vector<KVRecord> vectors =
      mr::run_job(make_vector_construction_job(cfg),
                  build_inverted_index(corpus, cfg), cfg.engine);
  const std::vector<KVRecord> distances = mr::run_job(
      make_distance_job(cfg), std::move(vectors), cfg.engine);

  std::map<int, ClassifyResult> results;
  for (int k : ks) {
    std::vector<KVRecord> labeled = mr::run_job(
        make_classification_job(k, cfg), distances, cfg.engine);
    results.emplace(k, assemble_verdicts(corpus, labeled));
  }
  return results;
}

std::string verdicts_tsv(std::span<const Verdict> verdicts) {
  std::string out;
  for (const Verdict& v : verdicts) {
    out += v.test_id;
    out.push_back('\t');
    out += v.label.name;
    out.push_back('\n');
  }
  return out;
}

}  // namespace tagsent
