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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "tagsent/errors.hpp"
#include "tagsent/eval.hpp"
#include "tagsent/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tagsent;

namespace {

// ---- key=value config file (flags override file values) ----

std::string trim(std::string s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("config file: expected key=value, got \"" + t + "\"");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text);

template <>
std::string parse_value<std::string>(const std::string&, const std::string& text) {
  return text;
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw DataError("config key " + key + ": expected a boolean, got \"" + text + "\"");
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  std::istringstream stream(text);
  stream >> value;
  if (stream.fail() || !stream.eof())
    throw DataError("config key " + key + ": cannot parse \"" + text + "\"");
  return value;
}

std::string render_value(const std::string& v) { return v; }
std::string render_value(bool v) { return v ? "true" : "false"; }
std::string render_value(int v) { return std::to_string(v); }
std::string render_value(uint64_t v) { return std::to_string(v); }
std::string render_value(size_t v) { return std::to_string(v); }
std::string render_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Ties a CLI option, a config-file key (the flag name without dashes), and
// the echoed run.toml line together.
class Bindings {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& target,
                   const std::string& help) {
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app->add_flag(flag, target, help);
    } else {
      opt = app->add_option(flag, target, help);
    }
    const std::string key = flag.substr(2);
    entries_.push_back(
        {opt, key,
         [&target, key](const std::string& text) {
           target = parse_value<T>(key, text);
         },
         [&target]() { return render_value(target); }});
    return opt;
  }

  // File values fill in options the command line did not set. A key counts
  // as set if any subcommand's spelling of it was passed.
  void overlay(const std::map<std::string, std::string>& file) const {
    std::set<std::string> cli_set;
    for (const auto& e : entries_)
      if (e.opt->count() > 0) cli_set.insert(e.key);
    std::set<std::string> applied;
    for (const auto& e : entries_) {
      if (cli_set.contains(e.key) || applied.contains(e.key)) continue;
      auto it = file.find(e.key);
      if (it != file.end()) {
        e.from_text(it->second);
        applied.insert(e.key);
      }
    }
  }

  std::string render_toml() const {
    std::map<std::string, std::string> sorted;
    for (const auto& e : entries_) sorted[e.key] = e.to_text();
    std::string out;
    for (const auto& [k, v] : sorted) out += k + " = " + v + "\n";
    return out;
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::string key;
    std::function<void(const std::string&)> from_text;
    std::function<std::string()> to_text;
  };
  std::vector<Entry> entries_;
};

// ---- options shared by the classifying subcommands ----

struct PipelineOpts {
  std::string hashtags_file;
  std::string emoticons_file;
  std::string dictionary_file;
  int min_words = 5;
  double f_h = 100.0;
  double f_c = 1000.0;
  bool swap_overlap_bands = false;
  double alpha = 0.1;
  double threshold = 0.005;
  int k = 50;
  bool bloom = false;
  uint64_t bloom_bits = 999;
  uint64_t bloom_hashes = 3;
  uint64_t bloom_seed1 = kBloomSeed1Default;
  uint64_t bloom_seed2 = kBloomSeed2Default;
  int workers = mr::EngineOptions::default_workers();
  int reducers = 12;
  uint64_t spill_budget = 256ull << 20;
  std::string keep_intermediates;
};

void add_pipeline_opts(CLI::App* cmd, Bindings& bind, PipelineOpts& o) {
  bind.add(cmd, "--hashtags", o.hashtags_file,
           "File with one hashtag label per line");
  bind.add(cmd, "--emoticons", o.emoticons_file,
           "File with one emoticon label per line");
  bind.add(cmd, "--dictionary", o.dictionary_file,
           "Word list for the proper-word admission rule");
  bind.add(cmd, "--min-words", o.min_words,
           "Minimum dictionary words per admitted tweet");
  bind.add(cmd, "--fh", o.f_h, "High-frequency lower bound, per million");
  bind.add(cmd, "--fc", o.f_c, "Content-word upper bound, per million");
  bind.add(cmd, "--swap-overlap-bands", o.swap_overlap_bands,
           "Swap the HFW/CW assignment of the overlap bands");
  bind.add(cmd, "--alpha", o.alpha, "Approximate pattern match weight");
  bind.add(cmd, "--threshold", o.threshold, "Feature inclusion weight threshold");
  bind.add(cmd, "--k", o.k, "Neighbors for the kNN vote");
  bind.add(cmd, "--bloom", o.bloom, "Bloom-encode feature keys");
  bind.add(cmd, "--bloom-bits", o.bloom_bits, "Bloom filter bit count");
  bind.add(cmd, "--bloom-hashes", o.bloom_hashes, "Bloom filter hash count");
  bind.add(cmd, "--bloom-seed1", o.bloom_seed1, "First Bloom hash seed");
  bind.add(cmd, "--bloom-seed2", o.bloom_seed2, "Second Bloom hash seed");
  bind.add(cmd, "--workers", o.workers, "Concurrent map/reduce workers");
  bind.add(cmd, "--reducers", o.reducers, "Reduce partitions per job");
  bind.add(cmd, "--spill-budget", o.spill_budget,
           "Grouping memory budget in bytes before spilling");
  bind.add(cmd, "--keep-intermediates", o.keep_intermediates,
           "Directory for per-job intermediate dumps");
}

DatasetConfig dataset_config(const PipelineOpts& o) {
  DatasetConfig cfg;
  auto load_lines = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty()) lines.push_back(t);
    }
    return lines;
  };
  if (!o.hashtags_file.empty()) cfg.hashtag_list = load_lines(o.hashtags_file);
  if (!o.emoticons_file.empty())
    cfg.emoticon_list = load_lines(o.emoticons_file);
  cfg.min_proper_words = o.min_words;
  if (!o.dictionary_file.empty()) cfg.dictionary_path = o.dictionary_file;
  return cfg;
}

PipelineConfig pipeline_config(const PipelineOpts& o) {
  PipelineConfig cfg;
  cfg.dataset = dataset_config(o);
  cfg.f_h = o.f_h;
  cfg.f_c = o.f_c;
  cfg.swap_overlap_bands = o.swap_overlap_bands;
  cfg.alpha = o.alpha;
  cfg.weight_threshold = o.threshold;
  cfg.k = o.k;
  cfg.bloom_enabled = o.bloom;
  cfg.bloom.bits = static_cast<uint32_t>(o.bloom_bits);
  cfg.bloom.hashes = static_cast<uint32_t>(o.bloom_hashes);
  cfg.bloom.seed1 = o.bloom_seed1;
  cfg.bloom.seed2 = o.bloom_seed2;
  cfg.num_reducers = o.reducers;
  cfg.engine.workers = o.workers;
  cfg.engine.spill_budget_bytes = o.spill_budget;
  if (!o.keep_intermediates.empty())
    cfg.engine.keep_dir = fs::path(o.keep_intermediates);
  return cfg;
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw DataError("--out directory is required");
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + out);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_run_config(const fs::path& dir, const std::string& subcommand,
                      const Bindings& bind) {
  write_file(dir / "run.toml",
             "# effective configuration\nsubcommand = " + subcommand + "\n" +
                 bind.render_toml());
}

std::string rejects_tsv(const std::vector<RejectedLine>& rejects) {
  std::string out = "# line_number\treason\n";
  for (const auto& r : rejects)
    out += std::to_string(r.line_number) + "\t" + r.reason + "\n";
  return out;
}

// ---- subcommand bodies ----

int run_ingest(const PipelineOpts& opts, const std::string& input,
               bool unlabeled, const fs::path& out_dir) {
  const DatasetConfig cfg = dataset_config(opts);
  const auto dictionary = cfg.dictionary_path
                              ? load_dictionary(*cfg.dictionary_path)
                              : std::unordered_set<std::string>{};
  ParseResult parsed = parse_dataset(input, cfg, !unlabeled);

  std::string admitted;
  std::vector<RejectedLine> rejects = std::move(parsed.rejects);
  size_t kept = 0;
  for (size_t i = 0; i < parsed.tweets.size(); ++i) {
    const Tweet& t = parsed.tweets[i];
    if (auto reason = admission_failure(t, cfg, dictionary)) {
      rejects.push_back({parsed.line_numbers[i], *reason});
      continue;
    }
    ++kept;
    admitted += t.id;
    admitted.push_back('\t');
    admitted += t.label ? t.label->name : "-";
    admitted.push_back('\t');
    admitted += t.raw_text;
    admitted.push_back('\n');
  }
  std::sort(rejects.begin(), rejects.end(),
            [](const RejectedLine& a, const RejectedLine& b) {
              return a.line_number < b.line_number;
            });
  write_file(out_dir / "admitted.tsv", admitted);
  write_file(out_dir / "rejects.tsv", rejects_tsv(rejects));
  std::cout << "ingested " << input << ": " << kept << " admitted, "
            << rejects.size() << " rejected\n";
  return 0;
}

int run_classify(const PipelineOpts& opts, const std::string& train_path,
                 const std::string& test_path, const fs::path& out_dir) {
  const PipelineConfig cfg = pipeline_config(opts);
  const ParseResult train = parse_dataset(train_path, cfg.dataset, true);
  const ParseResult test = parse_dataset(test_path, cfg.dataset, false);

  std::vector<RejectedLine> rejects = train.rejects;
  rejects.insert(rejects.end(), test.rejects.begin(), test.rejects.end());
  write_file(out_dir / "rejects.tsv", rejects_tsv(rejects));

  const ClassifyResult result =
      classify_corpus(train.tweets, test.tweets, cfg);
  write_file(out_dir / "verdicts.tsv", verdicts_tsv(result.verdicts));

  std::cout << "train: " << result.stats.train_admitted << "/"
            << result.stats.train_total << " admitted\n"
            << "test: " << result.stats.test_admitted << "/"
            << result.stats.test_total << " admitted\n"
            << "no_match_fraction: " << result.stats.no_match_fraction << "\n"
            << "verdicts: " << (out_dir / "verdicts.tsv").string() << "\n";
  return 0;
}

int run_eval(const PipelineOpts& opts, const std::string& input_path,
             const std::string& neutral_path, const std::string& setting,
             int folds, uint64_t seed, const fs::path& out_dir) {
  const PipelineConfig cfg = pipeline_config(opts);
  ParseResult labeled = parse_dataset(input_path, cfg.dataset, true);
  if (!neutral_path.empty()) {
    ParseResult neutral = parse_dataset(neutral_path, cfg.dataset, false);
    for (Tweet& t : neutral.tweets) {
      t.label = neutral_label();
      labeled.tweets.push_back(std::move(t));
    }
  }
  EvalSetting eval_setting;
  if (setting == "multi" || setting == "multi-class") {
    eval_setting = EvalSetting::MultiClass;
  } else if (setting == "binary") {
    eval_setting = EvalSetting::Binary;
  } else {
    throw CLI::ValidationError("--setting must be 'multi' or 'binary'");
  }

  // Only admitted tweets enter the folds.
  const auto dictionary = cfg.dataset.dictionary_path
                              ? load_dictionary(*cfg.dataset.dictionary_path)
                              : std::unordered_set<std::string>{};
  std::vector<Tweet> admitted;
  for (Tweet& t : labeled.tweets)
    if (admit(t, cfg.dataset, dictionary)) admitted.push_back(std::move(t));

  const FoldPlan plan = make_folds(admitted, folds, seed);
  const EvalReport report = cross_validate(admitted, plan, cfg, eval_setting);
  write_file(out_dir / "report.tsv", eval_report_tsv(report));
  std::cout << eval_report_tsv(report);
  return 0;
}

int run_compress_report(const PipelineOpts& opts, const std::string& train_path,
                        const std::string& test_path, const fs::path& out_dir) {
  const PipelineConfig cfg = pipeline_config(opts);
  const ParseResult train = parse_dataset(train_path, cfg.dataset, true);
  std::vector<Tweet> test;
  if (!test_path.empty())
    test = parse_dataset(test_path, cfg.dataset, false).tweets;
  const CompressionReport report =
      measure_compression(train.tweets, test, cfg);
  write_file(out_dir / "compression.tsv", compression_report_tsv(report));
  std::cout << compression_report_tsv(report);
  return 0;
}

int run_scale_report(const PipelineOpts& opts, const std::string& train_path,
                     const std::string& test_path,
                     const std::string& fractions_text,
                     const std::string& workers_text, uint64_t seed,
                     const fs::path& out_dir) {
  const PipelineConfig cfg = pipeline_config(opts);
  const ParseResult train = parse_dataset(train_path, cfg.dataset, true);
  const ParseResult test = parse_dataset(test_path, cfg.dataset, false);

  auto split_list = [](const std::string& text) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ',') {
        if (i > start) parts.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    }
    return parts;
  };
  std::vector<double> fractions;
  for (const auto& p : split_list(fractions_text))
    fractions.push_back(parse_value<double>("fractions", p));
  std::vector<int> workers;
  for (const auto& p : split_list(workers_text))
    workers.push_back(parse_value<int>("workers-list", p));

  const auto cells = measure_scaling(train.tweets, test.tweets, cfg,
                                     fractions, workers, seed);
  write_file(out_dir / "scaling.tsv", scaling_report_tsv(cells));
  std::cout << scaling_report_tsv(cells);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distant-supervision tweet sentiment classification on an "
               "embedded map/shuffle/reduce engine"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "key=value file mirroring every flag (flags win)");

  Bindings bindings;
  PipelineOpts opts;

  std::string input, train_path, test_path, neutral_path, out;
  std::string setting = "multi";
  std::string fractions = "0.2,0.4,0.6,0.8,1.0";
  std::string workers_list = "1," + std::to_string(opts.workers);
  bool unlabeled = false;
  int folds = 10;
  uint64_t seed = 42;

  CLI::App* ingest =
      app.add_subcommand("ingest", "Validate and preprocess a dataset");
  bindings.add(ingest, "--input", input, "Dataset file (id, class, text)");
  bindings.add(ingest, "--unlabeled", unlabeled,
               "Treat the class column as absent");
  CLI::App* classify =
      app.add_subcommand("classify", "Label a test set from a training set");
  bindings.add(classify, "--train", train_path, "Labeled training dataset");
  bindings.add(classify, "--test", test_path, "Unlabeled test dataset");
  CLI::App* eval = app.add_subcommand(
      "eval", "Cross-validated f-scores (multi-class or binary)");
  bindings.add(eval, "--input", input, "Labeled dataset");
  bindings.add(eval, "--neutral", neutral_path,
               "No-sentiment dataset for the binary setting");
  bindings.add(eval, "--setting", setting, "multi or binary");
  bindings.add(eval, "--folds", folds, "Cross-validation folds");
  bindings.add(eval, "--seed", seed, "Fold and sampling seed");
  CLI::App* compress = app.add_subcommand(
      "compress-report", "Feature-vector bytes, plain vs Bloom-encoded");
  bindings.add(compress, "--train", train_path, "Labeled training dataset");
  bindings.add(compress, "--test", test_path,
               "Optional unlabeled test dataset");
  CLI::App* scale = app.add_subcommand(
      "scale-report", "Wall time across dataset fractions and workers");
  bindings.add(scale, "--train", train_path, "Labeled training dataset");
  bindings.add(scale, "--test", test_path, "Unlabeled test dataset");
  bindings.add(scale, "--fractions", fractions, "Comma-separated fractions");
  bindings.add(scale, "--workers-list", workers_list,
               "Comma-separated worker counts (must include 1)");
  bindings.add(scale, "--seed", seed, "Subsampling seed");

  for (CLI::App* cmd : {ingest, classify, eval, compress, scale}) {
    add_pipeline_opts(cmd, bindings, opts);
    CLI::Option* out_opt = cmd->add_option("--out", out, "Output directory");
    out_opt->required();
  }

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) bindings.overlay(load_config_file(config_path));

    const fs::path out_dir = prepare_out_dir(out);
    CLI::App* active = app.get_subcommands().front();
    write_run_config(out_dir, active->get_name(), bindings);

    if (active == ingest) return run_ingest(opts, input, unlabeled, out_dir);
    if (active == classify)
      return run_classify(opts, train_path, test_path, out_dir);
    if (active == eval)
      return run_eval(opts, input, neutral_path, setting, folds, seed, out_dir);
    if (active == compress)
      return run_compress_report(opts, train_path, test_path, out_dir);
    if (active == scale)
      return run_scale_report(opts, train_path, test_path, fractions,
                              workers_list, seed, out_dir);
    throw InternalError("unreachable subcommand");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
