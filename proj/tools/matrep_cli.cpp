// matrep: train matrix embeddings and run the clustering, classification and
// sentence-similarity evaluations.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/fmt/fmt.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "matrep/corpus.hpp"
#include "matrep/eval/protocols.hpp"
#include "matrep/io/embedding_file.hpp"
#include "matrep/io/manifest.hpp"
#include "matrep/io/text_files.hpp"
#include "matrep/trainer.hpp"

namespace fs = std::filesystem;
using namespace matrep;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flat key=value lines on stdout, mirrored into an optional JSON summary.
class Report {
 public:
  void add(const std::string& key, const std::string& value) {
    std::cout << key << '=' << value << '\n';
    results_[key] = value;
  }
  void add(const std::string& key, double value) {
    std::cout << key << '=' << fmt::format("{:.6f}", value) << '\n';
    results_[key] = value;
  }
  void add(const std::string& key, std::size_t value) {
    std::cout << key << '=' << value << '\n';
    results_[key] = value;
  }

  void write(const std::string& path, const io::RunManifest& manifest) const {
    if (path.empty()) return;
    nlohmann::json j = io::to_json(manifest);
    j["results"] = results_;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write summary " + path);
    out << j.dump(2) << '\n';
  }

 private:
  nlohmann::json results_ = nlohmann::json::object();
};

struct TrainFlags {
  TrainConfig config;
  std::string aggregation = "sum";
  CLI::App* app = nullptr;

  void attach(CLI::App& sub) {
    app = &sub;
    sub.add_option("--size", config.dim, "embedding rows p")->capture_default_str();
    sub.add_option("--word-cols", config.word_cols, "word matrix columns r1")->capture_default_str();
    sub.add_option("--doc-cols", config.doc_cols, "document matrix columns r2")->capture_default_str();
    sub.add_option("--window", config.window, "maximum context window")->capture_default_str();
    sub.add_option("--negative", config.negatives, "negative samples per pair")->capture_default_str();
    sub.add_option("--iter", config.iterations, "training epochs")->capture_default_str();
    sub.add_option("--margin", config.margin, "hinge margin m")->capture_default_str();
    sub.add_option("--alpha", config.alpha, "initial learning rate")->capture_default_str();
    sub.add_option("--min-count", config.min_count, "discard rarer words")->capture_default_str();
    sub.add_option("--sample", config.sample, "subsampling threshold, 0 disables")->capture_default_str();
    sub.add_option("--threads", config.threads, "worker threads")->capture_default_str();
    sub.add_option("--seed", config.seed, "random seed")->capture_default_str();
    sub.add_option("--negative-aggregation", aggregation, "sum or mean over negatives")
        ->check(CLI::IsMember({"sum", "mean"}))
        ->capture_default_str();
  }

  TrainConfig resolve() {
    config.aggregation = aggregation == "mean" ? NegativeAggregation::kMean : NegativeAggregation::kSum;
    return config;
  }

  // Values from `base` except for flags given explicitly on the command line.
  TrainConfig overlay(TrainConfig base) {
    const TrainConfig cli = resolve();
    auto given = [&](const char* name) { return app->count(name) > 0; };
    if (given("--size")) base.dim = cli.dim;
    if (given("--word-cols")) base.word_cols = cli.word_cols;
    if (given("--doc-cols")) base.doc_cols = cli.doc_cols;
    if (given("--window")) base.window = cli.window;
    if (given("--negative")) base.negatives = cli.negatives;
    if (given("--iter")) base.iterations = cli.iterations;
    if (given("--margin")) base.margin = cli.margin;
    if (given("--alpha")) base.alpha = cli.alpha;
    if (given("--min-count")) base.min_count = cli.min_count;
    if (given("--sample")) base.sample = cli.sample;
    if (given("--threads")) base.threads = cli.threads;
    if (given("--seed")) base.seed = cli.seed;
    if (given("--negative-aggregation")) base.aggregation = cli.aggregation;
    return base;
  }
};

std::string with_cell(const std::string& path, std::size_t r1, std::size_t r2) {
  const fs::path p(path);
  return (p.parent_path() / fmt::format("{}.r{}x{}{}", p.stem().string(), r1, r2, p.extension().string())).string();
}

std::vector<TrainConfig> expand(const TrainConfig& base, bool sweep) {
  if (!sweep) return {base};
  std::vector<TrainConfig> out;
  for (auto [r1, r2] : eval::column_grid()) {
    TrainConfig c = base;
    c.word_cols = r1;
    c.doc_cols = r2;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------- train

struct TrainCommand {
  TrainFlags flags;
  std::string corpus, word_out, doc_out, manifest_out, manifest_in, summary;
  int binary = 0;
  bool sweep = false;
  CLI::Option* binary_option = nullptr;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("train", "train word and document embeddings");
    sub->add_option("--train", corpus, "corpus, one document per line")->required()->check(CLI::ExistingFile);
    sub->add_option("--word-out", word_out, "word embedding output")->required();
    sub->add_option("--doc-out", doc_out, "document embedding output")->required();
    flags.attach(*sub);
    binary_option = sub->add_option("--binary", binary, "write float32 binary files")
                        ->check(CLI::IsMember({0, 1}))
                        ->capture_default_str();
    sub->add_option("--manifest", manifest_out, "run manifest (default: <doc-out>.manifest.json)");
    sub->add_option("--manifest-in", manifest_in, "rerun the configuration recorded in a manifest")
        ->check(CLI::ExistingFile);
    sub->add_flag("--sweep", sweep, "train every 1 <= r1 <= r2 <= 4 cell; outputs get a .r<r1>x<r2> suffix");
    sub->add_option("--summary", summary, "JSON summary file");
    sub->callback([this] { run(); });
  }

  void run() {
    TrainConfig base = flags.resolve();
    const std::string checksum = io::sha256_file(corpus);
    if (!manifest_in.empty()) {
      const auto recorded = io::read_manifest(manifest_in);
      base = flags.overlay(io::train_config_from_json(recorded.config));
      if (binary_option->count() == 0) binary = recorded.config.value("binary", 0);
      const auto it = recorded.checksums.find("train");
      if (it != recorded.checksums.end() && it->second != checksum) {
        spdlog::warn("corpus checksum differs from the manifest; results will not match");
      }
    }
    base.validate();

    const auto t_load = Clock::now();
    const Corpus data = load_corpus(corpus, base.min_count);
    const double load_seconds = seconds_since(t_load);

    Report report;
    report.add("documents", data.docs.size());
    report.add("vocabulary", data.vocab.size());
    report.add("tokens", static_cast<std::size_t>(data.vocab.total_tokens()));
    io::RunManifest last;
    for (const TrainConfig& config : expand(base, sweep)) {
      config.validate();
      const std::string words = sweep ? with_cell(word_out, config.word_cols, config.doc_cols) : word_out;
      const std::string docs = sweep ? with_cell(doc_out, config.word_cols, config.doc_cols) : doc_out;
      const std::string manifest =
          manifest_out.empty() ? docs + ".manifest.json"
                               : (sweep ? with_cell(manifest_out, config.word_cols, config.doc_cols) : manifest_out);

      TrainStats stats;
      const ModelParams params = train(data, config, &stats);
      const auto t_write = Clock::now();
      io::write_embeddings(words, data.vocab.tokens(), params.center_words, binary != 0);
      io::write_doc_embeddings(docs, params.docs, binary != 0);

      io::RunManifest m;
      m.command = "train";
      m.config = io::to_json(config);
      m.config["binary"] = binary;
      m.checksums["train"] = checksum;
      m.checksums["word_out"] = io::sha256_file(words);
      m.checksums["doc_out"] = io::sha256_file(docs);
      m.seed = config.seed;
      m.timings["load"] = load_seconds;
      m.timings["train"] = stats.seconds;
      m.timings["write"] = seconds_since(t_write);
      io::write_manifest(manifest, m);
      last = m;

      const std::string prefix = sweep ? fmt::format("r{}x{}.", config.word_cols, config.doc_cols) : "";
      report.add(prefix + "final_loss", stats.epoch_loss.empty() ? 0.0 : stats.epoch_loss.back());
      report.add(prefix + "pairs", static_cast<std::size_t>(stats.pairs));
      report.add(prefix + "train_seconds", stats.seconds);
      report.add(prefix + "word_out", words);
      report.add(prefix + "doc_out", docs);
      report.add(prefix + "manifest", manifest);
    }
    report.write(summary, last);
  }
};

// ---------------------------------------------------------------- cluster

struct ClusterCommand {
  std::string docs, labels, summary, nmi = "arithmetic";
  eval::ClusterProtocol protocol;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("cluster", "spectral clustering of document embeddings");
    sub->add_option("--docs", docs, "document embedding file")->required()->check(CLI::ExistingFile);
    sub->add_option("--labels", labels, "gold labels, one per line")->required()->check(CLI::ExistingFile);
    sub->add_option("--k", protocol.k, "number of clusters")->capture_default_str();
    sub->add_option("--gamma", protocol.gamma, "RBF kernel coefficient")->capture_default_str();
    sub->add_option("--subsample", protocol.subsample, "stratified sample size, 0 for all")->capture_default_str();
    sub->add_option("--seed", protocol.seed, "random seed")->capture_default_str();
    sub->add_option("--threads", protocol.threads, "affinity threads")->capture_default_str();
    sub->add_option("--nmi", nmi, "NMI normalization")
        ->check(CLI::IsMember({"arithmetic", "geometric"}))
        ->capture_default_str();
    sub->add_option("--summary", summary, "JSON summary file");
    sub->callback([this] { run(); });
  }

  void run() {
    protocol.nmi = nmi == "geometric" ? eval::NmiNormalization::kGeometric : eval::NmiNormalization::kArithmetic;
    const auto start = Clock::now();
    const auto bank = io::read_embeddings(docs).bank;
    const auto gold = io::read_labels(labels);
    const auto scores = eval::cluster_and_score(bank, gold.ids, protocol);

    Report report;
    report.add("documents", protocol.subsample > 0 ? std::min(protocol.subsample, bank.size()) : bank.size());
    report.add("mi", scores.mi);
    report.add("nmi", scores.nmi);
    report.add("ari", scores.ari);
    report.add("purity", scores.purity);

    io::RunManifest m;
    m.command = "cluster";
    m.config = {{"k", protocol.k},       {"gamma", protocol.gamma}, {"subsample", protocol.subsample},
                {"seed", protocol.seed}, {"nmi", nmi}};
    m.checksums["docs"] = io::sha256_file(docs);
    m.checksums["labels"] = io::sha256_file(labels);
    m.seed = protocol.seed;
    m.timings["total"] = seconds_since(start);
    report.write(summary, m);
  }
};

// ---------------------------------------------------------------- classify

struct ClassifyCommand {
  std::string train_docs, train_labels, test_docs, test_labels;
  std::string docs, labels, split_file, summary;
  double train_ratio = 0.8;
  std::size_t knn = 3;
  std::uint64_t seed = 1;
  int threads = 1;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("classify", "k-NN classification of document embeddings");
    auto* tr = sub->add_option("--train-docs", train_docs, "training embeddings")->check(CLI::ExistingFile);
    auto* trl = sub->add_option("--train-labels", train_labels, "training labels")->check(CLI::ExistingFile);
    auto* te = sub->add_option("--test-docs", test_docs, "test embeddings")->check(CLI::ExistingFile);
    auto* tel = sub->add_option("--test-labels", test_labels, "test labels")->check(CLI::ExistingFile);
    auto* d = sub->add_option("--docs", docs, "embeddings to split")->check(CLI::ExistingFile);
    auto* l = sub->add_option("--labels", labels, "labels to split")->check(CLI::ExistingFile);
    auto* sf = sub->add_option("--split-file", split_file, "'train' or 'test' per document")->check(CLI::ExistingFile);
    auto* ratio = sub->add_option("--train-ratio", train_ratio, "random split training share")
                      ->check(CLI::Range(0.0, 1.0))
                      ->capture_default_str();
    tr->needs(trl, te, tel)->excludes(d);
    d->needs(l);
    sf->needs(d)->excludes(ratio);
    ratio->needs(d);
    sub->add_option("--knn", knn, "neighbours")->capture_default_str();
    sub->add_option("--seed", seed, "split seed")->capture_default_str();
    sub->add_option("--threads", threads, "query threads")->capture_default_str();
    sub->add_option("--summary", summary, "JSON summary file");
    sub->callback([this] { run(); });
  }

  eval::Split read_split(std::size_t n) const {
    const auto lines = io::read_lines(split_file);
    eval::Split split;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i] == "train") {
        split.train.push_back(i);
      } else if (lines[i] == "test") {
        split.test.push_back(i);
      } else if (!(lines[i].empty() && i + 1 == lines.size())) {
        throw std::runtime_error(fmt::format("{}:{}: expected 'train' or 'test'", split_file, i + 1));
      }
    }
    if (split.train.size() + split.test.size() != n) {
      throw std::runtime_error(fmt::format("split file covers {} documents, embeddings have {}",
                                           split.train.size() + split.test.size(), n));
    }
    return split;
  }

  void run() {
    const auto start = Clock::now();
    io::RunManifest m;
    m.command = "classify";
    m.seed = seed;
    eval::F1Scores scores;
    std::size_t n_train = 0, n_test = 0;
    if (!train_docs.empty()) {
      auto train_labels_read = io::read_labels(train_labels);
      const auto test_labels_read = io::read_labels(test_labels, train_labels_read);
      const auto train_bank = io::read_embeddings(train_docs).bank;
      const auto test_bank = io::read_embeddings(test_docs).bank;
      scores = eval::classify_and_score(train_bank, train_labels_read.ids, test_bank, test_labels_read.ids,
                                        knn, threads);
      n_train = train_bank.size();
      n_test = test_bank.size();
      for (const auto& [key, path] : {std::pair{"train_docs", train_docs}, {"train_labels", train_labels},
                                      {"test_docs", test_docs}, {"test_labels", test_labels}}) {
        m.checksums[key] = io::sha256_file(path);
      }
    } else if (!docs.empty()) {
      const auto bank = io::read_embeddings(docs).bank;
      const auto gold = io::read_labels(labels);
      const auto split = split_file.empty() ? eval::random_split(bank.size(), train_ratio, seed) : read_split(bank.size());
      scores = eval::classify_split(bank, gold.ids, split, knn, threads);
      n_train = split.train.size();
      n_test = split.test.size();
      m.checksums["docs"] = io::sha256_file(docs);
      m.checksums["labels"] = io::sha256_file(labels);
      if (!split_file.empty()) m.checksums["split"] = io::sha256_file(split_file);
    } else {
      throw std::invalid_argument("classify needs --train-docs/--test-docs or --docs");
    }
    m.config = {{"knn", knn}, {"seed", seed}, {"train_ratio", split_file.empty() && train_docs.empty() ? train_ratio : 0.0}};
    m.timings["total"] = seconds_since(start);

    Report report;
    report.add("train_documents", n_train);
    report.add("test_documents", n_test);
    report.add("macro_f1", scores.macro);
    report.add("micro_f1", scores.micro);
    report.write(summary, m);
  }
};

// ---------------------------------------------------------------- sts

struct StsCommand {
  TrainFlags flags;
  std::string dir, summary;
  bool sweep = false;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("sts", "train on the sts-benchmark sentences and report Pearson correlation");
    sub->add_option("--sts-dir", dir, "directory with sts-train.csv, sts-dev.csv, sts-test.csv")
        ->required()
        ->check(CLI::ExistingDirectory);
    flags.config = eval::sts_train_config();
    flags.attach(*sub);
    sub->add_flag("--sweep", sweep, "evaluate every 1 <= r1 <= r2 <= 4 cell");
    sub->add_option("--summary", summary, "JSON summary file");
    sub->callback([this] { run(); });
  }

  void run() {
    const TrainConfig base = flags.resolve();
    base.validate();
    const auto data = eval::load_sts_benchmark(dir);
    if (data.skipped_rows > 0) spdlog::warn("skipped {} malformed rows", data.skipped_rows);

    Report report;
    report.add("pairs", data.pairs.size());
    report.add("skipped_rows", data.skipped_rows);
    io::RunManifest m;
    m.command = "sts";
    m.config = io::to_json(base);
    m.seed = base.seed;
    for (const char* name : {"sts-train.csv", "sts-dev.csv", "sts-test.csv"}) {
      m.checksums[name] = io::sha256_file(fs::path(dir) / name);
    }
    for (const TrainConfig& config : expand(base, sweep)) {
      config.validate();
      TrainStats stats;
      const auto scores = eval::train_and_score_sts(data, config, &stats);
      const std::string prefix = sweep ? fmt::format("r{}x{}.", config.word_cols, config.doc_cols) : "";
      report.add(prefix + "dev_pearson", scores.dev);
      report.add(prefix + "test_pearson", scores.test);
      m.timings[prefix + "train"] = stats.seconds;
    }
    report.write(summary, m);
  }
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("matrep"));

  CLI::App app{"Matrix text embeddings on the unit sphere"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(io::kToolVersion));
  std::string level = "info";
  app.add_option("--log-level", level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();
  app.parse_complete_callback([&] { spdlog::set_level(spdlog::level::from_str(level)); });

  TrainCommand train_cmd;
  ClusterCommand cluster_cmd;
  ClassifyCommand classify_cmd;
  StsCommand sts_cmd;
  train_cmd.attach(app);
  cluster_cmd.attach(app);
  classify_cmd.attach(app);
  sts_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "matrep: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
