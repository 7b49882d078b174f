#include "matrep/eval/protocols.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

#include "matrep/corpus.hpp"
#include "matrep/eval/spectral.hpp"

namespace matrep::eval {

ClusterScores cluster_and_score(const EmbeddingBank& docs, std::span<const int> labels,
                                const ClusterProtocol& protocol) {
  if (docs.size() != labels.size()) {
    throw std::invalid_argument("cluster: " + std::to_string(docs.size()) + " embeddings but " +
                                std::to_string(labels.size()) + " labels");
  }
  SpectralOptions opt;
  opt.k = protocol.k;
  opt.gamma = protocol.gamma;
  opt.seed = protocol.seed;
  opt.threads = protocol.threads;
  if (protocol.subsample > 0 && protocol.subsample < docs.size()) {
    const auto rows = stratified_subsample(labels, protocol.subsample, protocol.seed);
    spdlog::info("clustering a stratified sample of {} of {} documents", rows.size(), docs.size());
    const auto sub_labels = select(labels, rows);
    return score_clustering(spectral_cluster(select(docs, rows), opt), sub_labels, protocol.nmi);
  }
  return score_clustering(spectral_cluster(docs, opt), labels, protocol.nmi);
}

F1Scores classify_and_score(const EmbeddingBank& train_docs, std::span<const int> train_labels,
                            const EmbeddingBank& test_docs, std::span<const int> test_labels,
                            std::size_t k, int threads) {
  if (train_docs.size() != train_labels.size() || test_docs.size() != test_labels.size()) {
    throw std::invalid_argument("classify: embedding and label counts differ");
  }
  const auto predicted = knn_classify(train_docs, train_labels, test_docs, k, threads);
  return f1_scores(predicted, test_labels);
}

F1Scores classify_split(const EmbeddingBank& docs, std::span<const int> labels, const Split& split,
                        std::size_t k, int threads) {
  if (docs.size() != labels.size()) throw std::invalid_argument("classify: embedding and label counts differ");
  return classify_and_score(select(docs, split.train), select(labels, split.train),
                            select(docs, split.test), select(labels, split.test), k, threads);
}

TrainConfig sts_train_config() {
  TrainConfig c;
  c.iterations = 1000;
  c.window = 15;
  c.negatives = 5;
  return c;
}

StsScores train_and_score_sts(const StsDataset& data, const TrainConfig& config, TrainStats* stats) {
  const Corpus corpus = build_corpus(data.sentences, config.min_count);
  spdlog::info("sts corpus: {} sentences, {} word types", corpus.docs.size(), corpus.vocab.size());
  const ModelParams params = train(corpus, config, stats);
  return sts_evaluate(params.docs, data.pairs);
}

std::vector<std::pair<std::size_t, std::size_t>> column_grid(std::size_t max_cols) {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t r1 = 1; r1 <= max_cols; ++r1) {
    for (std::size_t r2 = r1; r2 <= max_cols; ++r2) grid.emplace_back(r1, r2);
  }
  return grid;
}

}  // namespace matrep::eval
