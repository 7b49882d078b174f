#include "matrep/eval/contingency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "matrep/errors.hpp"

namespace matrep::eval {

ContingencyTable::ContingencyTable(std::vector<std::vector<std::int64_t>> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty() || counts_.front().empty()) {
    throw std::invalid_argument("contingency table is empty");
  }
  const std::size_t k = counts_.front().size();
  row_sums_.assign(counts_.size(), 0);
  col_sums_.assign(k, 0);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i].size() != k) throw ShapeMismatchError("ragged contingency table");
    for (std::size_t j = 0; j < k; ++j) {
      if (counts_[i][j] < 0) throw std::invalid_argument("negative contingency count");
      row_sums_[i] += counts_[i][j];
      col_sums_[j] += counts_[i][j];
    }
    total_ += row_sums_[i];
  }
  if (total_ == 0) throw std::invalid_argument("contingency table is empty");
}

ContingencyTable ContingencyTable::from_labels(std::span<const int> clusters,
                                               std::span<const int> classes) {
  if (clusters.size() != classes.size()) throw ShapeMismatchError("label vectors differ in length");
  if (clusters.empty()) throw std::invalid_argument("no labels");
  const int kc = *std::max_element(clusters.begin(), clusters.end()) + 1;
  const int kk = *std::max_element(classes.begin(), classes.end()) + 1;
  if (*std::min_element(clusters.begin(), clusters.end()) < 0 ||
      *std::min_element(classes.begin(), classes.end()) < 0) {
    throw std::invalid_argument("labels must be non-negative");
  }
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(kc),
                                                std::vector<std::int64_t>(static_cast<std::size_t>(kk), 0));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    ++counts[static_cast<std::size_t>(clusters[i])][static_cast<std::size_t>(classes[i])];
  }
  return ContingencyTable(std::move(counts));
}

double purity(const ContingencyTable& t) {
  std::int64_t hit = 0;
  for (std::size_t i = 0; i < t.clusters(); ++i) {
    std::int64_t best = 0;
    for (std::size_t j = 0; j < t.classes(); ++j) best = std::max(best, t.at(i, j));
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(t.total());
}

double mutual_info(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total());
  double mi = 0.0;
  for (std::size_t i = 0; i < t.clusters(); ++i) {
    for (std::size_t j = 0; j < t.classes(); ++j) {
      const double nij = static_cast<double>(t.at(i, j));
      if (nij == 0.0) continue;
      const double a = static_cast<double>(t.cluster_sizes()[i]);
      const double b = static_cast<double>(t.class_sizes()[j]);
      mi += nij / n * std::log(nij * n / (a * b));
    }
  }
  return std::max(0.0, mi);
}

double entropy(std::span<const std::int64_t> sizes, std::int64_t total) {
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::int64_t s : sizes) {
    if (s == 0) continue;
    const double q = static_cast<double>(s) / n;
    h -= q * std::log(q);
  }
  return h;
}

double nmi(const ContingencyTable& t, NmiNormalization norm) {
  const double hc = entropy(t.cluster_sizes(), t.total());
  const double hk = entropy(t.class_sizes(), t.total());
  const double mi = mutual_info(t);
  // A single-cluster or single-class side carries no information (MI is 0).
  if (hc == 0.0 || hk == 0.0) return 0.0;
  const double denom = norm == NmiNormalization::kArithmetic ? 0.5 * (hc + hk) : std::sqrt(hc * hk);
  return std::clamp(mi / denom, 0.0, 1.0);
}

namespace {
double pairs(std::int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }
}  // namespace

double ari(const ContingencyTable& t) {
  double index = 0.0;
  for (std::size_t i = 0; i < t.clusters(); ++i) {
    for (std::size_t j = 0; j < t.classes(); ++j) index += pairs(t.at(i, j));
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (auto a : t.cluster_sizes()) sum_a += pairs(a);
  for (auto b : t.class_sizes()) sum_b += pairs(b);
  const double all = pairs(t.total());
  if (all == 0.0) return 1.0;
  const double expected = sum_a * sum_b / all;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions trivial in the same way
  return (index - expected) / (max_index - expected);
}

ClusterScores score_clustering(std::span<const int> clusters, std::span<const int> classes,
                               NmiNormalization norm) {
  const auto t = ContingencyTable::from_labels(clusters, classes);
  return {mutual_info(t), nmi(t, norm), ari(t), purity(t)};
}

}  // namespace matrep::eval
