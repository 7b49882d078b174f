#include "matrep/eval/classification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "matrep/corpus.hpp"
#include "matrep/errors.hpp"
#include "matrep/similarity.hpp"

namespace matrep::eval {

namespace {

std::vector<std::size_t> nearest(const std::vector<DistanceOperand>& train,
                                 const DistanceOperand& query, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ranked.emplace_back(dist2(train[i], query), i);
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

int vote(std::span<const std::size_t> neighbours, std::span<const int> labels) {
  std::map<int, int> tally;
  for (auto i : neighbours) ++tally[labels[i]];
  int best_count = 0;
  for (const auto& [label, count] : tally) best_count = std::max(best_count, count);
  // Vote ties go to the nearest neighbour if it is tied, else to the first tied label by rank.
  for (auto i : neighbours) {
    if (tally[labels[i]] == best_count) return labels[i];
  }
  return labels[neighbours.front()];
}

}  // namespace

std::vector<std::size_t> nearest_neighbours(const EmbeddingBank& train, MatrixView query,
                                            std::size_t k) {
  if (train.size() == 0) throw std::invalid_argument("k-NN: empty training set");
  if (k == 0 || k > train.size()) throw std::invalid_argument("k-NN: k must lie in [1, train size]");
  std::vector<DistanceOperand> ops;
  ops.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ops.emplace_back(train.view(i));
  return nearest(ops, DistanceOperand(query), k);
}

std::vector<int> knn_classify(const EmbeddingBank& train, std::span<const int> train_labels,
                              const EmbeddingBank& queries, std::size_t k, int threads) {
  if (train.size() == 0) throw std::invalid_argument("k-NN: empty training set");
  if (train_labels.size() != train.size()) throw ShapeMismatchError("k-NN: label count mismatch");
  if (k == 0 || k > train.size()) throw std::invalid_argument("k-NN: k must lie in [1, train size]");
  if (queries.size() > 0 && (queries.rows() != train.rows() || queries.cols() != train.cols())) {
    throw ShapeMismatchError("k-NN: query and training shapes differ");
  }
  std::vector<DistanceOperand> ops;
  ops.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ops.emplace_back(train.view(i));

  std::vector<int> out(queries.size());
  auto classify = [&](std::size_t q) {
    const auto nn = nearest(ops, DistanceOperand(queries.view(q)), k);
    out[q] = vote(nn, train_labels);
  };
  if (threads <= 1) {
    for (std::size_t q = 0; q < queries.size(); ++q) classify(q);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t q = static_cast<std::size_t>(w); q < queries.size();
             q += static_cast<std::size_t>(threads)) {
          classify(q);
        }
      });
    }
  }
  return out;
}

F1Scores f1_scores(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw ShapeMismatchError("f1: length mismatch");
  if (gold.empty()) throw std::invalid_argument("f1: no labels");
  std::map<int, std::array<std::int64_t, 3>> stats;  // tp, fp, fn
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] == gold[i]) {
      ++stats[gold[i]][0];
    } else {
      ++stats[predicted[i]][1];
      ++stats[gold[i]][2];
    }
  }
  auto f1 = [](double tp, double fp, double fn) {
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  };
  double macro = 0.0;
  double tp = 0, fp = 0, fn = 0;
  for (const auto& [label, s] : stats) {
    macro += f1(static_cast<double>(s[0]), static_cast<double>(s[1]), static_cast<double>(s[2]));
    tp += static_cast<double>(s[0]);
    fp += static_cast<double>(s[1]);
    fn += static_cast<double>(s[2]);
  }
  return {macro / static_cast<double>(stats.size()), f1(tp, fp, fn)};
}

Split random_split(std::size_t n, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw std::invalid_argument("train ratio must lie in (0, 1)");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(n)));
  Split s{{idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut)},
          {idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end()}};
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t size,
                                              std::uint64_t seed) {
  if (size >= labels.size()) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  // Largest-remainder allocation of `size` slots across classes.
  std::vector<std::pair<double, int>> remainders;
  std::map<int, std::size_t> quota;
  std::size_t assigned = 0;
  for (auto& [label, members] : by_class) {
    const double exact = static_cast<double>(size) * static_cast<double>(members.size()) /
                         static_cast<double>(labels.size());
    quota[label] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[label];
    remainders.emplace_back(exact - std::floor(exact), label);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < size && i < remainders.size(); ++i, ++assigned) {
    ++quota[remainders[i].second];
  }
  std::vector<std::size_t> out;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t take = std::min(quota[label], members.size());
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(out.begin(), out.end());
  return out;
}

EmbeddingBank select(const EmbeddingBank& bank, std::span<const std::size_t> rows) {
  EmbeddingBank out(rows.size(), bank.rows(), bank.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = bank.entry(rows[i]);
    std::copy(src.begin(), src.end(), out.entry(i).begin());
  }
  return out;
}

std::vector<int> select(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(labels[r]);
  return out;
}

}  // namespace matrep::eval
