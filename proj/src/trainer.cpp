#include "matrep/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "matrep/errors.hpp"
#include "matrep/similarity.hpp"

namespace matrep {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (dim == 0) fail("embedding dimension p must be positive");
  if (word_cols == 0 || doc_cols == 0) fail("column counts r1, r2 must be positive");
  if (word_cols > doc_cols) {
    fail("word columns r1=" + std::to_string(word_cols) + " must not exceed document columns r2=" +
         std::to_string(doc_cols) + " (r1 <= r2)");
  }
  if (doc_cols > dim) {
    fail("document columns r2=" + std::to_string(doc_cols) + " must not exceed dimension p=" +
         std::to_string(dim) + " (r <= p)");
  }
  if (!(margin > 0.0)) fail("margin m must be positive");
  if (!(alpha > 0.0)) fail("learning rate must be positive");
  if (iterations < 1) fail("iterations must be positive");
  if (window < 1) fail("window must be positive");
  if (negatives < 1) fail("negative sample count must be positive");
  if (min_count < 1) fail("min_count must be positive");
  if (sample < 0.0) fail("subsampling threshold must be non-negative");
  if (threads < 1) fail("thread count must be positive");
}

namespace {

// Per-role gradient of the loss as a single p-vector; the full gradient
// repeats it in every column.
struct ColumnGradients {
  double loss = 0.0;
  bool active = false;
  std::vector<double> context, center, doc;
  std::vector<std::vector<double>> negatives;
};

void axpy(double a, std::span<const double> x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

ColumnGradients column_gradients(const ColumnSum& v, const ColumnSum& u,
                                 std::span<const ColumnSum> negs, const ColumnSum& d,
                                 double margin, NegativeAggregation aggregation) {
  const std::size_t p = u.rows();
  const double r1 = static_cast<double>(u.cols());
  const double r2 = static_cast<double>(d.cols());
  const double ww = 1.0 / (r1 * r1);
  const double wd = 1.0 / (r1 * r2);
  const double weight =
      aggregation == NegativeAggregation::kMean ? 1.0 / static_cast<double>(negs.size()) : 1.0;

  ColumnGradients out;
  out.context.assign(p, 0.0);
  out.center.assign(p, 0.0);
  out.doc.assign(p, 0.0);
  out.negatives.assign(negs.size(), std::vector<double>(p, 0.0));

  const double g_vu = sim_g(v, u);
  const double g_ud = sim_g(u, d);
  for (std::size_t k = 0; k < negs.size(); ++k) {
    const ColumnSum& n = negs[k];
    const double hinge = margin - g_vu - g_ud + sim_g(v, n) + sim_g(n, d);
    if (!(hinge > 0.0)) continue;
    out.active = true;
    out.loss += weight * hinge;
    axpy(weight * ww, n.values(), out.context);
    axpy(-weight * ww, u.values(), out.context);
    axpy(-weight * ww, v.values(), out.center);
    axpy(-weight * wd, d.values(), out.center);
    axpy(weight * ww, v.values(), out.negatives[k]);
    axpy(weight * wd, d.values(), out.negatives[k]);
    axpy(weight * wd, n.values(), out.doc);
    axpy(-weight * wd, u.values(), out.doc);
  }
  return out;
}

void check_tuple_shapes(MatrixView context, MatrixView center,
                        std::span<const MatrixView> negatives, MatrixView doc) {
  const std::size_t p = center.rows();
  const std::size_t r1 = center.cols();
  auto same_word_shape = [&](MatrixView m) { return m.rows() == p && m.cols() == r1; };
  if (!same_word_shape(context)) throw ShapeMismatchError("context/center shapes differ");
  for (const auto& n : negatives) {
    if (!same_word_shape(n)) throw ShapeMismatchError("negative/center shapes differ");
  }
  if (doc.rows() != p) throw ShapeMismatchError("document row dimension differs from words");
  if (negatives.empty()) throw std::invalid_argument("at least one negative sample is required");
}

std::vector<ColumnSum> column_sums(std::span<const MatrixView> ms) {
  std::vector<ColumnSum> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

Matrix broadcast_columns(std::span<const double> column, std::size_t cols) {
  Matrix m(column.size(), cols);
  for (std::size_t i = 0; i < column.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = column[i];
  }
  return m;
}

}  // namespace

ModelParams init_params(std::size_t vocab_size, std::size_t n_docs, const TrainConfig& config,
                        Rng& rng) {
  config.validate();
  if (vocab_size == 0 || n_docs == 0) {
    throw std::invalid_argument("init_params: vocabulary and document counts must be positive");
  }
  const double half = 0.5 / static_cast<double>(config.dim);
  std::uniform_real_distribution<double> entry(-half, half);

  auto fill = [&](std::size_t count, std::size_t cols) {
    EmbeddingBank bank(count, config.dim, cols);
    for (std::size_t i = 0; i < count; ++i) {
      auto e = bank.entry(i);
      double n = 0.0;
      while (!(n > 0.0)) {
        for (double& x : e) x = entry(rng);
        n = euclidean_norm(e);
      }
      for (double& x : e) x /= n;
    }
    return bank;
  };

  ModelParams params;
  params.dim = config.dim;
  params.word_cols = config.word_cols;
  params.doc_cols = config.doc_cols;
  params.center_words = fill(vocab_size, config.word_cols);
  params.context_words = fill(vocab_size, config.word_cols);
  params.docs = fill(n_docs, config.doc_cols);
  return params;
}

double loss_tuple(MatrixView context, MatrixView center, std::span<const MatrixView> negatives,
                  MatrixView doc, double margin, NegativeAggregation aggregation) {
  check_tuple_shapes(context, center, negatives, doc);
  const ColumnSum v(context), u(center), d(doc);
  const double g_vu = sim_g(v, u);
  const double g_ud = sim_g(u, d);
  double total = 0.0;
  for (const auto& nm : negatives) {
    const ColumnSum n(nm);
    total += std::max(0.0, margin - g_vu - g_ud + sim_g(v, n) + sim_g(n, d));
  }
  if (aggregation == NegativeAggregation::kMean) total /= static_cast<double>(negatives.size());
  return total;
}

TupleGradients grad_tuple(MatrixView context, MatrixView center,
                          std::span<const MatrixView> negatives, MatrixView doc, double margin,
                          NegativeAggregation aggregation) {
  check_tuple_shapes(context, center, negatives, doc);
  const auto negs = column_sums(negatives);
  const auto cg = column_gradients(ColumnSum(context), ColumnSum(center), negs, ColumnSum(doc),
                                   margin, aggregation);
  const std::size_t r1 = center.cols();
  TupleGradients out{cg.loss, broadcast_columns(cg.context, r1),
                     broadcast_columns(cg.center, r1), {}, broadcast_columns(cg.doc, doc.cols())};
  out.negatives.reserve(negatives.size());
  for (const auto& g : cg.negatives) out.negatives.push_back(broadcast_columns(g, r1));
  return out;
}

MatrixEmbedding apply_update(const MatrixEmbedding& param, const Matrix& euclid_grad, double lr) {
  if (param.rows() != euclid_grad.rows() || param.cols() != euclid_grad.cols()) {
    throw ShapeMismatchError("gradient shape differs from parameter shape");
  }
  const FlatEmbedding x = flatten(param);
  const std::vector<double> tangent = tangent_project(x.values(), euclid_grad.values());
  std::vector<double> moved = retract(x.values(), tangent, lr);
  return unflatten(FlatEmbedding(std::move(moved), param.rows(), param.cols()));
}

namespace {

// Shared-bank access for lock-free parallel SGD. Relaxed atomic loads/stores
// compile to plain moves; concurrent updates to one entry may interleave.
void load_entry(EmbeddingBank& bank, std::size_t i, std::vector<double>& out) {
  auto e = bank.entry(i);
  out.resize(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    out[k] = std::atomic_ref<double>(e[k]).load(std::memory_order_relaxed);
  }
  // A torn read can leave the sphere; pull it back before use.
  const double n = euclidean_norm(out);
  if (std::abs(n - 1.0) > kUnitNormInputTol && n > 0.0) {
    for (double& x : out) x /= n;
  }
}

void store_entry(EmbeddingBank& bank, std::size_t i, std::span<const double> values) {
  auto e = bank.entry(i);
  for (std::size_t k = 0; k < e.size(); ++k) {
    std::atomic_ref<double>(e[k]).store(values[k], std::memory_order_relaxed);
  }
}

struct Shard {
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<Shard> make_shards(const Corpus& corpus, int threads) {
  std::int64_t total = 0;
  for (const auto& d : corpus.docs) total += static_cast<std::int64_t>(d.token_ids.size());
  std::vector<Shard> shards;
  std::size_t begin = 0;
  std::int64_t seen = 0;
  for (int w = 0; w < threads; ++w) {
    const std::int64_t target = total * (w + 1) / threads;
    std::size_t end = begin;
    while (end < corpus.docs.size() &&
           (w == threads - 1 || seen + static_cast<std::int64_t>(corpus.docs[end].token_ids.size()) <= target)) {
      seen += static_cast<std::int64_t>(corpus.docs[end].token_ids.size());
      ++end;
    }
    shards.push_back({begin, end});
    begin = end;
  }
  return shards;
}

class Worker {
 public:
  Worker(const Corpus& corpus, const TrainConfig& config, const NegativeTable& table,
         ModelParams& params, std::atomic<std::int64_t>& processed, std::int64_t scheduled,
         Shard shard, std::uint64_t seed)
      : corpus_(corpus),
        config_(config),
        table_(table),
        params_(params),
        processed_(processed),
        scheduled_(static_cast<double>(scheduled)),
        shard_(shard),
        rng_(seed) {}

  void run_epoch() {
    loss_ = 0.0;
    pairs_ = 0;
    for (std::size_t d = shard_.begin; d < shard_.end; ++d) {
      const Document& doc = corpus_.docs[d];
      const auto done = processed_.fetch_add(static_cast<std::int64_t>(doc.token_ids.size()),
                                             std::memory_order_relaxed);
      const double progress = std::min(1.0, static_cast<double>(done) / scheduled_);
      lr_ = config_.alpha * (1.0 - (1.0 - 1e-4) * progress);

      kept_ = subsample_document(doc.token_ids, corpus_.vocab, config_.sample, rng_);
      for_each_window_pair(kept_, config_.window, rng_,
                           [&](WordId center, WordId context) { step(center, context, d); });
    }
  }

  double loss() const { return loss_; }
  std::uint64_t pairs() const { return pairs_; }

 private:
  void step(WordId center, WordId context, std::size_t doc) {
    const std::size_t p = params_.dim;
    const std::size_t r1 = params_.word_cols;
    const std::size_t r2 = params_.doc_cols;
    const auto n_neg = static_cast<std::size_t>(config_.negatives);

    load_entry(params_.context_words, static_cast<std::size_t>(context), v_);
    load_entry(params_.center_words, static_cast<std::size_t>(center), u_);
    load_entry(params_.docs, doc, d_);
    neg_ids_.resize(n_neg);
    negs_.resize(n_neg);
    for (std::size_t k = 0; k < n_neg; ++k) {
      neg_ids_[k] = sample_negative_excluding(table_, center, rng_);
      load_entry(params_.center_words, static_cast<std::size_t>(neg_ids_[k]), negs_[k]);
    }

    sums_.clear();
    for (std::size_t k = 0; k < n_neg; ++k) sums_.emplace_back(MatrixView(negs_[k], p, r1));
    const auto cg = column_gradients(ColumnSum(MatrixView(v_, p, r1)),
                                     ColumnSum(MatrixView(u_, p, r1)), sums_,
                                     ColumnSum(MatrixView(d_, p, r2)), config_.margin,
                                     config_.aggregation);
    loss_ += cg.loss;
    ++pairs_;
    if (!cg.active) return;

    // All gradients come from the pre-update values loaded above. Center-bank
    // targets (U and every N) are merged by id so a repeated word moves once.
    update(params_.context_words, static_cast<std::size_t>(context), v_, cg.context);
    center_targets_.clear();
    center_targets_.push_back({center, cg.center});
    for (std::size_t k = 0; k < n_neg; ++k) {
      bool merged = false;
      for (auto& t : center_targets_) {
        if (t.id == neg_ids_[k]) {
          for (std::size_t i = 0; i < p; ++i) t.grad[i] += cg.negatives[k][i];
          merged = true;
          break;
        }
      }
      if (!merged) center_targets_.push_back({neg_ids_[k], cg.negatives[k]});
    }
    update(params_.docs, doc, d_, cg.doc);
    for (const auto& t : center_targets_) {
      const auto& x = t.id == center ? u_ : negs_[index_of_negative(t.id)];
      update(params_.center_words, static_cast<std::size_t>(t.id), x, t.grad);
    }
  }

  std::size_t index_of_negative(WordId id) const {
    for (std::size_t k = 0; k < neg_ids_.size(); ++k) {
      if (neg_ids_[k] == id) return k;
    }
    return 0;
  }

  void update(EmbeddingBank& bank, std::size_t id, const std::vector<double>& x,
              const std::vector<double>& column_grad) {
    const std::size_t cols = bank.cols();
    grad_.resize(x.size());
    for (std::size_t i = 0; i < column_grad.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) grad_[i * cols + j] = column_grad[i];
    }
    tangent_.resize(x.size());
    next_.resize(x.size());
    tangent_project(x, grad_, tangent_);
    retract(x, tangent_, lr_, next_);
    store_entry(bank, id, next_);
  }

  struct CenterTarget {
    WordId id;
    std::vector<double> grad;
  };

  const Corpus& corpus_;
  const TrainConfig& config_;
  const NegativeTable& table_;
  ModelParams& params_;
  std::atomic<std::int64_t>& processed_;
  double scheduled_;
  Shard shard_;
  Rng rng_;

  double lr_ = 0.0;
  double loss_ = 0.0;
  std::uint64_t pairs_ = 0;
  std::vector<WordId> kept_;
  std::vector<double> v_, u_, d_, grad_, tangent_, next_;
  std::vector<std::vector<double>> negs_;
  std::vector<WordId> neg_ids_;
  std::vector<ColumnSum> sums_;
  std::vector<CenterTarget> center_targets_;
};

}  // namespace

ModelParams train(const Corpus& corpus, const TrainConfig& config, TrainStats* stats) {
  config.validate();
  if (corpus.vocab.size() == 0) throw std::invalid_argument("train: empty vocabulary");
  if (corpus.docs.empty()) throw std::invalid_argument("train: corpus has no documents");
  const auto start = std::chrono::steady_clock::now();

  std::seed_seq init_seed{config.seed, std::uint64_t{0x696e6974}};
  Rng init_rng(init_seed);
  ModelParams params = init_params(corpus.vocab.size(), corpus.docs.size(), config, init_rng);
  const NegativeTable table(corpus.vocab);

  std::int64_t corpus_tokens = 0;
  for (const auto& d : corpus.docs) corpus_tokens += static_cast<std::int64_t>(d.token_ids.size());
  const std::int64_t scheduled = std::max<std::int64_t>(1, corpus_tokens * config.iterations);
  std::atomic<std::int64_t> processed{0};

  std::vector<Worker> workers;
  const auto shards = make_shards(corpus, config.threads);
  workers.reserve(shards.size());
  for (std::size_t w = 0; w < shards.size(); ++w) {
    workers.emplace_back(corpus, config, table, params, processed, scheduled, shards[w],
                         config.seed + w);
  }

  TrainStats local;
  for (int epoch = 0; epoch < config.iterations; ++epoch) {
    if (workers.size() == 1) {
      workers.front().run_epoch();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers.size());
      for (auto& w : workers) pool.emplace_back([&w] { w.run_epoch(); });
    }
    double loss = 0.0;
    std::uint64_t pairs = 0;
    for (const auto& w : workers) {
      loss += w.loss();
      pairs += w.pairs();
    }
    const double deviation = std::max({params.center_words.renormalize(),
                                       params.context_words.renormalize(),
                                       params.docs.renormalize()});
    local.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    local.epoch_norm_deviation.push_back(deviation);
    local.pairs += pairs;
    spdlog::debug("epoch {}/{}: mean loss {:.6f} over {} pairs, max norm deviation {:.3g}",
                  epoch + 1, config.iterations, local.epoch_loss.back(), pairs, deviation);
  }
  local.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  spdlog::info("trained {} epochs ({} pairs) in {:.1f}s", config.iterations, local.pairs,
               local.seconds);
  if (stats) *stats = std::move(local);
  return params;
}

}  // namespace matrep
