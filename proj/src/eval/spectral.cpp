#include "matrep/eval/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "matrep/similarity.hpp"

namespace matrep::eval {

namespace {

constexpr double kIsolatedDegree = 1e-300;

template <typename Fn>
void parallel_rows(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const auto t = static_cast<std::size_t>(threads);
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += t) fn(i);
    });
  }
}

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::MatrixXd& centers,
                        Eigen::Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

std::vector<Eigen::Index> kmeanspp_seeds(const Eigen::MatrixXd& points, std::size_t k, Rng& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> seeds;
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto add = [&](Eigen::Index s) {
    seeds.push_back(s);
    chosen[static_cast<std::size_t>(s)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] =
          std::min(nearest[static_cast<std::size_t>(i)], (points.row(i) - points.row(s)).squaredNorm());
    }
  };
  add(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  while (seeds.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest[static_cast<std::size_t>(i)];
        if (target <= 0.0 && nearest[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (nearest[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct points than k: fall back to any unchosen index.
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) free.push_back(i);
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    add(pick);
  }
  return seeds;
}

KMeansResult lloyd(const Eigen::MatrixXd& points, std::size_t k, Rng& rng, int max_iter) {
  const Eigen::Index n = points.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  KMeansResult res;
  res.centers.resize(kk, points.cols());
  const auto seeds = kmeanspp_seeds(points, k, rng);
  for (Eigen::Index c = 0; c < kk; ++c) res.centers.row(c) = points.row(seeds[static_cast<std::size_t>(c)]);
  res.labels.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = squared_distance(points, i, res.centers, 0);
      for (Eigen::Index c = 1; c < kk; ++c) {
        const double d = squared_distance(points, i, res.centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.labels[static_cast<std::size_t>(i)] != best) {
        res.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kk, points.cols());
    std::vector<Eigen::Index> sizes(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = res.labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++sizes[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        res.centers.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: restart it on the point worst served by its center.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = squared_distance(points, i, res.centers, res.labels[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      res.centers.row(c) = points.row(far);
      res.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
    }
  }

  res.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    res.inertia += squared_distance(points, i, res.centers, res.labels[static_cast<std::size_t>(i)]);
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, Rng& rng, int restarts,
                    int max_iter) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (static_cast<std::size_t>(points.rows()) < k) {
    throw std::invalid_argument("kmeans: fewer points than clusters");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto res = lloyd(points, k, rng, max_iter);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

namespace {

struct RitzPairs {
  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<bool> converged;
};

// One Lanczos run confined to the orthogonal complement of `locked`.
// Returns the top `want` Ritz pairs, largest first.
RitzPairs lanczos_run(const Eigen::MatrixXd& a, const Eigen::MatrixXd& locked, Eigen::Index want,
                      double tol, std::size_t max_steps, Rng& rng) {
  const Eigen::Index n = a.rows();
  const Eigen::Index free = n - locked.cols();
  const Eigen::Index m_max =
      std::min<Eigen::Index>(free, static_cast<Eigen::Index>(std::max<std::size_t>(max_steps, want)));
  want = std::min(want, m_max);

  auto deflate = [&](Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index used) {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0) v -= locked * (locked.transpose() * v);
      if (used > 0) v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
    }
  };
  std::normal_distribution<double> normal;
  auto random_orthogonal = [&](const Eigen::MatrixXd& basis, Eigen::Index used) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    deflate(v, basis, used);
    return Eigen::VectorXd(v / v.norm());
  };

  Eigen::MatrixXd q(n, m_max);
  std::vector<double> alpha, beta;
  q.col(0) = random_orthogonal(q, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  Eigen::Index m = 0;
  double b = 0.0;
  for (Eigen::Index j = 0; j < m_max; ++j) {
    Eigen::VectorXd w = a * q.col(j);
    alpha.push_back(q.col(j).dot(w));
    w -= alpha.back() * q.col(j);
    if (j > 0) w -= beta.back() * q.col(j - 1);
    deflate(w, q, j + 1);
    b = w.norm();
    m = j + 1;

    const bool last = m == m_max;
    if (m >= want && (m % 5 == 0 || last || b < 1e-12)) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd off(std::max<Eigen::Index>(0, m - 1));
      for (Eigen::Index i = 0; i + 1 < m; ++i) off[i] = beta[static_cast<std::size_t>(i)];
      tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
      const double scale = std::max(1.0, std::abs(tri.eigenvalues()[m - 1]));
      bool converged = true;
      for (Eigen::Index i = m - want; i < m; ++i) {
        if (b * std::abs(tri.eigenvectors()(m - 1, i)) > tol * scale) {
          converged = false;
          break;
        }
      }
      if (converged || last) break;
    }
    if (b < 1e-12) {
      // Invariant subspace reached: continue from a fresh orthogonal direction.
      beta.push_back(0.0);
      q.col(j + 1) = random_orthogonal(q, j + 1);
    } else {
      beta.push_back(b);
      q.col(j + 1) = w / b;
    }
  }

  RitzPairs out;
  const double scale = std::max(1.0, std::abs(tri.eigenvalues()[m - 1]));
  for (Eigen::Index i = 0; i < want; ++i) {
    const Eigen::Index src = m - 1 - i;
    out.values.push_back(tri.eigenvalues()[src]);
    Eigen::VectorXd v = q.leftCols(m) * tri.eigenvectors().col(src);
    out.vectors.push_back(v / v.norm());
    out.converged.push_back(m == free || b * std::abs(tri.eigenvectors()(m - 1, src)) <= tol * scale);
  }
  return out;
}

}  // namespace

EigenPairs lanczos_largest(const Eigen::MatrixXd& a, std::size_t k, double tol,
                           std::size_t max_steps, Rng& rng) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("lanczos: matrix must be square");
  if (k == 0 || static_cast<Eigen::Index>(k) > n) {
    throw std::invalid_argument("lanczos: k must lie in [1, n]");
  }
  const auto kk = static_cast<Eigen::Index>(k);

  // Converged pairs are locked and the search restarts in their complement
  // until a run finds nothing above the current k-th value.
  Eigen::MatrixXd locked(n, 0);
  std::vector<double> values;
  auto kth_value = [&] {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return sorted[static_cast<std::size_t>(kk - 1)];
  };
  auto lock = [&](const Eigen::VectorXd& v, double value) {
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = v;
    values.push_back(value);
  };
  while (locked.cols() < n) {
    const Eigen::Index have = locked.cols();
    const Eigen::Index want = have < kk ? kk - have : 1;
    auto run = lanczos_run(a, locked, want, tol, max_steps, rng);
    if (have >= kk) {
      const double scale = std::max(1.0, std::abs(values.empty() ? 0.0 : kth_value()));
      if (run.values[0] <= kth_value() + tol * scale) break;
      lock(run.vectors[0], run.values[0]);
      continue;
    }
    bool any = false;
    for (std::size_t i = 0; i < run.values.size(); ++i) {
      if (!run.converged[i]) continue;
      lock(run.vectors[i], run.values[i]);
      any = true;
    }
    if (!any) {
      spdlog::warn("lanczos: no Ritz pair reached tolerance {} within {} steps", tol, max_steps);
      lock(run.vectors[0], run.values[0]);
    }
  }

  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return values[static_cast<std::size_t>(x)] > values[static_cast<std::size_t>(y)];
  });
  EigenPairs out;
  out.values.resize(kk);
  out.vectors.resize(n, kk);
  for (Eigen::Index i = 0; i < kk; ++i) {
    out.values[i] = values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    out.vectors.col(i) = locked.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Eigen::MatrixXd affinity_matrix(const EmbeddingBank& points, double gamma, int threads) {
  if (!(gamma > 0.0)) throw std::invalid_argument("affinity: gamma must be positive");
  const std::size_t n = points.size();
  std::vector<DistanceOperand> ops;
  ops.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ops.emplace_back(points.view(i));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_rows(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = affinity_from_dist2(dist2(ops[i], ops[j]), gamma);
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  });
  return a;
}

std::vector<int> spectral_cluster_affinity(const Eigen::MatrixXd& affinity,
                                           const SpectralOptions& options) {
  const Eigen::Index n = affinity.rows();
  if (affinity.cols() != n) throw std::invalid_argument("affinity matrix must be square");
  if (options.k == 0) throw std::invalid_argument("cluster count must be positive");
  if (static_cast<std::size_t>(n) < options.k) {
    throw std::invalid_argument("fewer points than clusters");
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);

  Eigen::VectorXd degree = affinity.rowwise().sum() - affinity.diagonal();
  std::vector<Eigen::Index> connected;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degree[i] > kIsolatedDegree) connected.push_back(i);
  }
  const auto c = static_cast<Eigen::Index>(connected.size());
  if (static_cast<std::size_t>(c) < options.k) {
    throw std::invalid_argument("affinity graph has fewer connected points than clusters");
  }
  if (c < n) spdlog::warn("{} of {} points have zero affinity degree", n - c, n);
  if (options.k == 1) {
    for (auto i : connected) labels[static_cast<std::size_t>(i)] = 0;
    return labels;
  }

  Eigen::VectorXd inv_sqrt(c);
  for (Eigen::Index i = 0; i < c; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[connected[i]]);
  Eigen::MatrixXd m(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = i == j ? 0.0 : inv_sqrt[i] * affinity(connected[i], connected[j]) * inv_sqrt[j];
    }
  }

  // The k smallest eigenvalues of I - M are the k largest of M.
  const auto kk = static_cast<Eigen::Index>(options.k);
  Rng rng(options.seed);
  Eigen::MatrixXd y;
  if (static_cast<std::size_t>(c) <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    y = solver.eigenvectors().rightCols(kk);
  } else {
    y = lanczos_largest(m, options.k, options.lanczos_tol, 10 * static_cast<std::size_t>(c), rng)
            .vectors;
  }
  for (Eigen::Index i = 0; i < c; ++i) {
    const double norm = y.row(i).norm();
    if (norm > 0.0) y.row(i) /= norm;
  }

  const auto km = kmeans(y, options.k, rng, options.restarts, options.max_iter);
  for (Eigen::Index i = 0; i < c; ++i) {
    labels[static_cast<std::size_t>(connected[i])] = km.labels[static_cast<std::size_t>(i)];
  }
  return labels;
}

std::vector<int> spectral_cluster(const EmbeddingBank& points, const SpectralOptions& options) {
  const Eigen::MatrixXd a = affinity_matrix(points, options.gamma, options.threads);
  auto labels = spectral_cluster_affinity(a, options);

  std::vector<std::size_t> isolated, connected;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] < 0 ? isolated : connected).push_back(i);
  if (!isolated.empty()) {
    spdlog::warn("assigning {} isolated points to their nearest connected neighbour",
                 isolated.size());
    for (std::size_t i : isolated) {
      const DistanceOperand oi(points.view(i));
      std::size_t best = connected.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j : connected) {
        const double d = dist2(oi, DistanceOperand(points.view(j)));
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      labels[i] = labels[best];
    }
  }
  return labels;
}

std::vector<int> spectral_cluster(std::span<const MatrixEmbedding> points,
                                  const SpectralOptions& options) {
  EmbeddingBank bank;
  for (const auto& m : points) bank.push_back(m);
  return spectral_cluster(bank, options);
}

}  // namespace matrep::eval
