#pragma once

// Test-only reference implementations written straight from the
// definitions. They deliberately avoid the library's column-sum and
// contingency-table shortcuts.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "matrep/manifold.hpp"

namespace oracle {

using matrep::Matrix;
using matrep::MatrixView;

/// sum_i sum_j a_i . b_j / (r1 r2), columns taken one by one.
inline double sim_double_sum(MatrixView a, MatrixView b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double d = 0.0;
      for (std::size_t row = 0; row < a.rows(); ++row) d += a(row, i) * b(row, j);
      total += d;
    }
  }
  return total / static_cast<double>(a.cols() * b.cols());
}

/// sum_k sum_l |u_k - v_l|^2 / r^2.
inline double dist2_double_sum(MatrixView u, MatrixView v) {
  double total = 0.0;
  for (std::size_t k = 0; k < u.cols(); ++k) {
    for (std::size_t l = 0; l < v.cols(); ++l) {
      for (std::size_t row = 0; row < u.rows(); ++row) {
        const double d = u(row, k) - v(row, l);
        total += d * d;
      }
    }
  }
  const double r = static_cast<double>(u.cols());
  return total / (r * r);
}

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::span<const double> x, double h = 1e-6) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double relative_error(std::span<const double> got, std::span<const double> want) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    diff += (got[i] - want[i]) * (got[i] - want[i]);
    norm += want[i] * want[i];
  }
  if (norm == 0.0) return std::sqrt(diff);
  return std::sqrt(diff / norm);
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (double& x : m.values()) x = normal(rng);
  return m;
}

// ---- clustering / classification measures from label vectors ----

inline double purity(std::span<const int> clusters, std::span<const int> classes) {
  std::map<int, std::map<int, int>> by_cluster;
  for (std::size_t i = 0; i < clusters.size(); ++i) ++by_cluster[clusters[i]][classes[i]];
  double hit = 0;
  for (auto& [c, m] : by_cluster) {
    int best = 0;
    for (auto& [k, n] : m) best = std::max(best, n);
    hit += best;
  }
  return hit / static_cast<double>(clusters.size());
}

/// MI from empirical joint and marginal probabilities, in nats.
inline double mutual_info(std::span<const int> a, std::span<const int> b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> pj;
  std::map<int, double> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pj[{a[i], b[i]}] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (auto& [key, c] : pj) {
    const double p = c / n;
    mi += p * std::log(p / ((pa[key.first] / n) * (pb[key.second] / n)));
  }
  return mi;
}

inline double entropy(std::span<const int> a) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> p;
  for (int x : a) p[x] += 1.0;
  double h = 0.0;
  for (auto& [k, c] : p) h -= (c / n) * std::log(c / n);
  return h;
}

inline double nmi(std::span<const int> a, std::span<const int> b) {
  const double ha = entropy(a), hb = entropy(b);
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return mutual_info(a, b) / (0.5 * (ha + hb));
}

/// Hubert-Arabie ARI from explicit pair counting over all i < j.
inline double ari(std::span<const int> a, std::span<const int> b) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (sa) ++n10;
      else if (sb) ++n01;
      else ++n00;
    }
  }
  const double denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (denom == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / denom;
}

/// Macro and micro F1 by scanning every item once per class.
inline std::pair<double, double> f1(std::span<const int> pred, std::span<const int> gold) {
  std::map<int, bool> classes;
  for (int g : gold) classes[g] = true;
  for (int p : pred) classes[p] = true;
  double macro = 0.0, tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
  for (auto& [c, _] : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (pred[i] == c && gold[i] == c) ++tp;
      if (pred[i] == c && gold[i] != c) ++fp;
      if (pred[i] != c && gold[i] == c) ++fn;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    macro += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  const double p = tp_all / (tp_all + fp_all), r = tp_all / (tp_all + fn_all);
  return {macro / static_cast<double>(classes.size()), 2 * p * r / (p + r)};
}

/// Pearson from raw moments.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

}  // namespace oracle
