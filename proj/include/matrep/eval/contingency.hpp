#pragma once

// External clustering measures over a cluster-by-class contingency table.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace matrep::eval {

class ContingencyTable {
 public:
  /// counts[i][j]: items in cluster i carrying class j. Rows must be equal length.
  explicit ContingencyTable(std::vector<std::vector<std::int64_t>> counts);
  /// Builds the table from aligned label vectors; labels must be dense from 0.
  static ContingencyTable from_labels(std::span<const int> clusters, std::span<const int> classes);

  std::size_t clusters() const { return counts_.size(); }
  std::size_t classes() const { return col_sums_.size(); }
  std::int64_t at(std::size_t cluster, std::size_t cls) const { return counts_[cluster][cls]; }
  std::span<const std::int64_t> cluster_sizes() const { return row_sums_; }
  std::span<const std::int64_t> class_sizes() const { return col_sums_; }
  std::int64_t total() const { return total_; }

 private:
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> row_sums_;
  std::vector<std::int64_t> col_sums_;
  std::int64_t total_ = 0;
};

enum class NmiNormalization { kArithmetic, kGeometric };

double purity(const ContingencyTable& t);
/// Mutual information in nats.
double mutual_info(const ContingencyTable& t);
double entropy(std::span<const std::int64_t> sizes, std::int64_t total);
double nmi(const ContingencyTable& t, NmiNormalization norm = NmiNormalization::kArithmetic);
double ari(const ContingencyTable& t);

struct ClusterScores {
  double mi = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double purity = 0.0;
};

ClusterScores score_clustering(std::span<const int> clusters, std::span<const int> classes,
                               NmiNormalization norm = NmiNormalization::kArithmetic);

}  // namespace matrep::eval
