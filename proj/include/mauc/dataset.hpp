#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mauc/matrix.hpp"

namespace mauc {

/*!
 * \brief Multiclass dataset: N x d feature matrix plus integer labels in
 *        [0, n_classes). Immutable after construction.
 *
 * Labels are dense class ids. Loaders refuse label gaps instead of
 * remapping so class ids stay stable across splits.
 */
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  // Validates N >= 2, d >= 1, label range, and >= 2 distinct classes.
  static Dataset create(Matrix features, std::vector<int> labels, int n_classes);
};

/*!
 * \brief Per-class bookkeeping consumed by every risk evaluator.
 *
 * pair_weights[i][m] = 1 / (n_i * n_{y_m}); for m of class i this equals
 * 1 / n_i^2, and summing it over samples outside class i gives
 * (n_classes - 1) / n_i.
 */
struct ClassIndex {
  std::vector<std::vector<int>> members;       // input order preserved
  std::vector<int> counts;                     // n_i
  std::vector<double> proportions;             // rho_i = n_i / N
  std::vector<std::vector<double>> pair_weights;  // D^(i), length N each
  std::size_t n_samples = 0;

  int n_classes() const { return static_cast<int>(counts.size()); }
};

// 0/1 class indicator columns; each sample row sums to exactly 1.
struct OneHot {
  std::vector<std::vector<double>> columns;  // [class][sample]
};

// Throws if any class is empty.
ClassIndex build_index(const Dataset& ds);

// Batch variant: absent classes get empty member lists and zero weights.
// Throws only if fewer than 2 classes are present.
ClassIndex build_index_allow_empty(const std::vector<int>& labels, int n_classes);

OneHot one_hot(const Dataset& ds);

// (xi, chi): xi = sqrt(sum_i 1/rho_i), chi = sqrt(sum_i sum_{j!=i} 1/(rho_i rho_j)).
// Label-skew diagnostics; both grow as the class distribution skews.
std::pair<double, double> imbalance_factors(const ClassIndex& idx);

// CSV: one sample per line, comma separated, `label_col` holds a nonnegative
// integer label and the remaining fields are real features. No header.
Dataset load_csv(const std::string& path, std::size_t label_col = 0);

// LIBSVM text: "label idx:val idx:val ..." with 1-based ascending indices.
// Dense output; d = max index seen; blank lines skipped.
Dataset load_libsvm(const std::string& path);

void save_csv(const Dataset& ds, const std::string& path);

// Features i.i.d. uniform on [0,1]; class counts follow rho with
// floor-rounding and the remainder assigned in descending-rho order.
Dataset synth_uniform(std::size_t n, std::size_t d, const std::vector<double>& rho,
                      std::uint64_t seed);

// Unit-variance Gaussian blobs with class means mutually `separation` apart
// on coordinate axes (requires d >= n_classes).
Dataset synth_blobs(std::size_t n, std::size_t d, const std::vector<double>& rho,
                    double separation, std::uint64_t seed);

// Per-class proportional split with remainder to train; every class lands at
// least one sample in each part. Deterministic per seed.
std::array<Dataset, 3> split_stratified(const Dataset& ds,
                                        const std::array<double, 3>& fractions,
                                        std::uint64_t seed);

}  // namespace mauc
