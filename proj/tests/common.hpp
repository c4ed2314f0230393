#pragma once

// Shared oracles and fixtures for the test suites. Everything here is
// deliberately independent of the accelerated implementation paths.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mauc/dataset.hpp"
#include "mauc/matrix.hpp"
#include "mauc/rng.hpp"
#include "mauc/surrogate.hpp"

namespace mauc::testing {

// Quadratic-time AUC: counts 1 / 0.5 per ordered pair, single final divide.
inline double quad_pair_auc(const std::vector<double>& col, const std::vector<int>& pos,
                            const std::vector<int>& neg) {
  double count = 0.0;
  for (int m : pos) {
    for (int n : neg) {
      const double a = col[static_cast<std::size_t>(m)];
      const double b = col[static_cast<std::size_t>(n)];
      if (a > b) {
        count += 1.0;
      } else if (a == b) {
        count += 0.5;
      }
    }
  }
  return count / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

struct RandomInstance {
  ScoreMatrix scores;
  std::vector<int> labels;
  int n_classes = 0;
  ClassIndex idx;
};

// Randomized (scores, labels) fixture with skewed class sizes and optional
// duplicated scores (dyadic grid, so ties are exact).
inline RandomInstance random_instance(Rng& rng, int min_n, int max_n,
                                      int max_classes = 7,
                                      double duplicate_prob = 0.2) {
  const int n =
      min_n + static_cast<int>(rng.uniform_index(
                  static_cast<std::size_t>(max_n - min_n + 1)));
  const int nc_cap = std::min(max_classes, n / 2);
  const int nc =
      2 + static_cast<int>(rng.uniform_index(
              static_cast<std::size_t>(std::max(1, nc_cap - 1))));

  std::vector<double> rho(static_cast<std::size_t>(nc));
  const double skew = rng.uniform(0.0, 3.0);
  double total = 0.0;
  for (double& r : rho) {
    r = std::exp(skew * rng.uniform01());
    total += r;
  }
  for (double& r : rho) r = std::max(r / total, 0.02);

  std::vector<int> counts(static_cast<std::size_t>(nc), 1);
  int assigned = nc;
  total = 0.0;
  for (double r : rho) total += r;
  for (int i = 0; i < nc && assigned < n; ++i) {
    const int extra =
        std::min(n - assigned, static_cast<int>(rho[static_cast<std::size_t>(i)] /
                                                total * (n - nc)));
    counts[static_cast<std::size_t>(i)] += extra;
    assigned += extra;
  }
  for (int i = 0; assigned < n; i = (i + 1) % nc) {
    ++counts[static_cast<std::size_t>(i)];
    ++assigned;
  }

  RandomInstance inst;
  inst.n_classes = nc;
  for (int i = 0; i < nc; ++i) {
    inst.labels.insert(inst.labels.end(),
                       static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]), i);
  }
  inst.scores = ScoreMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(nc));
  for (double& v : inst.scores.data()) v = rng.uniform01();
  if (rng.uniform01() < duplicate_prob) {
    for (double& v : inst.scores.data()) v = std::round(v * 8.0) / 8.0;
  }
  inst.idx = build_index_allow_empty(inst.labels, nc);
  return inst;
}

// Central finite difference of a scalar function.
template <typename F>
double central_diff(const F& fn, double x, double h = 1e-6) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

// Direct probabilist-basis Bernstein evaluation: the independent oracle for
// the power-basis coefficients.
inline double bernstein_direct(const SurrogateSpec& base, int degree, double u) {
  const LossFn loss(base);
  double total = 0.0;
  // binom(K, k) built incrementally.
  double binom = 1.0;
  for (int k = 0; k <= degree; ++k) {
    const double phi = loss(2.0 * static_cast<double>(k) / degree - 1.0);
    total += phi * binom * std::pow(u, k) * std::pow(1.0 - u, degree - k);
    binom = binom * static_cast<double>(degree - k) / static_cast<double>(k + 1);
  }
  return total;
}

}  // namespace mauc::testing
