#pragma once

#include <cstddef>
#include <vector>

#include "mauc/dataset.hpp"
#include "mauc/matrix.hpp"
#include "mauc/surrogate.hpp"

namespace mauc {

// Empirical surrogate risk. The normalized form divides the pairwise sum by
// N_C * (N_C - 1); both conventions circulate, so the flag records which one
// this value carries.
struct RiskValue {
  double value = 0.0;
  bool normalized = true;

  double as_normalized(int n_classes) const {
    const double z = static_cast<double>(n_classes) * (n_classes - 1);
    return normalized ? value : value / z;
  }
  double as_unnormalized(int n_classes) const {
    const double z = static_cast<double>(n_classes) * (n_classes - 1);
    return normalized ? value * z : value;
  }
};

/*!
 * \brief Quadratic-time empirical surrogate risk — the ground truth every
 *        accelerated kernel is tested against.
 *
 * Deliberately O(sum_i sum_{j!=i} n_i n_j) with compensated per-class
 * accumulation. `loss_evals`, when given, receives the exact number of loss
 * evaluations performed.
 */
RiskValue risk_naive(const ScoreMatrix& scores, const ClassIndex& idx,
                     const SurrogateSpec& spec, std::size_t* loss_evals = nullptr);

// d(risk_naive)/d(scores), same normalization.
ScoreGradient grad_naive(const ScoreMatrix& scores, const ClassIndex& idx,
                         const SurrogateSpec& spec);

/*!
 * \brief Bayes-optimal scorer from known posteriors and priors:
 *        s_i = eta_i / p_i, f*(i) = sigmoid(s_i / sum_{j!=i} s_j), with
 *        f*(i) = 1 where eta_i = 1.
 */
ScoreMatrix bayes_scores(const Matrix& eta, const std::vector<double>& priors);

}  // namespace mauc
