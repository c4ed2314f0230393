#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mauc/dataset.hpp"
#include "mauc/matrix.hpp"
#include "mauc/reference.hpp"
#include "mauc/surrogate.hpp"

namespace mauc {

/*!
 * \brief Sorted-order bookkeeping for one class of the hinge kernel.
 *
 * pos_order / neg_order hold sample indices sorted by score descending
 * (ties by original index). cut[k] counts the negatives whose hinge margin
 * against the k-th sorted positive is violated; those are always a prefix
 * of neg_order, and cut is nondecreasing because the violation sets nest
 * along the sorted positives.
 */
struct HingeIndex {
  std::vector<int> pos_order;
  std::vector<int> neg_order;
  std::vector<int> cut;
};

// Two-pointer sweep over the descending-sorted positives and negatives.
// A pair exactly at the margin (difference == alpha) is inactive.
HingeIndex hinge_index(const ScoreMatrix& scores, const ClassIndex& idx, int cls,
                       double alpha);

/*!
 * \brief Result of an accelerated risk evaluation.
 *
 * `loss_evals` counts elementary loss-term evaluations (exactly N * N_C for
 * the exp and squared kernels); `sweep_ops` counts the hinge kernel's
 * pointer advances and prefix accumulations, bounded by 2N per class.
 */
struct FastRiskOutput {
  RiskValue loss;
  std::optional<ScoreGradient> grad;
  std::vector<double> per_class;  // normalized per-class contributions
  std::size_t loss_evals = 0;
  std::size_t sweep_ops = 0;
  std::vector<std::size_t> sweep_ops_per_class;
};

// Factorized exponential kernel, O(N * N_C). Scores are shifted per column
// before exponentiation (exact: the pos/neg factors cancel the shift);
// throws if the post-shift exponent magnitude would exceed 30.
FastRiskOutput exp_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                        const SurrogateSpec& spec, bool want_grad);

// Sort + one-pass dynamic program over the violation prefixes,
// O(N_C * N log N).
FastRiskOutput hinge_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                          const SurrogateSpec& spec, bool want_grad);

// Graph-Laplacian factorization of the squared loss, O(N * N_C).
FastRiskOutput square_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                           const SurrogateSpec& spec, bool want_grad);

// Bernstein moment expansion for arbitrary base losses, O(K * N * N_C).
// Requires all scores in [0, 1] (post-softmax) and degree <= 60. Matches
// risk_naive evaluated with the same Bernstein-approximated loss.
FastRiskOutput general_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                            const SurrogateSpec& spec, bool want_grad);

// Routes to the matching kernel; non-accelerable kinds are wrapped in a
// Bernstein spec with the spec's own degree. force_naive falls back to the
// quadratic-time reference path.
FastRiskOutput dispatch_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                             const SurrogateSpec& spec, bool want_grad,
                             bool force_naive = false);

}  // namespace mauc
