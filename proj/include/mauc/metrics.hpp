#pragma once

#include <span>
#include <vector>

#include "mauc/dataset.hpp"
#include "mauc/matrix.hpp"

namespace mauc {

/*!
 * \brief N_C x N_C matrix of pairwise AUC values; entry (i, j) is the AUC of
 *        class i against class j scored by column i. Not symmetric, since
 *        (i, j) and (j, i) use different score columns. Diagonal is NaN.
 */
struct PairAucMatrix {
  Matrix values;

  int n_classes() const { return static_cast<int>(values.rows()); }
};

/*!
 * \brief AUC of `pos` versus `neg` samples under one score column, ties
 *        counted 1/2. Sorting-based, O((|pos|+|neg|) log(|pos|+|neg|)),
 *        bit-identical to the quadratic pair count.
 */
double pair_auc(std::span<const double> col, const std::vector<int>& pos,
                const std::vector<int>& neg);

PairAucMatrix pair_auc_all(const ScoreMatrix& scores, const ClassIndex& idx);

// Unweighted mean of all off-diagonal pairwise AUCs (the M metric).
double mauc_ovo(const PairAucMatrix& p);

// Prior-weighted aggregation: (1/N_C) sum_i sum_{j!=i} p_j/(1-p_i) * AUC_{i|j}.
// Equals mauc_ovo under uniform priors. Throws if any prior is 1.
double mauc_ova(const PairAucMatrix& p, const std::vector<double>& priors);

struct PairReportRow {
  int i = 0;
  int j = 0;
  double freq = 0.0;  // rho_i * rho_j
  double auc = 0.0;
};

// Bottom-k class pairs by frequency rho_i*rho_j, ascending, ties broken by
// (i, j) lexicographic. Surfaces the minority pairs that mauc_ova hides.
std::vector<PairReportRow> pair_report(const ScoreMatrix& scores, const ClassIndex& idx,
                                       std::size_t k);

}  // namespace mauc
