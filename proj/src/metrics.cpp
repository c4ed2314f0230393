#include "mauc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mauc {

double pair_auc(std::span<const double> col, const std::vector<int>& pos,
                const std::vector<int>& neg) {
  if (pos.empty() || neg.empty()) {
    throw std::runtime_error("pair_auc needs nonempty positive and negative sets");
  }
  // (score, is_positive), ascending by score. Tie blocks are handled
  // wholesale so the result matches the quadratic definition exactly.
  std::vector<std::pair<double, int>> entries;
  entries.reserve(pos.size() + neg.size());
  for (int m : pos) entries.emplace_back(col[static_cast<std::size_t>(m)], 1);
  for (int n : neg) entries.emplace_back(col[static_cast<std::size_t>(n)], 0);
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double correct = 0.0;  // pairs with pos strictly above neg
  double tied = 0.0;
  double neg_below = 0.0;
  std::size_t at = 0;
  while (at < entries.size()) {
    std::size_t end = at;
    double p_here = 0.0, n_here = 0.0;
    while (end < entries.size() && entries[end].first == entries[at].first) {
      if (entries[end].second) {
        p_here += 1.0;
      } else {
        n_here += 1.0;
      }
      ++end;
    }
    correct += p_here * neg_below;
    tied += p_here * n_here;
    neg_below += n_here;
    at = end;
  }
  return (correct + 0.5 * tied) /
         (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

PairAucMatrix pair_auc_all(const ScoreMatrix& scores, const ClassIndex& idx) {
  const int nc = idx.n_classes();
  if (scores.rows() != idx.n_samples || scores.cols() != static_cast<std::size_t>(nc)) {
    throw std::runtime_error("score matrix shape does not match index");
  }
  PairAucMatrix out{Matrix(static_cast<std::size_t>(nc), static_cast<std::size_t>(nc),
                           std::numeric_limits<double>::quiet_NaN())};
  for (int i = 0; i < nc; ++i) {
    const std::vector<double> col = scores.column(static_cast<std::size_t>(i));
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      out.values(i, j) = pair_auc(col, idx.members[static_cast<std::size_t>(i)],
                                  idx.members[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

double mauc_ovo(const PairAucMatrix& p) {
  const int nc = p.n_classes();
  double sum = 0.0;
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i != j) sum += p.values(i, j);
    }
  }
  return sum / (static_cast<double>(nc) * static_cast<double>(nc - 1));
}

double mauc_ova(const PairAucMatrix& p, const std::vector<double>& priors) {
  const int nc = p.n_classes();
  if (priors.size() != static_cast<std::size_t>(nc)) {
    throw std::runtime_error("prior count does not match classes");
  }
  for (double pi : priors) {
    if (pi <= 0.0) throw std::runtime_error("priors must be positive");
    if (pi >= 1.0) throw std::runtime_error("prior of 1 makes the ova weight undefined");
  }
  double sum = 0.0;
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      sum += priors[static_cast<std::size_t>(j)] /
             (1.0 - priors[static_cast<std::size_t>(i)]) * p.values(i, j);
    }
  }
  return sum / static_cast<double>(nc);
}

std::vector<PairReportRow> pair_report(const ScoreMatrix& scores, const ClassIndex& idx,
                                       std::size_t k) {
  if (k < 1) throw std::runtime_error("pair_report needs k >= 1");
  const PairAucMatrix p = pair_auc_all(scores, idx);
  std::vector<PairReportRow> rows;
  const int nc = idx.n_classes();
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      rows.push_back({i, j,
                      idx.proportions[static_cast<std::size_t>(i)] *
                          idx.proportions[static_cast<std::size_t>(j)],
                      p.values(i, j)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const PairReportRow& a, const PairReportRow& b) {
    if (a.freq != b.freq) return a.freq < b.freq;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

}  // namespace mauc
