#include "mauc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mauc {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void check_shapes(const ScoreMatrix& scores, const ClassIndex& idx) {
  if (scores.rows() != idx.n_samples ||
      scores.cols() != static_cast<std::size_t>(idx.n_classes())) {
    fail("score matrix shape does not match index");
  }
}

double normalizer(int nc) { return static_cast<double>(nc) * (nc - 1); }

// Sample indices outside class `cls`, restricted to present classes.
std::vector<int> negatives_of(const ClassIndex& idx, int cls) {
  std::vector<int> out;
  out.reserve(idx.n_samples - static_cast<std::size_t>(idx.counts[cls]));
  for (int j = 0; j < idx.n_classes(); ++j) {
    if (j == cls) continue;
    out.insert(out.end(), idx.members[static_cast<std::size_t>(j)].begin(),
               idx.members[static_cast<std::size_t>(j)].end());
  }
  return out;
}

void sort_by_score_desc(std::vector<int>& order, const std::vector<double>& col) {
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = col[static_cast<std::size_t>(a)];
    const double sb = col[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
}

HingeIndex build_hinge_index(const std::vector<double>& col, const ClassIndex& idx,
                             int cls, double alpha, std::size_t* ops) {
  HingeIndex h;
  h.pos_order = idx.members[static_cast<std::size_t>(cls)];
  h.neg_order = negatives_of(idx, cls);
  sort_by_score_desc(h.pos_order, col);
  sort_by_score_desc(h.neg_order, col);

  h.cut.assign(h.pos_order.size(), 0);
  std::size_t q = 0;
  for (std::size_t p = 0; p < h.pos_order.size(); ++p) {
    const double fp = col[static_cast<std::size_t>(h.pos_order[p])];
    // Strict comparison: a pair exactly at the margin contributes nothing.
    while (q < h.neg_order.size() &&
           fp - col[static_cast<std::size_t>(h.neg_order[q])] < alpha) {
      ++q;
      if (ops) ++*ops;
    }
    h.cut[p] = static_cast<int>(q);
  }
  return h;
}

}  // namespace

FastRiskOutput exp_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                        const SurrogateSpec& spec, bool want_grad) {
  check_shapes(scores, idx);
  if (spec.kind != LossKind::kExp) fail("exp_fast needs an exp spec");
  const int nc = idx.n_classes();
  const double z = normalizer(nc);
  const double alpha = spec.alpha;

  FastRiskOutput out;
  out.per_class.assign(static_cast<std::size_t>(nc), 0.0);
  if (want_grad) out.grad.emplace(scores.rows(), scores.cols(), 0.0);

  std::vector<double> pos_exp(idx.n_samples), neg_exp(idx.n_samples);
  double total = 0.0;
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double> col = scores.column(static_cast<std::size_t>(i));
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double shift = 0.5 * (*lo_it + *hi_it);
    if (alpha * (*hi_it - shift) > 30.0) {
      fail("exp kernel overflow guard: alpha * score range too large");
    }

    // a collects exp(-alpha f) over the class, b collects the weighted
    // exp(+alpha f) over the rest; the per-column shift cancels in a * b.
    double a = 0.0, b = 0.0;
    for (int m : idx.members[static_cast<std::size_t>(i)]) {
      const double e = std::exp(-alpha * (col[static_cast<std::size_t>(m)] - shift));
      pos_exp[static_cast<std::size_t>(m)] = e;
      a += e;
      ++out.loss_evals;
    }
    const std::vector<int> negs = negatives_of(idx, i);
    for (int s : negs) {
      const double e = weights[static_cast<std::size_t>(s)] *
                       std::exp(alpha * (col[static_cast<std::size_t>(s)] - shift));
      neg_exp[static_cast<std::size_t>(s)] = e;
      b += e;
      ++out.loss_evals;
    }
    out.per_class[static_cast<std::size_t>(i)] = a * b / z;
    total += a * b;

    if (want_grad) {
      ScoreGradient& g = *out.grad;
      for (int m : idx.members[static_cast<std::size_t>(i)]) {
        g(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) =
            -alpha * pos_exp[static_cast<std::size_t>(m)] * b / z;
      }
      for (int s : negs) {
        g(static_cast<std::size_t>(s), static_cast<std::size_t>(i)) =
            alpha * neg_exp[static_cast<std::size_t>(s)] * a / z;
      }
    }
  }
  out.loss = RiskValue{total / z, true};
  return out;
}

HingeIndex hinge_index(const ScoreMatrix& scores, const ClassIndex& idx, int cls,
                       double alpha) {
  check_shapes(scores, idx);
  const std::vector<double> col = scores.column(static_cast<std::size_t>(cls));
  return build_hinge_index(col, idx, cls, alpha, nullptr);
}

FastRiskOutput hinge_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                          const SurrogateSpec& spec, bool want_grad) {
  check_shapes(scores, idx);
  if (spec.kind != LossKind::kHinge) fail("hinge_fast needs a hinge spec");
  const int nc = idx.n_classes();
  const double z = normalizer(nc);
  const double alpha = spec.alpha;

  FastRiskOutput out;
  out.per_class.assign(static_cast<std::size_t>(nc), 0.0);
  out.sweep_ops_per_class.assign(static_cast<std::size_t>(nc), 0);
  if (want_grad) out.grad.emplace(scores.rows(), scores.cols(), 0.0);

  double total = 0.0;
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double> col = scores.column(static_cast<std::size_t>(i));
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];

    std::size_t ops = 0;
    const HingeIndex h = build_hinge_index(col, idx, i, alpha, &ops);

    // One pass over the nested violation prefixes: running weight mass and
    // weighted negative-score mass give the per-positive contribution.
    double class_sum = 0.0;
    double prefix_weight = 0.0, prefix_weighted_score = 0.0;
    std::size_t t = 0;
    for (std::size_t k = 0; k < h.pos_order.size(); ++k) {
      while (t < static_cast<std::size_t>(h.cut[k])) {
        const auto s = static_cast<std::size_t>(h.neg_order[t]);
        prefix_weight += weights[s];
        prefix_weighted_score += weights[s] * col[s];
        ++t;
        ++ops;
      }
      const auto m = static_cast<std::size_t>(h.pos_order[k]);
      class_sum += prefix_weight * (alpha - col[m]) + prefix_weighted_score;
      ++ops;
      ++out.loss_evals;
      if (want_grad) {
        (*out.grad)(m, static_cast<std::size_t>(i)) = -prefix_weight / z;
      }
    }

    if (want_grad) {
      // cover[q] = number of positives whose violation prefix includes the
      // q-th sorted negative; a difference array over the cut values.
      std::vector<double> diff(h.neg_order.size() + 1, 0.0);
      for (int c : h.cut) {
        if (c > 0) {
          diff[0] += 1.0;
          diff[static_cast<std::size_t>(c)] -= 1.0;
        }
      }
      double cover = 0.0;
      for (std::size_t s = 0; s < h.neg_order.size(); ++s) {
        cover += diff[s];
        if (cover == 0.0) break;  // prefixes nest; once uncovered, done
        const auto n = static_cast<std::size_t>(h.neg_order[s]);
        (*out.grad)(n, static_cast<std::size_t>(i)) = weights[n] * cover / z;
      }
    }

    out.per_class[static_cast<std::size_t>(i)] = class_sum / z;
    out.sweep_ops_per_class[static_cast<std::size_t>(i)] = ops;
    out.sweep_ops += ops;
    total += class_sum;
  }
  out.loss = RiskValue{total / z, true};
  return out;
}

FastRiskOutput square_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                           const SurrogateSpec& spec, bool want_grad) {
  check_shapes(scores, idx);
  if (spec.kind != LossKind::kSquared) fail("square_fast needs a squared spec");
  const int nc = idx.n_classes();
  const double z = normalizer(nc);
  const double alpha = spec.alpha;

  FastRiskOutput out;
  out.per_class.assign(static_cast<std::size_t>(nc), 0.0);
  if (want_grad) out.grad.emplace(scores.rows(), scores.cols(), 0.0);

  std::vector<double> residual(idx.n_samples);
  double total = 0.0;
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double> col = scores.column(static_cast<std::size_t>(i));
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];
    const std::vector<int>& pos = idx.members[static_cast<std::size_t>(i)];
    const std::vector<int> negs = negatives_of(idx, i);
    const double ni = static_cast<double>(idx.counts[i]);

    // residual = alpha * one_hot(i) - scores column; the pairwise squared
    // sum collapses onto a degree-weighted quadratic minus one rank-1 term.
    double deg_pos = 0.0;  // sum of D over negatives == affinity row sum of a positive
    for (int s : negs) deg_pos += weights[static_cast<std::size_t>(s)];

    double pos_mass = 0.0;       // Delta_2: plain residual mass on the class
    double neg_weighted = 0.0;   // Delta_1: D-weighted residual mass off the class
    double quad = 0.0;
    for (int m : pos) {
      const auto mi = static_cast<std::size_t>(m);
      residual[mi] = alpha - col[mi];
      pos_mass += residual[mi];
      quad += deg_pos * residual[mi] * residual[mi];
      ++out.loss_evals;
    }
    for (int s : negs) {
      const auto si = static_cast<std::size_t>(s);
      residual[si] = -col[si];
      neg_weighted += weights[si] * residual[si];
      quad += ni * weights[si] * residual[si] * residual[si];
      ++out.loss_evals;
    }
    const double class_sum = quad - 2.0 * pos_mass * neg_weighted;
    out.per_class[static_cast<std::size_t>(i)] = class_sum / z;
    total += class_sum;

    if (want_grad) {
      ScoreGradient& g = *out.grad;
      for (int m : pos) {
        const auto mi = static_cast<std::size_t>(m);
        g(mi, static_cast<std::size_t>(i)) =
            -2.0 * (deg_pos * residual[mi] - neg_weighted) / z;
      }
      for (int s : negs) {
        const auto si = static_cast<std::size_t>(s);
        g(si, static_cast<std::size_t>(i)) =
            -2.0 * (ni * weights[si] * residual[si] - pos_mass * weights[si]) / z;
      }
    }
  }
  out.loss = RiskValue{total / z, true};
  return out;
}

FastRiskOutput general_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                            const SurrogateSpec& spec, bool want_grad) {
  check_shapes(scores, idx);
  if (spec.kind != LossKind::kBernstein) fail("general_fast needs a bernstein spec");
  spec.validate();
  for (double v : scores.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail("general kernel needs scores in [0, 1] (post-softmax)");
    }
  }

  const int nc = idx.n_classes();
  const double z = normalizer(nc);
  const int degree = spec.bernstein_degree;
  const std::size_t kk = static_cast<std::size_t>(degree);

  SurrogateSpec base = spec;
  base.kind = spec.base;
  const BernsteinCoeffs coeffs = bernstein_fit(base, degree);

  // folded[j] = binom(degree, j) * Delta^j phi(0) / 2^j, the coefficient of
  // the separable expansion of u^j with u = (1 + f_m - f_n) / 2.
  std::vector<double> folded(kk + 1);
  for (std::size_t j = 0; j <= kk; ++j) folded[j] = std::ldexp(coeffs.c[j], -static_cast<int>(j));

  // Pascal triangle up to the degree.
  std::vector<std::vector<double>> choose(kk + 1, std::vector<double>(kk + 1, 0.0));
  for (std::size_t n = 0; n <= kk; ++n) {
    choose[n][0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
      choose[n][r] = choose[n - 1][r - 1] + (r <= n - 1 ? choose[n - 1][r] : 0.0);
    }
  }

  FastRiskOutput out;
  out.per_class.assign(static_cast<std::size_t>(nc), 0.0);
  if (want_grad) out.grad.emplace(scores.rows(), scores.cols(), 0.0);

  std::vector<double> pos_moments(kk + 1), neg_moments(kk + 1);
  std::vector<double> pos_fold(kk + 1), neg_fold(kk + 1);
  std::vector<double> powers(kk + 1);
  double total = 0.0;
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double> col = scores.column(static_cast<std::size_t>(i));
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];
    const std::vector<int>& pos = idx.members[static_cast<std::size_t>(i)];
    const std::vector<int> negs = negatives_of(idx, i);

    // Moment vectors: pos_moments[k] = sum over the class of (1/2 + f)^k,
    // neg_moments[r] = D-weighted sum over the rest of (1/2 - f)^r.
    std::fill(pos_moments.begin(), pos_moments.end(), 0.0);
    std::fill(neg_moments.begin(), neg_moments.end(), 0.0);
    for (int m : pos) {
      const double a = 0.5 + col[static_cast<std::size_t>(m)];
      double p = 1.0;
      for (std::size_t k = 0; k <= kk; ++k) {
        pos_moments[k] += p;
        p *= a;
      }
      ++out.loss_evals;
    }
    for (int s : negs) {
      const double b = 0.5 - col[static_cast<std::size_t>(s)];
      const double w = weights[static_cast<std::size_t>(s)];
      double p = 1.0;
      for (std::size_t r = 0; r <= kk; ++r) {
        neg_moments[r] += w * p;
        p *= b;
      }
      ++out.loss_evals;
    }

    // pos_fold[k] pairs with the k-th positive moment; neg_fold[r] pairs
    // with the r-th negative moment in the gradient pass.
    for (std::size_t k = 0; k <= kk; ++k) {
      double acc = 0.0;
      for (std::size_t j = k; j <= kk; ++j) {
        acc += folded[j] * choose[j][k] * neg_moments[j - k];
      }
      pos_fold[k] = acc;
    }

    double class_sum = 0.0;
    for (std::size_t k = 0; k <= kk; ++k) class_sum += pos_moments[k] * pos_fold[k];
    out.per_class[static_cast<std::size_t>(i)] = class_sum / z;
    total += class_sum;

    if (want_grad) {
      ScoreGradient& g = *out.grad;
      for (std::size_t r = 0; r <= kk; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k + r <= kk; ++k) {
          acc += folded[k + r] * choose[k + r][k] * pos_moments[k];
        }
        neg_fold[r] = acc;
      }
      for (int m : pos) {
        const double a = 0.5 + col[static_cast<std::size_t>(m)];
        powers[0] = 1.0;
        for (std::size_t k = 1; k <= kk; ++k) powers[k] = powers[k - 1] * a;
        double acc = 0.0;
        for (std::size_t k = 1; k <= kk; ++k) {
          acc += static_cast<double>(k) * powers[k - 1] * pos_fold[k];
        }
        g(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) = acc / z;
      }
      for (int s : negs) {
        const double b = 0.5 - col[static_cast<std::size_t>(s)];
        const double w = weights[static_cast<std::size_t>(s)];
        powers[0] = 1.0;
        for (std::size_t r = 1; r <= kk; ++r) powers[r] = powers[r - 1] * b;
        double acc = 0.0;
        for (std::size_t r = 1; r <= kk; ++r) {
          acc += static_cast<double>(r) * powers[r - 1] * neg_fold[r];
        }
        g(static_cast<std::size_t>(s), static_cast<std::size_t>(i)) = -w * acc / z;
      }
    }
  }
  out.loss = RiskValue{total / z, true};
  return out;
}

FastRiskOutput dispatch_fast(const ScoreMatrix& scores, const ClassIndex& idx,
                             const SurrogateSpec& spec, bool want_grad,
                             bool force_naive) {
  if (force_naive) {
    FastRiskOutput out;
    out.loss = risk_naive(scores, idx, spec, &out.loss_evals);
    if (want_grad) out.grad = grad_naive(scores, idx, spec);
    return out;
  }
  switch (spec.kind) {
    case LossKind::kExp:
      return exp_fast(scores, idx, spec, want_grad);
    case LossKind::kHinge:
      return hinge_fast(scores, idx, spec, want_grad);
    case LossKind::kSquared:
      return square_fast(scores, idx, spec, want_grad);
    case LossKind::kBernstein:
      return general_fast(scores, idx, spec, want_grad);
    case LossKind::kLogit:
    case LossKind::kQHinge:
    case LossKind::kGenHinge:
    case LossKind::kDistWeight: {
      SurrogateSpec wrapped = spec;
      wrapped.base = spec.kind;
      wrapped.kind = LossKind::kBernstein;
      return general_fast(scores, idx, wrapped, want_grad);
    }
    case LossKind::kZeroOne:
      fail("the 0-1 loss has no accelerated kernel; request the naive path");
  }
  fail("unknown loss kind");
}

}  // namespace mauc
