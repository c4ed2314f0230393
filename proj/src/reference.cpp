#include "mauc/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace mauc {

namespace {

// Kahan accumulator; the quadruple loop adds O(N^2) small terms.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

void check_shapes(const ScoreMatrix& scores, const ClassIndex& idx) {
  if (scores.rows() != idx.n_samples ||
      scores.cols() != static_cast<std::size_t>(idx.n_classes())) {
    throw std::runtime_error("score matrix shape does not match index");
  }
  if (idx.n_classes() < 2) throw std::runtime_error("need at least 2 classes");
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

RiskValue risk_naive(const ScoreMatrix& scores, const ClassIndex& idx,
                     const SurrogateSpec& spec, std::size_t* loss_evals) {
  check_shapes(scores, idx);
  const LossFn loss(spec);
  const int nc = idx.n_classes();
  std::size_t evals = 0;

  Kahan total;
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];
    for (int m : idx.members[static_cast<std::size_t>(i)]) {
      const double fm = scores(static_cast<std::size_t>(m), static_cast<std::size_t>(i));
      for (int j = 0; j < nc; ++j) {
        if (j == i || idx.counts[j] == 0) continue;
        for (int s : idx.members[static_cast<std::size_t>(j)]) {
          const double fn =
              scores(static_cast<std::size_t>(s), static_cast<std::size_t>(i));
          total.add(weights[static_cast<std::size_t>(s)] * loss(fm - fn));
          ++evals;
        }
      }
    }
  }
  if (loss_evals) *loss_evals = evals;
  const double z = static_cast<double>(nc) * (nc - 1);
  return RiskValue{total.sum / z, true};
}

ScoreGradient grad_naive(const ScoreMatrix& scores, const ClassIndex& idx,
                         const SurrogateSpec& spec) {
  check_shapes(scores, idx);
  const LossFn loss(spec);
  const int nc = idx.n_classes();
  const double z = static_cast<double>(nc) * (nc - 1);

  ScoreGradient grad(scores.rows(), scores.cols(), 0.0);
  for (int i = 0; i < nc; ++i) {
    if (idx.counts[i] == 0) continue;
    const std::vector<double>& weights = idx.pair_weights[static_cast<std::size_t>(i)];
    for (int m : idx.members[static_cast<std::size_t>(i)]) {
      const double fm = scores(static_cast<std::size_t>(m), static_cast<std::size_t>(i));
      for (int j = 0; j < nc; ++j) {
        if (j == i || idx.counts[j] == 0) continue;
        for (int s : idx.members[static_cast<std::size_t>(j)]) {
          const double fn =
              scores(static_cast<std::size_t>(s), static_cast<std::size_t>(i));
          const double g =
              weights[static_cast<std::size_t>(s)] * loss.deriv(fm - fn) / z;
          grad(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) += g;
          grad(static_cast<std::size_t>(s), static_cast<std::size_t>(i)) -= g;
        }
      }
    }
  }
  return grad;
}

ScoreMatrix bayes_scores(const Matrix& eta, const std::vector<double>& priors) {
  const std::size_t nc = eta.cols();
  if (priors.size() != nc) throw std::runtime_error("prior count does not match classes");
  for (double p : priors) {
    if (p <= 0.0) throw std::runtime_error("priors must be positive");
  }
  ScoreMatrix out(eta.rows(), nc, 0.0);
  std::vector<double> s(nc);
  for (std::size_t m = 0; m < eta.rows(); ++m) {
    double row_sum = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double e = eta(m, i);
      if (e < 0.0 || e > 1.0) throw std::runtime_error("posterior entries must be in [0,1]");
      row_sum += e;
      s[i] = e / priors[i];
    }
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw std::runtime_error("posterior rows must sum to 1");
    }
    double s_total = 0.0;
    for (double v : s) s_total += v;
    for (std::size_t i = 0; i < nc; ++i) {
      if (eta(m, i) == 1.0) {
        out(m, i) = 1.0;
        continue;
      }
      const double rest = s_total - s[i];
      if (rest <= 0.0) {
        throw std::runtime_error("posterior is inconsistent: no mass outside class");
      }
      out(m, i) = sigmoid(s[i] / rest);
    }
  }
  return out;
}

}  // namespace mauc
