#include <cmath>
#include <vector>

#include "common.hpp"
#include "doctest.h"
#include "mauc/metrics.hpp"
#include "mauc/reference.hpp"
#include "mauc/rng.hpp"

using namespace mauc;

namespace {

SurrogateSpec make(LossKind kind, double alpha = 1.0) {
  SurrogateSpec s;
  s.kind = kind;
  s.alpha = alpha;
  return s;
}

ClassIndex index_of(const std::vector<int>& labels, int nc) {
  return build_index_allow_empty(labels, nc);
}

}  // namespace

TEST_CASE("risk_naive two-sample squared example") {
  ScoreMatrix f(2, 2);
  f(0, 0) = 0.8;
  f(0, 1) = 0.2;
  f(1, 0) = 0.2;
  f(1, 1) = 0.8;
  const ClassIndex idx = index_of({0, 1}, 2);
  const RiskValue risk = risk_naive(f, idx, make(LossKind::kSquared));
  // Both directions contribute (1 - 0.6)^2 = 0.16; normalized by 2.
  CHECK(risk.value == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(risk.normalized);
  CHECK(risk.as_unnormalized(2) == doctest::Approx(0.32).epsilon(1e-15));
}

TEST_CASE("risk_naive on constant scores with the hinge") {
  Rng rng(3);
  const auto inst = testing::random_instance(rng, 30, 30, 4, 0.0);
  ScoreMatrix flat(inst.scores.rows(), inst.scores.cols(), 0.4);
  const RiskValue risk = risk_naive(flat, inst.idx, make(LossKind::kHinge));
  // Every pair sits at margin alpha - 0 = 1; the weights form a convex
  // combination per direction, so the normalized total is exactly 1.
  CHECK(risk.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("risk_naive counts exactly sum_i sum_j n_i n_j loss evaluations") {
  Rng rng(4);
  const auto inst = testing::random_instance(rng, 40, 60, 5, 0.0);
  std::size_t evals = 0;
  risk_naive(inst.scores, inst.idx, make(LossKind::kExp), &evals);
  std::size_t expected = 0;
  for (int i = 0; i < inst.n_classes; ++i) {
    for (int j = 0; j < inst.n_classes; ++j) {
      if (i != j) {
        expected += static_cast<std::size_t>(inst.idx.counts[i]) *
                    static_cast<std::size_t>(inst.idx.counts[j]);
      }
    }
  }
  CHECK(evals == expected);
}

TEST_CASE("zero-one risk complements mauc_ovo") {
  // Dyadic fixture: counts and the class-pair normalizer are powers of two,
  // so every intermediate value is exact and the identity holds bitwise.
  std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1};
  ScoreMatrix f(8, 2);
  Rng rng(11);
  for (double& v : f.data()) v = std::round(rng.uniform01() * 8.0) / 8.0;
  const ClassIndex idx = index_of(labels, 2);
  const RiskValue risk = risk_naive(f, idx, make(LossKind::kZeroOne));
  CHECK(risk.value == 1.0 - mauc_ovo(pair_auc_all(f, idx)));

  // General case: same identity up to summation rounding.
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::random_instance(rng, 20, 60, 5, 0.5);
    const RiskValue r = risk_naive(inst.scores, inst.idx, make(LossKind::kZeroOne));
    const double mauc = mauc_ovo(pair_auc_all(inst.scores, inst.idx));
    CHECK(std::abs(r.value - (1.0 - mauc)) <= 1e-14);
  }
}

TEST_CASE("grad_naive matches central finite differences") {
  Rng rng(21);
  // Dyadic scores with alpha = 0.35 keep every pair at least 0.025 from the
  // hinge margin, so the perturbation never crosses a kink.
  const auto inst = testing::random_instance(rng, 16, 16, 3, 1.0);
  for (LossKind kind :
       {LossKind::kExp, LossKind::kSquared, LossKind::kHinge, LossKind::kLogit}) {
    const SurrogateSpec spec = make(kind, kind == LossKind::kHinge ? 0.35 : 1.0);
    const ScoreGradient grad = grad_naive(inst.scores, inst.idx, spec);
    for (std::size_t m = 0; m < inst.scores.rows(); m += 3) {
      for (std::size_t j = 0; j < inst.scores.cols(); ++j) {
        ScoreMatrix bumped = inst.scores;
        const double h = 1e-6;
        bumped(m, j) += h;
        const double up = risk_naive(bumped, inst.idx, spec).value;
        bumped(m, j) -= 2.0 * h;
        const double down = risk_naive(bumped, inst.idx, spec).value;
        const double fd = (up - down) / (2.0 * h);
        const double got = grad(m, j);
        CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("grad_naive signs and the two-sample antisymmetry") {
  Rng rng(5);
  const auto inst = testing::random_instance(rng, 24, 24, 3, 0.0);
  ScoreMatrix flat(inst.scores.rows(), inst.scores.cols(), 0.3);
  const ScoreGradient grad = grad_naive(flat, inst.idx, make(LossKind::kExp));
  for (std::size_t m = 0; m < flat.rows(); ++m) {
    const int y = inst.labels[m];
    // Pushing a sample's own-class score up reduces the risk.
    CHECK(grad(m, static_cast<std::size_t>(y)) < 0.0);
  }

  ScoreMatrix two(2, 2);
  two(0, 0) = 0.8;
  two(0, 1) = 0.2;
  two(1, 0) = 0.2;
  two(1, 1) = 0.8;
  const ScoreGradient g2 = grad_naive(two, index_of({0, 1}, 2), make(LossKind::kSquared));
  CHECK(g2(0, 0) == doctest::Approx(-g2(1, 0)).epsilon(1e-12));
  CHECK(g2(0, 1) == doctest::Approx(-g2(1, 1)).epsilon(1e-12));
}

TEST_CASE("hinge gradient is zero for inactive samples") {
  // Separated scores with a small margin: no pair is active.
  ScoreMatrix f(4, 2, 0.0);
  f(0, 0) = 0.9;
  f(1, 0) = 0.8;
  f(2, 0) = 0.1;
  f(3, 0) = 0.0;
  f(0, 1) = 0.1;
  f(1, 1) = 0.0;
  f(2, 1) = 0.9;
  f(3, 1) = 0.8;
  const ScoreGradient g =
      grad_naive(f, index_of({0, 0, 1, 1}, 2), make(LossKind::kHinge, 0.5));
  for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("bayes_scores closed-form cases") {
  {
    Matrix eta(2, 3, 0.0);
    eta(0, 0) = 1.0;            // certain class 0
    eta(1, 0) = 0.2;
    eta(1, 1) = 0.5;
    eta(1, 2) = 0.3;
    const ScoreMatrix f = bayes_scores(eta, {0.5, 0.3, 0.2});
    CHECK(f(0, 0) == 1.0);
    CHECK(f(1, 1) > f(1, 0));  // higher prior-corrected posterior, higher score
  }
  {
    // Uniform posteriors and priors: every score identical in the matrix.
    Matrix eta(3, 3, 1.0 / 3.0);
    const ScoreMatrix f = bayes_scores(eta, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (double v : f.data()) CHECK(v == f(0, 0));
  }
  {
    // Two classes: the class-0 score is strictly increasing in eta_0.
    Matrix eta(5, 2, 0.0);
    for (int k = 0; k < 5; ++k) {
      eta(static_cast<std::size_t>(k), 0) = 0.1 + 0.18 * k;
      eta(static_cast<std::size_t>(k), 1) = 1.0 - eta(static_cast<std::size_t>(k), 0);
    }
    const ScoreMatrix f = bayes_scores(eta, {0.5, 0.5});
    for (int k = 1; k < 5; ++k) {
      CHECK(f(static_cast<std::size_t>(k), 0) > f(static_cast<std::size_t>(k - 1), 0));
    }
  }
  {
    Matrix bad(1, 2, 0.0);
    bad(0, 0) = 0.4;  // row sums to 0.4
    CHECK_THROWS(bayes_scores(bad, {0.5, 0.5}));
  }
}

TEST_CASE("bayes scorer beats random scorers on sampled pair AUC") {
  // Three overlapping Gaussians on the line with skewed priors; posteriors
  // computed from the true densities.
  const std::vector<double> priors = {0.5, 0.3, 0.2};
  const std::vector<double> means = {-1.0, 0.0, 1.5};
  Rng rng(77);
  const int n = 400;
  std::vector<int> labels(n);
  Matrix eta(n, 3);
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform01();
    const int cls = u < priors[0] ? 0 : (u < priors[0] + priors[1] ? 1 : 2);
    labels[k] = cls;
    const double x = means[static_cast<std::size_t>(cls)] + rng.normal();
    xs[static_cast<std::size_t>(k)] = x;
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double diff = x - means[static_cast<std::size_t>(i)];
      eta(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) =
          priors[static_cast<std::size_t>(i)] * std::exp(-0.5 * diff * diff);
      total += eta(static_cast<std::size_t>(k), static_cast<std::size_t>(i));
    }
    for (int i = 0; i < 3; ++i) {
      eta(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) /= total;
    }
  }
  const ClassIndex idx = index_of(labels, 3);
  const ScoreMatrix fstar = bayes_scores(eta, priors);
  const PairAucMatrix best = pair_auc_all(fstar, idx);

  for (int trial = 0; trial < 200; ++trial) {
    ScoreMatrix random(static_cast<std::size_t>(n), 3);
    for (double& v : random.data()) v = rng.uniform01();
    const PairAucMatrix p = pair_auc_all(random, idx);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i != j) CHECK(best.values(i, j) >= p.values(i, j));
      }
    }
  }
}

TEST_CASE("empirical risk is an unbiased estimate of the population risk") {
  // Fixed 6-point distribution with 3 classes and a fixed per-point scorer;
  // the population risk is an exhaustive expectation over point pairs.
  const int n_points = 6, nc = 3;
  const double joint[6][3] = {
      {0.10, 0.02, 0.01}, {0.15, 0.03, 0.02}, {0.05, 0.10, 0.03},
      {0.04, 0.12, 0.06}, {0.03, 0.08, 0.07}, {0.02, 0.04, 0.03},
  };
  double point_scores[6][3];
  Rng score_rng(13);
  for (auto& row : point_scores) {
    for (double& v : row) v = score_rng.uniform01();
  }

  double p_class[3] = {0.0, 0.0, 0.0};
  for (const auto& row : joint) {
    for (int i = 0; i < nc; ++i) p_class[i] += row[i];
  }

  const SurrogateSpec spec = make(LossKind::kSquared);
  const LossFn loss(spec);
  double population = 0.0;
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (i == j) continue;
      double expectation = 0.0;
      for (int a = 0; a < n_points; ++a) {
        for (int b = 0; b < n_points; ++b) {
          const double pa = joint[a][i] / p_class[i];
          const double pb = joint[b][j] / p_class[j];
          expectation += pa * pb * loss(point_scores[a][i] - point_scores[b][i]);
        }
      }
      population += expectation;
    }
  }
  population /= nc * (nc - 1);

  Rng rng(99);
  const int resamples = 500, sample_size = 30;
  double mean = 0.0, m2 = 0.0;
  int done = 0;
  while (done < resamples) {
    std::vector<int> labels(sample_size);
    ScoreMatrix scores(sample_size, nc);
    bool present[3] = {false, false, false};
    for (int s = 0; s < sample_size; ++s) {
      double u = rng.uniform01();
      int pt = 0, cls = 0;
      for (int a = 0; a < n_points && u >= 0; ++a) {
        for (int i = 0; i < nc; ++i) {
          u -= joint[a][i];
          if (u < 0) {
            pt = a;
            cls = i;
            break;
          }
        }
      }
      labels[static_cast<std::size_t>(s)] = cls;
      present[cls] = true;
      for (int i = 0; i < nc; ++i) {
        scores(static_cast<std::size_t>(s), static_cast<std::size_t>(i)) =
            point_scores[pt][i];
      }
    }
    if (!present[0] || !present[1] || !present[2]) continue;  // redraw
    const double sample_risk = risk_naive(scores, index_of(labels, nc), spec).value;
    ++done;
    const double delta = sample_risk - mean;
    mean += delta / done;
    m2 += delta * (sample_risk - mean);
  }
  const double stderr_mean = std::sqrt(m2 / (resamples - 1) / resamples);
  CHECK(std::abs(mean - population) <= 3.0 * stderr_mean + 1e-12);
}
