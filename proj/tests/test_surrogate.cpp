#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "mauc/surrogate.hpp"

using namespace mauc;

namespace {

SurrogateSpec make(LossKind kind) {
  SurrogateSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("closed-form evaluations") {
  SurrogateSpec exp_spec = make(LossKind::kExp);
  CHECK(loss_eval(exp_spec, 0.0) == 1.0);

  SurrogateSpec hinge = make(LossKind::kHinge);
  CHECK(loss_eval(hinge, 0.3) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(loss_eval(hinge, 1.0) == 0.0);
  CHECK(loss_eval(hinge, 2.0) == 0.0);

  SurrogateSpec sq = make(LossKind::kSquared);
  CHECK(loss_eval(sq, 0.5) == doctest::Approx(0.25).epsilon(1e-15));

  SurrogateSpec logit = make(LossKind::kLogit);
  CHECK(loss_eval(logit, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(loss_eval(logit, 800.0) > 0.0);  // stable in the flat tail
  CHECK(std::isfinite(loss_eval(logit, -800.0)));

  SurrogateSpec gen = make(LossKind::kGenHinge);
  gen.epsilon = 0.25;
  CHECK(loss_eval(gen, 1.0) == 0.0);
  // Middle branch: (t - 1 - eps)^2 / (4 eps) at t = 0.8.
  CHECK(loss_eval(gen, 0.8) == doctest::Approx(0.2025).epsilon(1e-12));
  CHECK(loss_eval(gen, 0.75) == doctest::Approx(0.25).epsilon(1e-12));  // branch seam
  CHECK(loss_eval(gen, -1.0) == 2.0);

  SurrogateSpec dist = make(LossKind::kDistWeight);
  dist.epsilon = 0.25;
  CHECK(loss_eval(dist, 0.5) == 2.0);
  CHECK(loss_eval(dist, 0.25) == doctest::Approx(4.0).epsilon(1e-12));  // seam: 1/eps
  CHECK(loss_eval(dist, 0.0) == 8.0);

  SurrogateSpec zo = make(LossKind::kZeroOne);
  CHECK(loss_eval(zo, -0.1) == 1.0);
  CHECK(loss_eval(zo, 0.0) == 0.5);
  CHECK(loss_eval(zo, 0.1) == 0.0);

  SurrogateSpec qh = make(LossKind::kQHinge);
  qh.q = 2.0;
  CHECK(loss_eval(qh, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(loss_eval(qh, 1.5) == 0.0);
}

TEST_CASE("derivatives: closed forms and the finite-difference oracle") {
  SurrogateSpec exp2 = make(LossKind::kExp);
  exp2.alpha = 2.0;
  CHECK(loss_deriv(exp2, 0.0) == -2.0);

  SurrogateSpec sq = make(LossKind::kSquared);
  CHECK(loss_deriv(sq, 0.0) == -2.0);

  SurrogateSpec hinge = make(LossKind::kHinge);
  CHECK(loss_deriv(hinge, 1.0) == 0.0);  // right-derivative at the margin
  CHECK(loss_deriv(hinge, 0.999) == -1.0);

  for (LossKind kind : {LossKind::kExp, LossKind::kSquared, LossKind::kHinge,
                        LossKind::kLogit, LossKind::kQHinge, LossKind::kGenHinge,
                        LossKind::kDistWeight}) {
    SurrogateSpec spec = make(kind);
    const LossFn loss(spec);
    const double t = 0.37;  // away from every kink of the family
    const double fd = testing::central_diff([&](double x) { return loss(x); }, t);
    CHECK(loss.deriv(t) == doctest::Approx(fd).epsilon(1e-5));
  }

  SurrogateSpec bern = make(LossKind::kBernstein);
  bern.base = LossKind::kLogit;
  bern.bernstein_degree = 12;
  const LossFn loss(bern);
  const double fd = testing::central_diff([&](double x) { return loss(x); }, 0.37);
  CHECK(loss.deriv(0.37) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("losses are nonnegative on the working range") {
  for (LossKind kind : {LossKind::kExp, LossKind::kSquared, LossKind::kHinge,
                        LossKind::kLogit, LossKind::kQHinge, LossKind::kGenHinge,
                        LossKind::kDistWeight, LossKind::kZeroOne}) {
    const LossFn loss(make(kind));
    for (int k = 0; k <= 600; ++k) {
      const double t = -3.0 + k * 0.01;
      if (kind == LossKind::kDistWeight && t <= 0.0) continue;  // 1/t branch domain
      CHECK(loss(t) >= 0.0);
    }
  }
}

TEST_CASE("consistency grid checks") {
  const ConsistencyReport exp_report = consistency_check(make(LossKind::kExp));
  CHECK(exp_report.all());

  const ConsistencyReport hinge_report = consistency_check(make(LossKind::kHinge));
  CHECK_FALSE(hinge_report.differentiable_on_grid);
  CHECK(hinge_report.convex_on_grid);
  CHECK(hinge_report.nonincreasing_on_unit);
  CHECK(hinge_report.neg_deriv_at_zero);

  SurrogateSpec qh = make(LossKind::kQHinge);
  qh.q = 2.0;
  CHECK(consistency_check(qh).all());

  const ConsistencyReport logit_report = consistency_check(make(LossKind::kLogit));
  CHECK(logit_report.all());

  const ConsistencyReport zo = consistency_check(make(LossKind::kZeroOne));
  CHECK_FALSE(zo.neg_deriv_at_zero);
  CHECK_FALSE(zo.differentiable_on_grid);
}

TEST_CASE("bernstein fit reproduces linear losses exactly") {
  // hinge with margin 1 restricted to [-1, 1] is the linear loss 1 - t.
  SurrogateSpec linear = make(LossKind::kHinge);
  for (int degree : {1, 3, 10, 25}) {
    const BernsteinCoeffs coeffs = bernstein_fit(linear, degree);
    for (int k = 0; k <= 20; ++k) {
      const double u = k / 20.0;
      CHECK(bernstein_eval(coeffs, u) ==
            doctest::Approx(2.0 - 2.0 * u).epsilon(1e-10));
    }
  }
}

TEST_CASE("bernstein endpoints interpolate phi") {
  for (LossKind kind : {LossKind::kExp, LossKind::kSquared, LossKind::kLogit}) {
    SurrogateSpec base = make(kind);
    const LossFn loss(base);
    const BernsteinCoeffs coeffs = bernstein_fit(base, 9);
    CHECK(bernstein_eval(coeffs, 0.0) == loss(-1.0));  // c0 is phi(0) exactly
    CHECK(bernstein_eval(coeffs, 1.0) == doctest::Approx(loss(1.0)).epsilon(1e-12));
  }
}

TEST_CASE("power basis agrees with the direct basis oracle") {
  for (LossKind kind : {LossKind::kSquared, LossKind::kLogit}) {
    SurrogateSpec base = make(kind);
    for (int degree : {5, 10, 20}) {
      const BernsteinCoeffs coeffs = bernstein_fit(base, degree);
      for (int k = 0; k <= 100; ++k) {
        const double u = k / 100.0;
        const double direct = testing::bernstein_direct(base, degree, u);
        CHECK(bernstein_eval(coeffs, u) == doctest::Approx(direct).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("bernstein defect of the squared loss matches the quadratic identity") {
  // For a quadratic phi the approximation error is exactly
  // phi''/2 * u(1-u)/K; here phi(u) = (2-2u)^2 so phi'' = 8.
  SurrogateSpec base = make(LossKind::kSquared);
  const int degree = 10;
  const BernsteinCoeffs coeffs = bernstein_fit(base, degree);
  const LossFn loss(base);
  for (int k = 0; k <= 10; ++k) {
    const double u = k / 10.0;
    const double phi = loss(2.0 * u - 1.0);
    const double expected_defect = 4.0 * u * (1.0 - u) / degree;
    CHECK(bernstein_eval(coeffs, u) - phi ==
          doctest::Approx(expected_defect).epsilon(1e-9));
  }
  // Value at the midpoint frozen from the direct-basis oracle.
  CHECK(bernstein_eval(coeffs, 0.5) == doctest::Approx(1.1).epsilon(1e-12));
  // Coarse global bound used by the general kernel's accuracy contract.
  for (int k = 0; k <= 100; ++k) {
    const double u = k / 100.0;
    CHECK(std::abs(bernstein_eval(coeffs, u) - loss(2.0 * u - 1.0)) <=
          8.0 / (2.0 * degree) + 1e-12);
  }
}

TEST_CASE("bernstein shape preservation") {
  for (LossKind kind : {LossKind::kSquared, LossKind::kLogit}) {
    SurrogateSpec base = make(kind);
    for (int degree : {5, 10, 20}) {
      const BernsteinCoeffs coeffs = bernstein_fit(base, degree);
      double prev = bernstein_eval(coeffs, 0.0);
      double prev_diff = 0.0;
      bool first = true;
      for (int k = 1; k <= 1000; ++k) {
        const double u = k / 1000.0;
        const double value = bernstein_eval(coeffs, u);
        const double diff = value - prev;
        CHECK(diff <= 1e-12);  // nonincreasing
        if (!first) {
          CHECK(diff - prev_diff >= -1e-9);  // convex: second differences
        }
        first = false;
        prev_diff = diff;
        prev = value;
      }
    }
  }
}

TEST_CASE("bernstein degree limits and range checks") {
  SurrogateSpec base = make(LossKind::kSquared);
  CHECK_THROWS(bernstein_fit(base, 0));
  CHECK_THROWS(bernstein_fit(base, 61));
  CHECK_NOTHROW(bernstein_fit(base, 60));

  SurrogateSpec nested = make(LossKind::kBernstein);
  CHECK_THROWS(bernstein_fit(nested, 5));

  const BernsteinCoeffs coeffs = bernstein_fit(base, 5);
  CHECK_THROWS(bernstein_eval(coeffs, -0.1));
  CHECK_THROWS(bernstein_eval(coeffs, 1.1));
}

TEST_CASE("spec parsing round trips") {
  const SurrogateSpec exp_spec = SurrogateSpec::parse("exp:alpha=2");
  CHECK(exp_spec.kind == LossKind::kExp);
  CHECK(exp_spec.alpha == 2.0);
  CHECK(exp_spec.to_string() == "exp:alpha=2");

  const SurrogateSpec bern = SurrogateSpec::parse("bernstein:base=squared,alpha=1,K=10");
  CHECK(bern.kind == LossKind::kBernstein);
  CHECK(bern.base == LossKind::kSquared);
  CHECK(bern.bernstein_degree == 10);
  CHECK(SurrogateSpec::parse(bern.to_string()).bernstein_degree == 10);

  CHECK(SurrogateSpec::parse("hinge").alpha == 1.0);
  CHECK(SurrogateSpec::parse("qhinge:q=3").q == 3.0);
  CHECK(SurrogateSpec::parse("genhinge:epsilon=0.1").epsilon == 0.1);

  CHECK_THROWS(SurrogateSpec::parse("nosuch"));
  CHECK_THROWS(SurrogateSpec::parse("exp:alpha"));
  CHECK_THROWS(SurrogateSpec::parse("exp:beta=1"));
  CHECK_THROWS(SurrogateSpec::parse("exp:alpha=-1"));
  CHECK_THROWS(SurrogateSpec::parse("qhinge:q=1"));
  CHECK_THROWS(SurrogateSpec::parse("genhinge:epsilon=0.6"));
  CHECK_THROWS(SurrogateSpec::parse("distweight:epsilon=1.5"));
  CHECK_THROWS(SurrogateSpec::parse("bernstein:base=bernstein"));
  CHECK_THROWS(SurrogateSpec::parse("bernstein:base=squared,K=70"));
}
