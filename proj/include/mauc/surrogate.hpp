#pragma once

#include <string>
#include <vector>

namespace mauc {

enum class LossKind {
  kZeroOne,     // indicator mis-ranking loss with ties counted 1/2
  kExp,         // exp(-alpha * t)
  kSquared,     // (alpha - t)^2
  kHinge,       // max(alpha - t, 0)
  kLogit,       // log(1 + exp(-alpha * t))
  kQHinge,      // max(1 - t, 0)^q, q > 1
  kGenHinge,    // piecewise linear/quadratic hinge with breakpoint epsilon
  kDistWeight,  // 1/t beyond epsilon, linear extension below
  kBernstein,   // Bernstein polynomial approximation of a base loss
};

const char* loss_kind_name(LossKind kind);

/*!
 * \brief Loss family selector plus its parameters. Parameter ranges are
 *        enforced by validate(); parse() accepts the CLI string form
 *        "kind:key=value,..." such as "exp:alpha=2" or
 *        "bernstein:base=squared,alpha=1,K=10".
 */
struct SurrogateSpec {
  LossKind kind = LossKind::kExp;
  double alpha = 1.0;    // scale for exp/logit, margin for squared/hinge
  double q = 2.0;        // q-norm hinge exponent, > 1
  double epsilon = 0.25; // genhinge in (0, 1/2), distweight in (0, 1)
  int bernstein_degree = 12;
  LossKind base = LossKind::kSquared;  // base loss for kBernstein

  void validate() const;
  static SurrogateSpec parse(const std::string& text);
  std::string to_string() const;
};

// Power-basis Bernstein coefficients: B(u) = sum_j c[j] * u^j with
// c[j] = binom(K, j) * forward_difference^j phi(0), phi(u) = loss(2u - 1).
struct BernsteinCoeffs {
  int degree = 0;
  std::vector<double> c;
};

// Coefficients for the degree-K approximation of `base` (which must not
// itself be a Bernstein spec). Rejects K < 1 and K > 60: the power basis
// loses the coefficient magnitudes past that point.
BernsteinCoeffs bernstein_fit(const SurrogateSpec& base, int degree);

// Horner evaluation of the power-basis polynomial; u must lie in [0, 1].
double bernstein_eval(const BernsteinCoeffs& coeffs, double u);

// d/du of the polynomial at u in [0, 1].
double bernstein_deriv(const BernsteinCoeffs& coeffs, double u);

/*!
 * \brief Prebound loss evaluator. Binding once amortizes the Bernstein
 *        coefficient fit across the O(N^2) calls of the naive risk paths;
 *        all other kinds evaluate their closed form directly.
 *
 * Derivatives at kinks return the right-derivative, so the hinge gradient
 * is 0 exactly at the margin.
 */
class LossFn {
 public:
  explicit LossFn(const SurrogateSpec& spec);

  double operator()(double t) const;
  double deriv(double t) const;
  const SurrogateSpec& spec() const { return spec_; }

 private:
  SurrogateSpec spec_;
  BernsteinCoeffs coeffs_;  // only populated for kBernstein
};

double loss_eval(const SurrogateSpec& spec, double t);
double loss_deriv(const SurrogateSpec& spec, double t);

// Numeric spot checks of the sufficient consistency conditions on a
// 1001-point grid over [-3, 3]. Reports, does not prove.
struct ConsistencyReport {
  bool differentiable_on_grid = false;
  bool convex_on_grid = false;
  bool nonincreasing_on_unit = false;
  bool neg_deriv_at_zero = false;

  bool all() const {
    return differentiable_on_grid && convex_on_grid && nonincreasing_on_unit &&
           neg_deriv_at_zero;
  }
};

ConsistencyReport consistency_check(const SurrogateSpec& spec);

}  // namespace mauc
