#include "mauc/surrogate.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mauc {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double stable_log1p_exp(double z) {
  // log(1 + exp(z)) without overflow for large |z|.
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// Pascal's row in doubles; exact for the degrees we accept.
std::vector<double> binomial_row(int n) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
  for (int j = 1; j <= n; ++j) {
    row[static_cast<std::size_t>(j)] =
        row[static_cast<std::size_t>(j - 1)] * static_cast<double>(n - j + 1) /
        static_cast<double>(j);
  }
  return row;
}

double closed_form_eval(const SurrogateSpec& s, double t) {
  switch (s.kind) {
    case LossKind::kZeroOne:
      if (t < 0.0) return 1.0;
      if (t == 0.0) return 0.5;
      return 0.0;
    case LossKind::kExp:
      return std::exp(-s.alpha * t);
    case LossKind::kSquared: {
      const double r = s.alpha - t;
      return r * r;
    }
    case LossKind::kHinge:
      return t < s.alpha ? s.alpha - t : 0.0;
    case LossKind::kLogit:
      return stable_log1p_exp(-s.alpha * t);
    case LossKind::kQHinge:
      return t < 1.0 ? std::pow(1.0 - t, s.q) : 0.0;
    case LossKind::kGenHinge:
      if (t <= 1.0 - s.epsilon) return 1.0 - t;
      if (t < 1.0) {
        const double r = t - 1.0 - s.epsilon;
        return r * r / (4.0 * s.epsilon);
      }
      return 0.0;
    case LossKind::kDistWeight:
      if (t > s.epsilon) return 1.0 / t;
      return (2.0 - t / s.epsilon) / s.epsilon;
    case LossKind::kBernstein:
      fail("bernstein loss must be evaluated through LossFn");
  }
  fail("unknown loss kind");
}

double closed_form_deriv(const SurrogateSpec& s, double t) {
  switch (s.kind) {
    case LossKind::kZeroOne:
      return 0.0;
    case LossKind::kExp:
      return -s.alpha * std::exp(-s.alpha * t);
    case LossKind::kSquared:
      return -2.0 * (s.alpha - t);
    case LossKind::kHinge:
      // Right-derivative at the margin, so a pair exactly at alpha is inert.
      return t < s.alpha ? -1.0 : 0.0;
    case LossKind::kLogit:
      return -s.alpha / (1.0 + std::exp(s.alpha * t));
    case LossKind::kQHinge:
      return t < 1.0 ? -s.q * std::pow(1.0 - t, s.q - 1.0) : 0.0;
    case LossKind::kGenHinge:
      if (t < 1.0 - s.epsilon) return -1.0;
      if (t < 1.0) return (t - 1.0 - s.epsilon) / (2.0 * s.epsilon);
      return 0.0;
    case LossKind::kDistWeight:
      if (t > s.epsilon) return -1.0 / (t * t);
      return -1.0 / (s.epsilon * s.epsilon);
    case LossKind::kBernstein:
      fail("bernstein loss must be evaluated through LossFn");
  }
  fail("unknown loss kind");
}

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j > 0; --j) acc = acc * u + c[j - 1];
  return acc;
}

double horner_deriv(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j > 1; --j) {
    acc = acc * u + c[j - 1] * static_cast<double>(j - 1);
  }
  return acc;
}

}  // namespace

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kZeroOne: return "zero_one";
    case LossKind::kExp: return "exp";
    case LossKind::kSquared: return "squared";
    case LossKind::kHinge: return "hinge";
    case LossKind::kLogit: return "logit";
    case LossKind::kQHinge: return "qhinge";
    case LossKind::kGenHinge: return "genhinge";
    case LossKind::kDistWeight: return "distweight";
    case LossKind::kBernstein: return "bernstein";
  }
  return "?";
}

void SurrogateSpec::validate() const {
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (kind == LossKind::kQHinge && !(q > 1.0)) fail("qhinge needs q > 1");
  if (kind == LossKind::kGenHinge && !(epsilon > 0.0 && epsilon < 0.5)) {
    fail("genhinge needs epsilon in (0, 1/2)");
  }
  if (kind == LossKind::kDistWeight && !(epsilon > 0.0 && epsilon < 1.0)) {
    fail("distweight needs epsilon in (0, 1)");
  }
  if (kind == LossKind::kBernstein) {
    if (base == LossKind::kBernstein) fail("bernstein base must not be bernstein");
    if (bernstein_degree < 1) fail("bernstein degree must be >= 1");
    if (bernstein_degree > 60) fail("bernstein degree capped at 60");
    SurrogateSpec b = *this;
    b.kind = base;
    b.validate();
  }
}

namespace {

LossKind kind_from_name(const std::string& name) {
  for (LossKind k : {LossKind::kZeroOne, LossKind::kExp, LossKind::kSquared,
                     LossKind::kHinge, LossKind::kLogit, LossKind::kQHinge,
                     LossKind::kGenHinge, LossKind::kDistWeight, LossKind::kBernstein}) {
    if (name == loss_kind_name(k)) return k;
  }
  fail("unknown loss kind '" + name + "'");
}

}  // namespace

SurrogateSpec SurrogateSpec::parse(const std::string& text) {
  SurrogateSpec spec;
  const std::size_t colon = text.find(':');
  spec.kind = kind_from_name(text.substr(0, colon));
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) fail("expected key=value in loss spec: '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      try {
        if (key == "alpha") {
          spec.alpha = std::stod(value);
        } else if (key == "q") {
          spec.q = std::stod(value);
        } else if (key == "epsilon" || key == "eps") {
          spec.epsilon = std::stod(value);
        } else if (key == "K") {
          spec.bernstein_degree = std::stoi(value);
        } else if (key == "base") {
          spec.base = kind_from_name(value);
        } else {
          fail("unknown loss parameter '" + key + "'");
        }
      } catch (const std::invalid_argument&) {
        fail("bad value for loss parameter '" + key + "'");
      }
    }
  }
  spec.validate();
  return spec;
}

std::string SurrogateSpec::to_string() const {
  std::stringstream ss;
  ss << loss_kind_name(kind);
  const LossKind shown = kind == LossKind::kBernstein ? base : kind;
  ss << ':';
  if (kind == LossKind::kBernstein) {
    ss << "base=" << loss_kind_name(base) << ",K=" << bernstein_degree << ',';
  }
  switch (shown) {
    case LossKind::kExp:
    case LossKind::kSquared:
    case LossKind::kHinge:
    case LossKind::kLogit:
      ss << "alpha=" << alpha;
      break;
    case LossKind::kQHinge:
      ss << "q=" << q;
      break;
    case LossKind::kGenHinge:
    case LossKind::kDistWeight:
      ss << "epsilon=" << epsilon;
      break;
    default:
      break;
  }
  std::string out = ss.str();
  while (!out.empty() && (out.back() == ',' || out.back() == ':')) out.pop_back();
  return out;
}

BernsteinCoeffs bernstein_fit(const SurrogateSpec& base, int degree) {
  if (base.kind == LossKind::kBernstein) fail("bernstein base must not be bernstein");
  if (degree < 1) fail("bernstein degree must be >= 1");
  if (degree > 60) fail("bernstein degree capped at 60");
  base.validate();

  const std::size_t k = static_cast<std::size_t>(degree);
  // phi(u) = loss(2u - 1) sampled on the uniform lattice r / K.
  std::vector<double> diff(k + 1);
  for (std::size_t r = 0; r <= k; ++r) {
    const double u = static_cast<double>(r) / static_cast<double>(degree);
    diff[r] = closed_form_eval(base, 2.0 * u - 1.0);
  }
  const std::vector<double> binom = binomial_row(degree);
  BernsteinCoeffs out;
  out.degree = degree;
  out.c.resize(k + 1);
  // In-place forward differencing: after pass j, diff[0] = Delta^j phi(0).
  out.c[0] = diff[0];
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t r = 0; r + j <= k; ++r) diff[r] = diff[r + 1] - diff[r];
    out.c[j] = binom[j] * diff[0];
  }
  return out;
}

double bernstein_eval(const BernsteinCoeffs& coeffs, double u) {
  if (!(u >= 0.0 && u <= 1.0)) fail("bernstein evaluation needs u in [0, 1]");
  return horner(coeffs.c, u);
}

double bernstein_deriv(const BernsteinCoeffs& coeffs, double u) {
  if (!(u >= 0.0 && u <= 1.0)) fail("bernstein evaluation needs u in [0, 1]");
  return horner_deriv(coeffs.c, u);
}

LossFn::LossFn(const SurrogateSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == LossKind::kBernstein) {
    SurrogateSpec b = spec_;
    b.kind = spec_.base;
    coeffs_ = bernstein_fit(b, spec_.bernstein_degree);
  }
}

double LossFn::operator()(double t) const {
  if (spec_.kind == LossKind::kBernstein) {
    // The polynomial extends smoothly beyond u in [0,1]; risk paths only
    // ever see u inside once scores are post-softmax.
    return horner(coeffs_.c, 0.5 * (1.0 + t));
  }
  return closed_form_eval(spec_, t);
}

double LossFn::deriv(double t) const {
  if (spec_.kind == LossKind::kBernstein) {
    return 0.5 * horner_deriv(coeffs_.c, 0.5 * (1.0 + t));
  }
  return closed_form_deriv(spec_, t);
}

double loss_eval(const SurrogateSpec& spec, double t) { return LossFn(spec)(t); }

double loss_deriv(const SurrogateSpec& spec, double t) { return LossFn(spec).deriv(t); }

ConsistencyReport consistency_check(const SurrogateSpec& spec) {
  const LossFn loss(spec);
  constexpr int kPoints = 1001;
  constexpr double kLo = -3.0, kHi = 3.0;
  const double step = (kHi - kLo) / (kPoints - 1);
  const double fd_h = 0.5 * step;  // stencils overlap, so kinks are straddled

  ConsistencyReport report;
  report.differentiable_on_grid = true;
  report.convex_on_grid = true;
  report.nonincreasing_on_unit = true;

  std::vector<double> values(kPoints);
  for (int k = 0; k < kPoints; ++k) values[k] = loss(kLo + step * k);

  for (int k = 0; k < kPoints; ++k) {
    const double t = kLo + step * k;
    const double fd = (loss(t + fd_h) - loss(t - fd_h)) / (2.0 * fd_h);
    const double an = loss.deriv(t);
    if (std::abs(fd - an) > 3e-3 * std::max(1.0, std::abs(an))) {
      report.differentiable_on_grid = false;
      break;
    }
  }
  for (int k = 1; k + 1 < kPoints; ++k) {
    if (values[k - 1] - 2.0 * values[k] + values[k + 1] < -1e-8) {
      report.convex_on_grid = false;
      break;
    }
  }
  for (int k = 0; k + 1 < kPoints; ++k) {
    const double t = kLo + step * k;
    if (t < -1.0 || t + step > 1.0) continue;
    if (values[k + 1] - values[k] > 1e-12) {
      report.nonincreasing_on_unit = false;
      break;
    }
  }
  report.neg_deriv_at_zero = loss.deriv(0.0) < -1e-12;
  return report;
}

}  // namespace mauc
