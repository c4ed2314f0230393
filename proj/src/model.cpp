#include "mauc/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mauc {

LinearSoftmaxModel LinearSoftmaxModel::zeros(int n_classes, std::size_t dim,
                                             bool with_bias) {
  LinearSoftmaxModel m;
  m.weights = Matrix(static_cast<std::size_t>(n_classes), dim, 0.0);
  m.bias.assign(static_cast<std::size_t>(n_classes), 0.0);
  m.has_bias = with_bias;
  return m;
}

void LinearSoftmaxModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << n_classes() << ' ' << dim() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    for (std::size_t c = 0; c < weights.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", weights(r, c));
      out << buf << (c + 1 < weights.cols() ? ' ' : '\n');
    }
  }
  for (std::size_t i = 0; i < bias.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", bias[i]);
    out << buf << (i + 1 < bias.size() ? ' ' : '\n');
  }
}

LinearSoftmaxModel LinearSoftmaxModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int nc = 0;
  std::size_t d = 0;
  if (!(in >> nc >> d) || nc < 2 || d < 1) {
    throw std::runtime_error("bad model header in " + path);
  }
  LinearSoftmaxModel m = zeros(nc, d);
  for (std::size_t r = 0; r < m.weights.rows(); ++r) {
    for (std::size_t c = 0; c < m.weights.cols(); ++c) {
      if (!(in >> m.weights(r, c))) throw std::runtime_error("truncated model " + path);
    }
  }
  for (double& b : m.bias) {
    if (!(in >> b)) throw std::runtime_error("truncated model " + path);
  }
  return m;
}

ScoreMatrix score(const LinearSoftmaxModel& model, const Matrix& features) {
  if (features.cols() != model.dim()) {
    throw std::runtime_error("feature dimension does not match model");
  }
  const std::size_t n = features.rows();
  const std::size_t nc = model.weights.rows();
  ScoreMatrix out(n, nc);
  std::vector<double> logits(nc);
  for (std::size_t m = 0; m < n; ++m) {
    const auto x = features.row(m);
    for (std::size_t i = 0; i < nc; ++i) {
      double acc = model.bias[i];
      const auto w = model.weights.row(i);
      for (std::size_t c = 0; c < x.size(); ++c) acc += w[c] * x[c];
      logits[i] = acc;
    }
    double peak = logits[0];
    for (double v : logits) peak = std::max(peak, v);
    if (!std::isfinite(peak)) {
      throw std::runtime_error("non-finite logits (parameter blow-up)");
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      logits[i] = std::exp(logits[i] - peak);
      denom += logits[i];
    }
    for (std::size_t i = 0; i < nc; ++i) out(m, i) = logits[i] / denom;
  }
  return out;
}

ParamGradient backprop(const LinearSoftmaxModel& model, const Matrix& features,
                       const ScoreMatrix& scores, const ScoreGradient& g) {
  if (!scores.same_shape(g) || scores.rows() != features.rows() ||
      scores.cols() != model.weights.rows() || features.cols() != model.dim()) {
    throw std::runtime_error("backprop shape mismatch");
  }
  const std::size_t n = features.rows();
  const std::size_t nc = scores.cols();

  ParamGradient out;
  out.weights = Matrix(nc, model.dim(), 0.0);
  out.bias.assign(nc, 0.0);
  std::vector<double> dlogits(nc);
  for (std::size_t m = 0; m < n; ++m) {
    const auto s = scores.row(m);
    const auto gm = g.row(m);
    double inner = 0.0;
    for (std::size_t i = 0; i < nc; ++i) inner += gm[i] * s[i];
    // J^T g for the softmax Jacobian: s_j * (g_j - <g, s>).
    for (std::size_t j = 0; j < nc; ++j) dlogits[j] = s[j] * (gm[j] - inner);

    const auto x = features.row(m);
    for (std::size_t j = 0; j < nc; ++j) {
      if (dlogits[j] == 0.0) continue;
      auto wrow = out.weights.row(j);
      for (std::size_t c = 0; c < x.size(); ++c) wrow[c] += dlogits[j] * x[c];
      out.bias[j] += dlogits[j];
    }
  }
  return out;
}

}  // namespace mauc
