#pragma once

#include <string>
#include <vector>

#include "mauc/matrix.hpp"

namespace mauc {

/*!
 * \brief Linear scorer with softmax output: row m of the score matrix is
 *        softmax(W x_m + b).
 */
struct LinearSoftmaxModel {
  Matrix weights;            // N_C x d
  std::vector<double> bias;  // N_C, all zero when has_bias is false
  bool has_bias = true;

  int n_classes() const { return static_cast<int>(weights.rows()); }
  std::size_t dim() const { return weights.cols(); }

  static LinearSoftmaxModel zeros(int n_classes, std::size_t dim, bool with_bias = true);

  // Flat text format: "N_C d" header, row-major W, then b, 17 significant
  // digits. Round-trips doubles exactly.
  void save(const std::string& path) const;
  static LinearSoftmaxModel load(const std::string& path);
};

// Softmax scores, numerically stabilized by row-max subtraction. Rows sum
// to 1; throws if parameters or features produce non-finite logits.
ScoreMatrix score(const LinearSoftmaxModel& model, const Matrix& features);

struct ParamGradient {
  Matrix weights;            // N_C x d
  std::vector<double> bias;  // N_C
};

// Chain rule from a score-space gradient back to the parameters: per sample,
// dlogits = J^T g with J the softmax Jacobian at that row, then
// dW = sum_m dlogits_m x_m^T and db = sum_m dlogits_m.
ParamGradient backprop(const LinearSoftmaxModel& model, const Matrix& features,
                       const ScoreMatrix& scores, const ScoreGradient& g);

}  // namespace mauc
