#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mauc/dataset.hpp"
#include "mauc/model.hpp"
#include "mauc/surrogate.hpp"

namespace mauc {

/*!
 * \brief Training hyperparameters. `batch` 0 means full batch; weight decay
 *        is the L2 coefficient on W (bias excluded).
 */
struct TrainConfig {
  double lr = 1.0;
  double momentum = 0.9;
  double weight_decay = 0.0;
  int epochs = 100;
  int batch = 0;          // 0 = full batch
  double lr_decay = 1.0;  // multiplicative, per epoch
  std::uint64_t seed = 0;
  int eval_every = 10;    // epochs between validation evaluations
  bool with_bias = true;

  void validate() const;
};

struct TraceRow {
  int epoch = 0;
  double risk = 0.0;      // surrogate risk on the training set
  double val_mauc = 0.0;  // NaN on epochs without a validation pass
  double lr = 0.0;
};

struct TrainResult {
  LinearSoftmaxModel model;
  std::vector<TraceRow> trace;
};

/*!
 * \brief Empirical surrogate risk minimization with Nesterov-style momentum:
 *        v <- mu v - lr grad, W <- W + mu v - lr grad. Mini-batch mode draws
 *        stratified batches, reweights pairs by within-batch counts, and
 *        skips class pairs absent from a batch. Deterministic per seed.
 */
TrainResult train(const Dataset& train_set, const Dataset& valid_set,
                  const SurrogateSpec& spec, const TrainConfig& cfg);

// Same loop with the per-sample multiclass cross-entropy objective.
TrainResult train_ce_baseline(const Dataset& train_set, const Dataset& valid_set,
                              const TrainConfig& cfg);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace mauc
