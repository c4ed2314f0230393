#include "mauc/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "mauc/kernels.hpp"
#include "mauc/metrics.hpp"
#include "mauc/rng.hpp"

namespace mauc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (risk, score-space gradient) for the current scores of one batch.
using RiskEval = std::function<double(const ScoreMatrix&, const std::vector<int>&,
                                      ScoreGradient&)>;

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
  Matrix out(rows.size(), src.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto s = static_cast<std::size_t>(rows[r]);
    for (std::size_t c = 0; c < src.cols(); ++c) out(r, c) = src(s, c);
  }
  return out;
}

double validation_mauc(const LinearSoftmaxModel& model, const Dataset& valid_set) {
  const ScoreMatrix scores = score(model, valid_set.features);
  return mauc_ovo(pair_auc_all(scores, build_index(valid_set)));
}

// Splits each class pool into `n_batches` nearly-equal chunks; batch b is the
// union of the b-th chunks, so batches stay stratified. Pools are shuffled
// per epoch by the caller.
std::vector<std::vector<int>> stratified_batches(
    const std::vector<std::vector<int>>& pools, int n_batches) {
  std::vector<std::vector<int>> batches(static_cast<std::size_t>(n_batches));
  for (const std::vector<int>& pool : pools) {
    const std::size_t n = pool.size();
    std::size_t at = 0;
    for (int b = 0; b < n_batches; ++b) {
      const std::size_t take =
          n / static_cast<std::size_t>(n_batches) +
          (static_cast<std::size_t>(b) < n % static_cast<std::size_t>(n_batches) ? 1 : 0);
      for (std::size_t k = 0; k < take; ++k) {
        batches[static_cast<std::size_t>(b)].push_back(pool[at++]);
      }
    }
  }
  return batches;
}

TrainResult run_training(const Dataset& train_set, const Dataset& valid_set,
                         const TrainConfig& cfg, const RiskEval& eval) {
  cfg.validate();
  if (train_set.dim() != valid_set.dim() || train_set.n_classes != valid_set.n_classes) {
    throw std::runtime_error("train and validation sets must agree on shape");
  }

  Rng rng(cfg.seed);
  Rng init_rng = rng.split(1);
  LinearSoftmaxModel model =
      LinearSoftmaxModel::zeros(train_set.n_classes, train_set.dim(), cfg.with_bias);
  for (double& w : model.weights.data()) w = 0.01 * init_rng.normal();

  Matrix vel_w(model.weights.rows(), model.weights.cols(), 0.0);
  std::vector<double> vel_b(model.bias.size(), 0.0);

  const std::size_t n = train_set.size();
  const int n_batches =
      cfg.batch == 0 ? 1
                     : static_cast<int>((n + static_cast<std::size_t>(cfg.batch) - 1) /
                                        static_cast<std::size_t>(cfg.batch));
  const ClassIndex full_idx = build_index(train_set);

  std::vector<int> all_rows(n);
  for (std::size_t r = 0; r < n; ++r) all_rows[r] = static_cast<int>(r);

  TrainResult result;
  double lr = cfg.lr;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::vector<int>> batches;
    if (n_batches == 1) {
      batches.push_back(all_rows);
    } else {
      std::vector<std::vector<int>> pools = full_idx.members;
      for (auto& pool : pools) rng.shuffle(pool);
      batches = stratified_batches(pools, n_batches);
      for (int attempt = 0;; ++attempt) {
        bool ok = true;
        for (const auto& batch : batches) {
          std::vector<bool> seen(static_cast<std::size_t>(train_set.n_classes), false);
          int present = 0;
          for (int r : batch) {
            if (!seen[static_cast<std::size_t>(train_set.labels[r])]) {
              seen[static_cast<std::size_t>(train_set.labels[r])] = true;
              ++present;
            }
          }
          if (present < 2) ok = false;
        }
        if (ok) break;
        if (attempt >= 10) {
          throw std::runtime_error("could not draw a batch with at least 2 classes");
        }
        for (auto& pool : pools) rng.shuffle(pool);
        batches = stratified_batches(pools, n_batches);
      }
    }

    for (const std::vector<int>& batch : batches) {
      const Matrix x = n_batches == 1 ? train_set.features : gather_rows(train_set.features, batch);
      std::vector<int> labels(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        labels[r] = train_set.labels[batch[r]];
      }

      const ScoreMatrix scores = score(model, x);
      ScoreGradient g(scores.rows(), scores.cols(), 0.0);
      const double risk = eval(scores, labels, g);
      if (!std::isfinite(risk)) throw std::runtime_error("training diverged: non-finite risk");

      ParamGradient pg = backprop(model, x, scores, g);
      if (cfg.weight_decay > 0.0) {
        auto w = model.weights.data();
        auto gw = pg.weights.data();
        for (std::size_t k = 0; k < w.size(); ++k) gw[k] += 2.0 * cfg.weight_decay * w[k];
      }

      // Nesterov-style lookahead update.
      {
        auto v = vel_w.data();
        auto gw = pg.weights.data();
        auto w = model.weights.data();
        for (std::size_t k = 0; k < w.size(); ++k) {
          v[k] = cfg.momentum * v[k] - lr * gw[k];
          w[k] += cfg.momentum * v[k] - lr * gw[k];
        }
      }
      if (cfg.with_bias) {
        for (std::size_t k = 0; k < model.bias.size(); ++k) {
          vel_b[k] = cfg.momentum * vel_b[k] - lr * pg.bias[k];
          model.bias[k] += cfg.momentum * vel_b[k] - lr * pg.bias[k];
        }
      }
    }

    TraceRow row;
    row.epoch = epoch;
    row.lr = lr;
    {
      const ScoreMatrix scores = score(model, train_set.features);
      ScoreGradient unused;  // empty: evaluation only
      row.risk = eval(scores, train_set.labels, unused);
      if (!std::isfinite(row.risk)) {
        throw std::runtime_error("training diverged: non-finite risk");
      }
    }
    row.val_mauc = (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)
                       ? validation_mauc(model, valid_set)
                       : kNaN;
    result.trace.push_back(row);
    lr *= cfg.lr_decay;
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw std::runtime_error("lr must be nonnegative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::runtime_error("momentum must be in [0, 1)");
  if (weight_decay < 0.0) throw std::runtime_error("weight decay must be nonnegative");
  if (epochs < 1) throw std::runtime_error("epochs must be positive");
  if (batch < 0) throw std::runtime_error("batch must be 0 (full) or positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::runtime_error("lr_decay must be in (0, 1]");
  if (eval_every < 1) throw std::runtime_error("eval_every must be positive");
}

TrainResult train(const Dataset& train_set, const Dataset& valid_set,
                  const SurrogateSpec& spec, const TrainConfig& cfg) {
  spec.validate();
  const int nc = train_set.n_classes;
  RiskEval eval = [&spec, nc](const ScoreMatrix& scores, const std::vector<int>& labels,
                              ScoreGradient& g) {
    const ClassIndex idx = build_index_allow_empty(labels, nc);
    const bool want_grad = g.rows() == scores.rows();
    FastRiskOutput out = dispatch_fast(scores, idx, spec, want_grad);
    if (want_grad && out.grad) g = std::move(*out.grad);
    return out.loss.value;
  };
  return run_training(train_set, valid_set, cfg, eval);
}

TrainResult train_ce_baseline(const Dataset& train_set, const Dataset& valid_set,
                              const TrainConfig& cfg) {
  RiskEval eval = [](const ScoreMatrix& scores, const std::vector<int>& labels,
                     ScoreGradient& g) {
    const bool want_grad = g.rows() == scores.rows();
    const double inv_n = 1.0 / static_cast<double>(labels.size());
    double loss = 0.0;
    for (std::size_t m = 0; m < labels.size(); ++m) {
      const double sy = scores(m, static_cast<std::size_t>(labels[m]));
      loss -= inv_n * std::log(std::max(sy, 1e-300));
      // Score-space gradient of -log s_y; composed with the softmax
      // Jacobian in backprop this yields (s - onehot) / N on the logits.
      if (want_grad) g(m, static_cast<std::size_t>(labels[m])) = -inv_n / sy;
    }
    return loss;
  };
  return run_training(train_set, valid_set, cfg, eval);
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "epoch,risk,val_mauc,lr\n";
  char buf[160];
  for (const TraceRow& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.epoch, row.risk,
                  row.val_mauc, row.lr);
    out << buf;
  }
}

}  // namespace mauc
