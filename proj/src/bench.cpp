#include "mauc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "mauc/dataset.hpp"
#include "mauc/kernels.hpp"
#include "mauc/model.hpp"
#include "mauc/rng.hpp"

namespace mauc {

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

template <typename F>
double time_ms(const F& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  cfg.spec.validate();
  if (cfg.trials < 1) throw std::runtime_error("bench needs at least 1 trial");
  if (cfg.rho.size() != static_cast<std::size_t>(cfg.nc)) {
    throw std::runtime_error("bench rho length must equal nc");
  }
  for (std::size_t k = 1; k < cfg.sizes.size(); ++k) {
    if (cfg.sizes[k] <= cfg.sizes[k - 1]) {
      throw std::runtime_error("bench sizes must be ascending");
    }
  }

  std::vector<BenchRow> rows;
  for (int n : cfg.sizes) {
    if (n > cfg.naive_cap) {
      throw std::runtime_error("size " + std::to_string(n) +
                               " exceeds the naive-path cap of " +
                               std::to_string(cfg.naive_cap));
    }
    const Dataset ds = synth_uniform(static_cast<std::size_t>(n),
                                     static_cast<std::size_t>(cfg.d), cfg.rho,
                                     cfg.seed + static_cast<std::uint64_t>(n));
    const ClassIndex idx = build_index(ds);

    Rng rng(cfg.seed ^ 0xB0B0B0B0ULL);
    LinearSoftmaxModel model = LinearSoftmaxModel::zeros(cfg.nc, ds.dim());
    for (double& w : model.weights.data()) w = rng.uniform01();
    const ScoreMatrix scores = score(model, ds.features);

    volatile double sink = 0.0;  // keep the timed calls observable
    auto naive_once = [&] {
      FastRiskOutput out = dispatch_fast(scores, idx, cfg.spec, cfg.with_grad, true);
      sink = sink + out.loss.value;
    };
    auto fast_once = [&] {
      FastRiskOutput out = dispatch_fast(scores, idx, cfg.spec, cfg.with_grad, false);
      sink = sink + out.loss.value;
    };

    naive_once();  // warm-up, discarded
    fast_once();
    std::vector<double> naive_times, fast_times;
    for (int t = 0; t < cfg.trials; ++t) naive_times.push_back(time_ms(naive_once));
    for (int t = 0; t < cfg.trials; ++t) fast_times.push_back(time_ms(fast_once));

    BenchRow row;
    row.loss = cfg.spec.to_string();
    row.n = n;
    row.nc = cfg.nc;
    row.d = cfg.d;
    row.trials = cfg.trials;
    row.naive_ms = median(naive_times);
    row.fast_ms = median(fast_times);
    row.ratio = row.naive_ms / std::max(row.fast_ms, 1e-9);
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "loss,N,nc,d,trials,naive_ms,fast_ms,ratio\n";
  char buf[256];
  for (const BenchRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%.6g,%.6g,%.6g\n",
                  row.loss.c_str(), row.n, row.nc, row.d, row.trials, row.naive_ms,
                  row.fast_ms, row.ratio);
    out << buf;
  }
}

void write_bench_json(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "[\n";
  char buf[320];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const BenchRow& row = rows[k];
    std::snprintf(buf, sizeof(buf),
                  "  {\"loss\": \"%s\", \"N\": %d, \"nc\": %d, \"d\": %d, "
                  "\"trials\": %d, \"naive_ms\": %.6g, \"fast_ms\": %.6g, "
                  "\"ratio\": %.6g}%s\n",
                  row.loss.c_str(), row.n, row.nc, row.d, row.trials, row.naive_ms,
                  row.fast_ms, row.ratio, k + 1 < rows.size() ? "," : "");
    out << buf;
  }
  out << "]\n";
}

}  // namespace mauc
