#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mauc/surrogate.hpp"

namespace mauc {

struct BenchRow {
  std::string loss;
  int n = 0;
  int nc = 0;
  int d = 0;
  int trials = 0;
  double naive_ms = 0.0;
  double fast_ms = 0.0;
  double ratio = 0.0;  // naive / fast
};

/*!
 * \brief Timing protocol: synthetic uniform features, a fixed random linear
 *        softmax scorer, then naive vs accelerated evaluation of the same
 *        loss. Monotonic clock, one warm-up run discarded, median of
 *        `trials` reported. Runs strictly sequentially.
 */
struct BenchConfig {
  SurrogateSpec spec;
  std::vector<int> sizes = {32, 64, 128, 256, 512, 1024};
  int nc = 5;
  int d = 100;
  std::vector<double> rho = {0.2, 0.1, 0.2, 0.4, 0.1};
  int trials = 5;
  std::uint64_t seed = 0;
  bool with_grad = false;
  int naive_cap = 8192;  // refuse the quadratic path beyond this
};

std::vector<BenchRow> run_bench(const BenchConfig& cfg);

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);
void write_bench_json(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace mauc
