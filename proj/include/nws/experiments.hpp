#pragma once

#include <cstdint>
#include <vector>

#include "nws/data.hpp"
#include "nws/sketch.hpp"

namespace nws {

struct ErrorStudyConfig {
  unsigned bits = 6;
  std::vector<unsigned> rows = {10, 20, 50, 100, 200, 800};
  double delta = 0.01;
  std::size_t n_train = 300;
  std::size_t n_test = 100;
  unsigned num_seeds = 10;
  std::size_t dim = 5;
  double noise_sigma = 0.05;
  double y_bound = 1.5;
  std::uint64_t base_seed = 0;
};

struct ErrorStudyRow {
  unsigned rows = 0;
  double p50 = 0.0;
  double p99 = 0.0;
  double bound = 0.0;
};

// Sketch-vs-exact-oracle error quantiles on the smooth-angular synthetic
// task, pooled over independently seeded sketches, next to the theoretical
// bound at each R.
std::vector<ErrorStudyRow> error_study(const ErrorStudyConfig& cfg);

struct RegressBenchConfig {
  unsigned bits = 8;
  std::vector<unsigned> rows = {10, 20, 50, 100, 200};
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct RegressBenchRow {
  unsigned rows = 0;
  double nws_mse = 0.0;
};

struct RegressBenchResult {
  double ols_mse = 0.0;
  std::vector<RegressBenchRow> nws;
};

// OLS baseline vs the sketch at each R on a standardized train/test split.
RegressBenchResult regress_bench(const TabularDataset& data,
                                 const RegressBenchConfig& cfg);

}  // namespace nws
