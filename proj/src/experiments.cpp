#include "nws/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nws {

namespace {

double percentile(std::vector<double>& values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

bool nonzero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return true;
  }
  return false;
}

}  // namespace

std::vector<ErrorStudyRow> error_study(const ErrorStudyConfig& cfg) {
  const auto data = synth_regression(SynthKind::kSmoothAngular,
                                     cfg.n_train + cfg.n_test, cfg.dim,
                                     cfg.noise_sigma, cfg.base_seed);
  LshFamilySpec proto;
  proto.bits = cfg.bits;
  proto.dim = static_cast<unsigned>(cfg.dim);

  NwExactOracle oracle(proto);
  for (std::size_t i = 0; i < cfg.n_train; ++i) {
    oracle.add(data.features[i], data.targets[i]);
  }
  std::vector<double> truth(cfg.n_test);
  for (std::size_t j = 0; j < cfg.n_test; ++j) {
    truth[j] = oracle.predict(data.features[cfg.n_train + j]);
  }

  std::vector<ErrorStudyRow> out;
  for (unsigned r : cfg.rows) {
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(cfg.num_seeds) * cfg.n_test);
    for (unsigned s = 0; s < cfg.num_seeds; ++s) {
      LshFamilySpec spec = proto;
      spec.master_seed = cfg.base_seed * 1000003ULL + s;
      NwSketch sketch(spec, r, cfg.y_bound);
      for (std::size_t i = 0; i < cfg.n_train; ++i) {
        sketch.insert(data.features[i], data.targets[i]);
      }
      for (std::size_t j = 0; j < cfg.n_test; ++j) {
        const double est = sketch.query(data.features[cfg.n_train + j]);
        errors.push_back(std::fabs(est - truth[j]));
      }
    }
    ErrorStudyRow row;
    row.rows = r;
    row.p50 = percentile(errors, 0.50);
    row.p99 = percentile(errors, 0.99);
    row.bound = error_bound(cfg.y_bound, cfg.delta, r);
    out.push_back(row);
  }
  return out;
}

RegressBenchResult regress_bench(const TabularDataset& data,
                                 const RegressBenchConfig& cfg) {
  auto split = split_dataset(data, cfg.test_fraction, cfg.seed);
  const Standardizer std_fit = Standardizer::fit(split.train);
  std_fit.apply_in_place(split.train);
  std_fit.apply_in_place(split.test);

  RegressBenchResult result;
  const LinearPredictor ols = fit_linear_regression(split.train);
  result.ols_mse = mse(ols, split.test);

  double y_bound = 0.0;
  for (double y : split.train.targets) y_bound = std::fmax(y_bound, std::fabs(y));
  if (y_bound == 0.0) y_bound = 1.0;

  LshFamilySpec spec;
  spec.bits = cfg.bits;
  spec.dim = static_cast<unsigned>(split.train.dim());
  spec.master_seed = cfg.seed;
  for (unsigned r : cfg.rows) {
    NwSketch sketch(spec, r, y_bound);
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      if (nonzero(split.train.features[i])) {
        sketch.insert(split.train.features[i], split.train.targets[i]);
      }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      const double est = nonzero(split.test.features[i])
                             ? sketch.query(split.test.features[i])
                             : 0.0;
      const double err = est - split.test.targets[i];
      sum += err * err;
    }
    result.nws.push_back({r, sum / static_cast<double>(split.test.size())});
  }
  return result;
}

}  // namespace nws
