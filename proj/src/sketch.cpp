#include "nws/sketch.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace nws {

NwSketch::NwSketch(const LshFamilySpec& spec, unsigned rows, double y_bound,
                   EstimatorMode mode)
    : top_(spec, rows), bottom_(top_.hashers(), spec), y_bound_(y_bound),
      mode_(mode) {
  if (y_bound <= 0.0) {
    throw std::invalid_argument("NwSketch: y_bound must be positive");
  }
  if (mode.kind == EstimatorMode::kMedianOfMeans &&
      (mode.groups == 0 || mode.groups > rows)) {
    throw std::invalid_argument("NwSketch: MoM groups must be in [1, R]");
  }
}

NwSketch::NwSketch(RaceSketch top, RaceSketch bottom, double y_bound,
                   EstimatorMode mode)
    : top_(std::move(top)), bottom_(std::move(bottom)), y_bound_(y_bound),
      mode_(mode) {}

void NwSketch::insert(std::span<const double> x, double y) {
  const double clipped = std::fmin(y_bound_, std::fmax(-y_bound_, y));
  top_.increment(x, clipped);
  bottom_.increment(x, 1.0);
}

double NwSketch::query(std::span<const double> q) const {
  const std::vector<double> top_rows = top_.retrieve(q);
  const std::vector<double> bottom_rows = bottom_.retrieve(q);
  double top_agg, bottom_agg;
  if (mode_.kind == EstimatorMode::kMean) {
    top_agg = estimate_mean(top_rows);
    bottom_agg = estimate_mean(bottom_rows);
  } else {
    top_agg = estimate_mom(top_rows, mode_.groups);
    bottom_agg = estimate_mom(bottom_rows, mode_.groups);
  }
  if (bottom_agg <= 0.0) return 0.0;
  return top_agg / bottom_agg;
}

void NwSketch::decay(double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) {
    throw std::invalid_argument("NwSketch::decay: gamma must be in (0, 1]");
  }
  top_.scale(gamma);
  bottom_.scale(gamma);
}

void NwSketch::save(std::ostream& out) const {
  detail::write_f64(out, y_bound_);
  top_.save(out);
  bottom_.save(out);
}

NwSketch NwSketch::load(std::istream& in) {
  const double y_bound = detail::read_f64(in);
  if (!(y_bound > 0.0) || !std::isfinite(y_bound)) {
    throw std::runtime_error("snapshot: corrupt header");
  }
  RaceSketch top = RaceSketch::load(in);
  RaceSketch bottom = RaceSketch::load(in);
  if (top.rows() != bottom.rows() || top.width() != bottom.width() ||
      top.spec().master_seed != bottom.spec().master_seed) {
    throw std::runtime_error("snapshot: top/bottom sketch mismatch");
  }
  return NwSketch(std::move(top), std::move(bottom), y_bound,
                  EstimatorMode::mean());
}

NwSketch construct(std::span<const std::vector<double>> xs,
                   std::span<const double> ys, const LshFamilySpec& spec,
                   unsigned rows, double y_bound, EstimatorMode mode) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("construct: xs/ys length mismatch");
  }
  NwSketch sketch(spec, rows, y_bound, mode);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sketch.insert(xs[i], ys[i]);
  }
  return sketch;
}

void NwExactOracle::add(std::vector<double> x, double y) {
  xs_.push_back(std::move(x));
  ys_.push_back(y);
}

double NwExactOracle::predict(std::span<const double> q) const {
  double num = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double k = collision_kernel(spec_, xs_[i], q);
    num += ys_[i] * k;
    denom += k;
  }
  if (denom <= 0.0) return 0.0;
  return num / denom;
}

std::uint64_t rows_for_error(double y_bound, double eps, double delta) {
  if (y_bound <= 0.0) {
    throw std::invalid_argument("rows_for_error: B must be positive");
  }
  if (!(eps > 0.0) || eps >= 1.0) {
    throw std::invalid_argument("rows_for_error: eps must be in (0, 1)");
  }
  if (!(delta > 0.0) || delta >= 1.0) {
    throw std::invalid_argument("rows_for_error: delta must be in (0, 1)");
  }
  const double b = y_bound;
  const double value =
      32.0 * b * b * (b + 2.0) * (b + 2.0) / (eps * eps) * std::log(1.0 / delta);
  return static_cast<std::uint64_t>(std::ceil(value));
}

double error_bound(double y_bound, double delta, std::uint64_t rows) {
  if (y_bound <= 0.0 || !(delta > 0.0) || delta >= 1.0 || rows == 0) {
    throw std::invalid_argument("error_bound: invalid parameters");
  }
  const double b = y_bound;
  return b * std::sqrt(32.0 * std::log(1.0 / delta) * (b + 1.0) /
                       static_cast<double>(rows));
}

}  // namespace nws
