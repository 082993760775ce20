#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nws/race.hpp"

namespace nws {

struct EstimatorMode {
  enum Kind { kMean, kMedianOfMeans } kind = kMean;
  unsigned groups = 9;  // used by kMedianOfMeans only

  static EstimatorMode mean() { return {kMean, 0}; }
  static EstimatorMode median_of_means(unsigned m) { return {kMedianOfMeans, m}; }
};

// Paired weighted/unweighted RACE sketches over shared hash functions.
// The weighted sketch accumulates clipped y values, the unweighted one
// accumulates 1 per point; the ratio of their aggregated row values
// estimates the kernel regression response at a query.
class NwSketch {
 public:
  NwSketch(const LshFamilySpec& spec, unsigned rows, double y_bound,
           EstimatorMode mode = EstimatorMode::mean());

  // Inserts (x, clip(y, -B, B)) into both sketches at the shared buckets.
  void insert(std::span<const double> x, double y);

  // Aggregate top and bottom rows independently, then divide.
  // Returns 0 whenever the bottom aggregate is <= 0.
  double query(std::span<const double> q) const;

  void decay(double gamma);

  const RaceSketch& top() const { return top_; }
  const RaceSketch& bottom() const { return bottom_; }
  double y_bound() const { return y_bound_; }
  unsigned rows() const { return top_.rows(); }
  const LshFamilySpec& spec() const { return top_.spec(); }
  EstimatorMode mode() const { return mode_; }
  void set_mode(EstimatorMode mode) { mode_ = mode; }

  void save(std::ostream& out) const;
  static NwSketch load(std::istream& in);

 private:
  NwSketch(RaceSketch top, RaceSketch bottom, double y_bound, EstimatorMode mode);

  RaceSketch top_;     // S_t, sum of clipped y per bucket
  RaceSketch bottom_;  // S_b, point count per bucket
  double y_bound_;
  EstimatorMode mode_;
};

// Bulk build; identical to inserting each pair in order into a fresh sketch.
NwSketch construct(std::span<const std::vector<double>> xs,
                   std::span<const double> ys, const LshFamilySpec& spec,
                   unsigned rows, double y_bound,
                   EstimatorMode mode = EstimatorMode::mean());

// Exact kernel regression over the stored pairs with the analytic SRP
// collision kernel. O(N*d) per query; the reference the sketch is
// checked against.
class NwExactOracle {
 public:
  explicit NwExactOracle(LshFamilySpec spec) : spec_(spec) {}

  void add(std::vector<double> x, double y);
  double predict(std::span<const double> q) const;
  std::size_t size() const { return xs_.size(); }

 private:
  LshFamilySpec spec_;
  std::vector<std::vector<double>> xs_;
  std::vector<double> ys_;
};

// Row count for additive error eps at confidence 1 - delta:
// ceil(32 B^2 (B+2)^2 / eps^2 * ln(1/delta)). Requires eps < 1.
std::uint64_t rows_for_error(double y_bound, double eps, double delta);

// High-probability additive error at R rows: B * sqrt(32 ln(1/delta) (B+1) / R).
double error_bound(double y_bound, double delta, std::uint64_t rows);

}  // namespace nws
