#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nws {

struct TabularDataset {
  std::vector<std::vector<double>> features;  // N rows of d columns
  std::vector<double> targets;                // regression values or labels

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features[0].size(); }
};

struct TrainTestSplit {
  TabularDataset train;
  TabularDataset test;
};

// All non-target columns become features, in file order. Rows with
// unparseable cells are rejected with the 1-based row number in the message.
TabularDataset load_csv(const std::string& path, std::size_t target_column,
                        bool has_header);

void write_csv(const TabularDataset& data, const std::string& path);

enum class SynthKind { kSmoothAngular, kStep };

// y = f(x) + N(0, sigma^2) with x ~ N(0, I) and f a function of the
// direction of x only, so the SRP kernel is informative:
//   smooth-angular: f(x) = sin(3 * <x, u> / |x|)
//   step:           f(x) = sign(<x, u>)
// Both are bounded by 1 before noise. u is the first coordinate axis.
TabularDataset synth_regression(SynthKind kind, std::size_t n, std::size_t dim,
                                double noise_sigma, std::uint64_t seed);

// Two Gaussian classes at +-(separation/2) along the first axis, labels
// flipped independently with the given noise rate.
TabularDataset synth_classification(std::size_t n, std::size_t dim,
                                    double separation, double label_noise,
                                    std::uint64_t seed);

// Deterministic shuffled split; test gets round(n * test_fraction) rows.
TrainTestSplit split_dataset(const TabularDataset& data, double test_fraction,
                             std::uint64_t seed);

// Per-column affine transform fitted on the training split and applied to
// both. Constant columns are left centered with unit denominator.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(const TabularDataset& train);
  std::vector<double> apply(const std::vector<double>& row) const;
  void apply_in_place(TabularDataset& data) const;
};

// Ordinary least squares with intercept; rank-deficient systems are
// resolved by a pseudo-inverse with a relative singular value cutoff.
struct LinearPredictor {
  std::vector<double> weights;
  double intercept = 0.0;

  double predict(const std::vector<double>& x) const;
};

LinearPredictor fit_linear_regression(const TabularDataset& train);

double mse(const LinearPredictor& model, const TabularDataset& test);

}  // namespace nws
