#include "nws/data.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nws {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    }
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

TabularDataset load_csv(const std::string& path, std::size_t target_column,
                        bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open " + path);
  }
  TabularDataset data;
  std::string line;
  std::size_t row_number = 0;
  bool skipped_header = !has_header;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    const auto cells = split_line(line, ',');
    if (target_column >= cells.size()) {
      throw std::runtime_error("load_csv: row " + std::to_string(row_number) +
                               " has no column " + std::to_string(target_column));
    }
    std::vector<double> row;
    row.reserve(cells.size() - 1);
    double target = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_double(cells[c], v)) {
        throw std::runtime_error("load_csv: unparseable cell at row " +
                                 std::to_string(row_number) + ", column " +
                                 std::to_string(c));
      }
      if (c == target_column) {
        target = v;
      } else {
        row.push_back(v);
      }
    }
    if (!data.features.empty() && row.size() != data.features[0].size()) {
      throw std::runtime_error("load_csv: ragged row " +
                               std::to_string(row_number));
    }
    data.features.push_back(std::move(row));
    data.targets.push_back(target);
  }
  if (data.features.empty()) {
    throw std::runtime_error("load_csv: no data rows in " + path);
  }
  return data;
}

void write_csv(const TabularDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features[i]) out << v << ',';
    out << data.targets[i] << '\n';
  }
}

TabularDataset synth_regression(SynthKind kind, std::size_t n, std::size_t dim,
                                double noise_sigma, std::uint64_t seed) {
  if (n == 0 || dim == 0) {
    throw std::invalid_argument("synth_regression: n and dim must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TabularDataset data;
  data.features.reserve(n);
  data.targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : x) {
        v = gauss(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    const double cosine = x[0] / std::sqrt(norm);
    double f;
    if (kind == SynthKind::kSmoothAngular) {
      f = std::sin(3.0 * cosine);
    } else {
      f = x[0] >= 0.0 ? 1.0 : -1.0;
    }
    double y = f;
    if (noise_sigma > 0.0) y += noise_sigma * gauss(rng);
    data.features.push_back(std::move(x));
    data.targets.push_back(y);
  }
  return data;
}

TabularDataset synth_classification(std::size_t n, std::size_t dim,
                                    double separation, double label_noise,
                                    std::uint64_t seed) {
  if (n == 0 || dim == 0) {
    throw std::invalid_argument("synth_classification: n and dim must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TabularDataset data;
  data.features.reserve(n);
  data.targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = unit(rng) < 0.5 ? 0 : 1;
    const double center = (label == 0 ? -0.5 : 0.5) * separation;
    std::vector<double> x(dim);
    for (double& v : x) v = gauss(rng);
    x[0] += center;
    int observed = label;
    if (label_noise > 0.0 && unit(rng) < label_noise) observed = 1 - observed;
    data.features.push_back(std::move(x));
    data.targets.push_back(static_cast<double>(observed));
  }
  return data;
}

TrainTestSplit split_dataset(const TabularDataset& data, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction >= 0.0) || test_fraction >= 1.0) {
    throw std::invalid_argument("split_dataset: test_fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_test =
      static_cast<std::size_t>(std::lround(test_fraction * data.size()));
  TrainTestSplit out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    TabularDataset& dst = i < n_test ? out.test : out.train;
    dst.features.push_back(data.features[order[i]]);
    dst.targets.push_back(data.targets[order[i]]);
  }
  return out;
}

Standardizer Standardizer::fit(const TabularDataset& train) {
  const std::size_t d = train.dim();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  if (train.size() == 0) return s;
  for (const auto& row : train.features) {
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= static_cast<double>(train.size());
  std::vector<double> var(d, 0.0);
  for (const auto& row : train.features) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = row[c] - s.mean[c];
      var[c] += dev * dev;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(train.size()));
    s.stddev[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& row) const {
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    out[c] = (row[c] - mean[c]) / stddev[c];
  }
  return out;
}

void Standardizer::apply_in_place(TabularDataset& data) const {
  for (auto& row : data.features) row = apply(row);
}

double LinearPredictor::predict(const std::vector<double>& x) const {
  double y = intercept;
  for (std::size_t c = 0; c < weights.size(); ++c) y += weights[c] * x[c];
  return y;
}

LinearPredictor fit_linear_regression(const TabularDataset& train) {
  const std::size_t n = train.size();
  const std::size_t d = train.dim();
  if (n == 0) {
    throw std::invalid_argument("fit_linear_regression: empty dataset");
  }
  Eigen::MatrixXd design(n, d + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t c = 0; c < d; ++c) design(i, c + 1) = train.features[i][c];
    y(i) = train.targets[i];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(1e-12);
  const Eigen::VectorXd beta = cod.solve(y);
  LinearPredictor model;
  model.intercept = beta(0);
  model.weights.resize(d);
  for (std::size_t c = 0; c < d; ++c) model.weights[c] = beta(c + 1);
  return model;
}

double mse(const LinearPredictor& model, const TabularDataset& test) {
  if (test.size() == 0) {
    throw std::invalid_argument("mse: empty test set");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double r = model.predict(test.features[i]) - test.targets[i];
    sum += r * r;
  }
  return sum / static_cast<double>(test.size());
}

}  // namespace nws
