#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nws/data.hpp"

using namespace nws;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = (std::filesystem::temp_directory_path() /
            ("nws_test_" + std::to_string(std::rand()) + ".csv"))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Independent normal-equations solver (Gaussian elimination with partial
// pivoting) used as the cross-check for the least-squares fit.
std::vector<double> solve_normal_equations(const TabularDataset& data) {
  const std::size_t d = data.dim() + 1;  // intercept first
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> row(d);
    row[0] = 1.0;
    for (std::size_t c = 0; c < data.dim(); ++c) row[c + 1] = data.features[i][c];
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) a[p][q] += row[p] * row[q];
      a[p][d] += row[p] * data.targets[i];
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t q = col; q <= d; ++q) a[r][q] -= f * a[col][q];
    }
  }
  std::vector<double> beta(d);
  for (std::size_t r = 0; r < d; ++r) beta[r] = a[r][d] / a[r][r];
  return beta;
}

double train_mse(const LinearPredictor& model, const TabularDataset& data) {
  return mse(model, data);
}

}  // namespace

TEST_CASE("load_csv") {
  SUBCASE("hand-written rows load exactly") {
    TempFile f("1,2,3\n4,5,6\n7,8,9\n");
    const auto data = load_csv(f.path, 2, false);
    REQUIRE(data.size() == 3);
    REQUIRE(data.dim() == 2);
    CHECK(data.features[0] == std::vector<double>{1, 2});
    CHECK(data.features[2] == std::vector<double>{7, 8});
    CHECK(data.targets == std::vector<double>{3, 6, 9});
  }
  SUBCASE("header toggling shifts the row count by one") {
    TempFile f("a,b,y\n1,2,3\n4,5,6\n");
    CHECK(load_csv(f.path, 2, true).size() == 2);
    CHECK_THROWS(load_csv(f.path, 2, false));  // header row is not numeric
  }
  SUBCASE("unparseable cell reports the row number") {
    TempFile f("1,2,3\n4,oops,6\n");
    try {
      load_csv(f.path, 2, false);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("missing and empty files rejected") {
    CHECK_THROWS(load_csv("/nonexistent/file.csv", 0, false));
    TempFile f("");
    CHECK_THROWS(load_csv(f.path, 0, false));
  }
  SUBCASE("round-trip through write_csv is bit-equal") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TabularDataset data;
    for (int i = 0; i < 40; ++i) {
      data.features.push_back({gauss(rng), gauss(rng), gauss(rng)});
      data.targets.push_back(gauss(rng));
    }
    TempFile f("");
    write_csv(data, f.path);
    const auto loaded = load_csv(f.path, 3, false);
    CHECK(loaded.features == data.features);
    CHECK(loaded.targets == data.targets);
  }
}

TEST_CASE("synth_regression") {
  SUBCASE("noiseless step function is reproducible bitwise") {
    const auto a = synth_regression(SynthKind::kStep, 100, 4, 0.0, 9);
    const auto b = synth_regression(SynthKind::kStep, 100, 4, 0.0, 9);
    CHECK(a.features == b.features);
    CHECK(a.targets == b.targets);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.targets[i] == (a.features[i][0] >= 0.0 ? 1.0 : -1.0));
    }
  }
  SUBCASE("f is bounded by 1 so B is known exactly") {
    const auto d = synth_regression(SynthKind::kSmoothAngular, 5000, 3, 0.0, 2);
    for (double y : d.targets) CHECK(std::fabs(y) <= 1.0);
  }
  SUBCASE("noise averages to zero by the law of large numbers") {
    const std::size_t n = 100000;
    const double sigma = 0.5;
    const auto noisy =
        synth_regression(SynthKind::kSmoothAngular, n, 3, sigma, 3);
    // Residual mean: reconstruct f from the features.
    double mean_eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = noisy.features[i];
      const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      mean_eps += noisy.targets[i] - std::sin(3.0 * x[0] / norm);
    }
    mean_eps /= static_cast<double>(n);
    CHECK(std::fabs(mean_eps) <= 3.0 * sigma / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("synth_classification") {
  SUBCASE("deterministic under seed with balanced classes") {
    const auto a = synth_classification(4000, 5, 2.0, 0.0, 4);
    const auto b = synth_classification(4000, 5, 2.0, 0.0, 4);
    CHECK(a.features == b.features);
    CHECK(a.targets == b.targets);
    std::size_t ones = 0;
    for (double t : a.targets) ones += t == 1.0 ? 1 : 0;
    // Binomial(4000, 1/2): 5 sigma is ~158.
    CHECK(std::fabs(static_cast<double>(ones) - 2000.0) <= 160.0);
  }
  SUBCASE("labels are binary") {
    const auto d = synth_classification(100, 2, 1.0, 0.3, 5);
    for (double t : d.targets) CHECK((t == 0.0 || t == 1.0));
  }
}

TEST_CASE("split_dataset is deterministic, disjoint, and covering") {
  const auto data = synth_classification(503, 3, 1.0, 0.0, 6);
  const auto s1 = split_dataset(data, 0.2, 11);
  const auto s2 = split_dataset(data, 0.2, 11);
  CHECK(s1.train.features == s2.train.features);
  CHECK(s1.test.features == s2.test.features);
  CHECK(s1.train.size() + s1.test.size() == data.size());
  CHECK(s1.test.size() == 101);  // round(0.2 * 503)
  CHECK_THROWS_AS(split_dataset(data, 1.0, 0), std::invalid_argument);
}

TEST_CASE("standardizer centers and scales on train statistics") {
  auto data = synth_regression(SynthKind::kSmoothAngular, 500, 4, 0.1, 7);
  for (auto& row : data.features) row[2] = row[2] * 100.0 + 40.0;
  const auto std_fit = Standardizer::fit(data);
  std_fit.apply_in_place(data);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : data.features) mean += row[c];
    mean /= static_cast<double>(data.size());
    for (const auto& row : data.features) var += (row[c] - mean) * (row[c] - mean);
    var /= static_cast<double>(data.size());
    CHECK(std::fabs(mean) <= 1e-10);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("fit_linear_regression") {
  SUBCASE("exactly linear noiseless data fits to machine precision") {
    TabularDataset data;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 60; ++i) {
      std::vector<double> x{gauss(rng), gauss(rng)};
      data.targets.push_back(2.0 * x[0] - 3.0 * x[1] + 0.5);
      data.features.push_back(std::move(x));
    }
    const auto model = fit_linear_regression(data);
    CHECK(mse(model, data) <= 1e-16);
    CHECK(model.weights[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(model.weights[1] == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(model.intercept == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("intercept-only data predicts the constant") {
    TabularDataset data;
    for (int i = 0; i < 10; ++i) {
      data.features.push_back({static_cast<double>(i)});
      data.targets.push_back(7.25);
    }
    const auto model = fit_linear_regression(data);
    CHECK(model.predict({123.0}) == doctest::Approx(7.25).epsilon(1e-10));
  }
  SUBCASE("degenerate all-constant feature is still solvable") {
    TabularDataset data;
    for (int i = 0; i < 10; ++i) {
      data.features.push_back({1.0, static_cast<double>(i)});
      data.targets.push_back(static_cast<double>(i));
    }
    const auto model = fit_linear_regression(data);
    CHECK(mse(model, data) <= 1e-16);
  }
  SUBCASE("matches an independent normal-equations solver") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TabularDataset data;
    for (int i = 0; i < 50; ++i) {
      std::vector<double> x{gauss(rng), gauss(rng), gauss(rng)};
      data.targets.push_back(x[0] - 0.5 * x[2] + 0.2 * gauss(rng));
      data.features.push_back(std::move(x));
    }
    const auto model = fit_linear_regression(data);
    const auto beta = solve_normal_equations(data);
    CHECK(model.intercept == doctest::Approx(beta[0]).epsilon(1e-8));
    for (int c = 0; c < 3; ++c) {
      CHECK(model.weights[c] == doctest::Approx(beta[c + 1]).epsilon(1e-8));
    }
  }
  SUBCASE("perturbing the fitted weights never reduces training MSE") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TabularDataset data;
    for (int i = 0; i < 80; ++i) {
      std::vector<double> x{gauss(rng), gauss(rng)};
      data.targets.push_back(x[0] + x[1] + gauss(rng));
      data.features.push_back(std::move(x));
    }
    const auto model = fit_linear_regression(data);
    const double best = train_mse(model, data);
    std::uniform_real_distribution<double> delta(-1e-3, 1e-3);
    for (int trial = 0; trial < 100; ++trial) {
      auto perturbed = model;
      perturbed.intercept += delta(rng);
      for (double& w : perturbed.weights) w += delta(rng);
      CHECK(train_mse(perturbed, data) >= best - 1e-15);
    }
  }
}
