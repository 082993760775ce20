#include <doctest.h>

#include <stdexcept>

#include <atomic>
#include <cmath>
#include <random>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "nws/race.hpp"

using namespace nws;

namespace {

std::vector<std::vector<double>> random_points(std::mt19937_64& rng,
                                               std::size_t n, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& v : p) v = gauss(rng);
  }
  return pts;
}

}  // namespace

TEST_CASE("single insertion puts exactly one unit cell per row") {
  LshFamilySpec spec{.bits = 4, .dim = 3, .master_seed = 5};
  RaceSketch s(spec, 6);
  std::vector<double> x{1.0, -2.0, 0.5};
  s.increment(x, 1.0);
  for (unsigned r = 0; r < s.rows(); ++r) {
    int nonzero = 0;
    for (std::uint32_t w = 0; w < s.width(); ++w) {
      if (s.cell(r, w) != 0.0) {
        ++nonzero;
        CHECK(s.cell(r, w) == 1.0);
      }
    }
    CHECK(nonzero == 1);
  }
  CHECK(s.insert_count() == 1);

  SUBCASE("values accumulate additively in the same cells") {
    s.increment(x, 2.5);
    s.increment(x, -0.5);
    const auto values = s.retrieve(x);
    for (double v : values) CHECK(v == 3.0);  // 1 + 2.5 - 0.5
  }
}

TEST_CASE("cells equal the brute-force per-row histogram") {
  LshFamilySpec spec{.bits = 5, .dim = 4, .master_seed = 17};
  const unsigned rows = 8;
  RaceSketch s(spec, rows);
  std::mt19937_64 rng(17);
  const auto points = random_points(rng, 1000, 4);
  for (const auto& p : points) s.increment(p, 1.0);

  const auto hashers = spawn_functions(spec, rows);
  for (unsigned r = 0; r < rows; ++r) {
    std::vector<double> histogram(s.width(), 0.0);
    for (const auto& p : points) histogram[hashers[r].hash(p)] += 1.0;
    for (std::uint32_t w = 0; w < s.width(); ++w) {
      CHECK(s.cell(r, w) == histogram[w]);
    }
  }
}

TEST_CASE("retrieve") {
  LshFamilySpec spec{.bits = 3, .dim = 2, .master_seed = 2};
  RaceSketch s(spec, 5);
  std::vector<double> x{0.3, -0.7};

  SUBCASE("empty sketch retrieves zeros") {
    for (double v : s.retrieve(x)) CHECK(v == 0.0);
  }
  SUBCASE("self-collision in every row after one insert") {
    s.increment(x, 1.0);
    for (double v : s.retrieve(x)) CHECK(v == 1.0);
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(s.retrieve(std::vector<double>{1.0, 2.0, 3.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(s.increment(std::vector<double>{1.0}, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("row mean of retrieve converges to the collision kernel") {
  LshFamilySpec spec{.bits = 4, .dim = 3, .master_seed = 31};
  RaceSketch s(spec, 2000);
  std::mt19937_64 rng(31);
  const auto pts = random_points(rng, 2, 3);
  s.increment(pts[0], 1.0);
  const double kernel = collision_kernel(spec, pts[0], pts[1]);
  const double mean = estimate_mean(s.retrieve(pts[1]));
  CHECK(std::fabs(mean - kernel) <= 0.03);
}

TEST_CASE("estimate_mean") {
  CHECK(estimate_mean(std::vector<double>{1, 1, 1}) == 1.0);
  CHECK(estimate_mean(std::vector<double>{0, 2}) == 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  std::vector<double> v(137);
  double sum = 0.0;
  for (double& x : v) {
    x = unit(rng);
    sum += x;
  }
  CHECK(estimate_mean(v) == doctest::Approx(sum / 137.0).epsilon(1e-15));
}

TEST_CASE("estimate_mom") {
  const std::vector<double> v{0, 0, 0, 100, 0, 0};
  CHECK(estimate_mom(v, 1) == estimate_mean(v));
  CHECK(estimate_mom(v, 3) == 0.0);  // group means [0, 50, 0], median 0
  // m = R: median of the raw values.
  CHECK(estimate_mom(v, 6) == 0.0);
  CHECK_THROWS_AS(estimate_mom(v, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_mom(v, 7), std::invalid_argument);

  SUBCASE("m=1 equals the mean on random input") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> w(31);
    for (double& x : w) x = unit(rng);
    CHECK(estimate_mom(w, 1) == estimate_mean(w));
  }
}

TEST_CASE("merge") {
  LshFamilySpec spec{.bits = 4, .dim = 3, .master_seed = 77};
  std::mt19937_64 rng(77);
  const auto points = random_points(rng, 200, 3);

  RaceSketch whole(spec, 6), first(spec, 6), second(spec, 6), empty(spec, 6);
  for (std::size_t i = 0; i < points.size(); ++i) {
    whole.increment(points[i], 1.0);
    (i < 100 ? first : second).increment(points[i], 1.0);
  }

  SUBCASE("split-stream merge is bit-identical to single-stream insert") {
    first.merge(second);
    for (unsigned r = 0; r < 6; ++r) {
      for (std::uint32_t w = 0; w < whole.width(); ++w) {
        CHECK(first.cell(r, w) == whole.cell(r, w));
      }
    }
    CHECK(first.insert_count() == whole.insert_count());
  }
  SUBCASE("merging an empty sketch is the identity") {
    auto copy = whole;
    copy.merge(empty);
    for (unsigned r = 0; r < 6; ++r) {
      for (std::uint32_t w = 0; w < whole.width(); ++w) {
        CHECK(copy.cell(r, w) == whole.cell(r, w));
      }
    }
  }
  SUBCASE("merge is commutative cell-wise") {
    auto ab = first, ba = second;
    ab.merge(second);
    ba.merge(first);
    for (unsigned r = 0; r < 6; ++r) {
      for (std::uint32_t w = 0; w < ab.width(); ++w) {
        CHECK(ab.cell(r, w) == ba.cell(r, w));
      }
    }
  }
  SUBCASE("retrieve after merge equals the sum of retrieves") {
    const auto q = random_points(rng, 1, 3)[0];
    const auto ra = first.retrieve(q);
    const auto rb = second.retrieve(q);
    first.merge(second);
    const auto rm = first.retrieve(q);
    for (unsigned r = 0; r < 6; ++r) CHECK(rm[r] == ra[r] + rb[r]);
  }
  SUBCASE("incompatible sketches rejected") {
    LshFamilySpec other = spec;
    other.master_seed = 78;
    RaceSketch mismatched(other, 6);
    CHECK_THROWS_AS(whole.merge(mismatched), std::invalid_argument);
    RaceSketch wrong_rows(spec, 5);
    CHECK_THROWS_AS(whole.merge(wrong_rows), std::invalid_argument);
  }
}

TEST_CASE("retrieved cell is an unbiased estimate of the kernel sum") {
  const unsigned rows = 200;
  const int num_sketches = 50;
  LshFamilySpec proto{.bits = 4, .dim = 3, .master_seed = 0};
  std::mt19937_64 rng(5);
  const auto points = random_points(rng, 100, 3);
  const auto q = random_points(rng, 1, 3)[0];

  double kernel_sum = 0.0;
  for (const auto& p : points) kernel_sum += collision_kernel(proto, p, q);

  std::vector<double> estimates(num_sketches);
  for (int s = 0; s < num_sketches; ++s) {
    LshFamilySpec spec = proto;
    spec.master_seed = 9000 + static_cast<std::uint64_t>(s);
    RaceSketch sketch(spec, rows);
    for (const auto& p : points) sketch.increment(p, 1.0);
    estimates[s] = estimate_mean(sketch.retrieve(q));
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= num_sketches;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (num_sketches - 1);
  const double stderr_mean = std::sqrt(var / num_sketches);
  CHECK(std::fabs(mean - kernel_sum) <= 3.0 * stderr_mean + 1e-12);
}

TEST_CASE("snapshot round-trips bit-exactly") {
  LshFamilySpec spec{.bits = 6, .dim = 5, .master_seed = 13};
  RaceSketch s(spec, 10);
  std::mt19937_64 rng(13);
  for (const auto& p : random_points(rng, 300, 5)) s.increment(p, 0.25);

  std::stringstream buf;
  s.save(buf);
  const auto loaded = RaceSketch::load(buf);
  CHECK(loaded.rows() == s.rows());
  CHECK(loaded.width() == s.width());
  CHECK(loaded.insert_count() == s.insert_count());
  for (unsigned r = 0; r < s.rows(); ++r) {
    for (std::uint32_t w = 0; w < s.width(); ++w) {
      CHECK(loaded.cell(r, w) == s.cell(r, w));
    }
  }

  SUBCASE("corrupted magic is rejected") {
    std::string bytes = buf.str();
    // save/load above consumed buf; rebuild the byte string
    std::stringstream again;
    s.save(again);
    bytes = again.str();
    bytes[0] ^= 0xFF;
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(RaceSketch::load(bad), std::runtime_error);
  }
  SUBCASE("truncated payload is rejected") {
    std::stringstream again;
    s.save(again);
    std::string bytes = again.str();
    bytes.resize(bytes.size() / 2);
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(RaceSketch::load(bad), std::runtime_error);
  }
}

TEST_CASE("serialized writer with concurrent readers") {
  LshFamilySpec spec{.bits = 5, .dim = 3, .master_seed = 21};
  RaceSketch s(spec, 8);
  std::shared_mutex mutex;
  std::mt19937_64 rng(21);
  const auto points = random_points(rng, 500, 3);
  const auto q = points[0];

  std::atomic<bool> done{false};
  std::atomic<int> failures{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      while (!done.load()) {
        std::shared_lock lock(mutex);
        const auto values = s.retrieve(q);
        for (double v : values) {
          if (v < 0.0 || v > 500.0) failures.fetch_add(1);
        }
      }
    });
  }
  for (const auto& p : points) {
    std::unique_lock lock(mutex);
    s.increment(p, 1.0);
  }
  done.store(true);
  for (auto& t : readers) t.join();
  CHECK(failures.load() == 0);
  CHECK(s.insert_count() == 500);
}
