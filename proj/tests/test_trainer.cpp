#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>
#include <vector>

#include "nws/config.hpp"
#include "nws/trainer.hpp"

using namespace nws;

namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.data.n = 512;
  cfg.data.dim = 4;
  cfg.iterations = 40;
  cfg.batch_size = 32;
  cfg.sampler.warmup_iters = 10;
  cfg.sketch.rows = 50;
  cfg.sketch.bits = 6;
  cfg.seed = 21;
  return cfg;
}

bool records_equal(const std::vector<IterationRecord>& a,
                   const std::vector<IterationRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].iter != b[i].iter || a[i].train_loss != b[i].train_loss ||
        a[i].test_loss != b[i].test_loss ||
        a[i].test_accuracy != b[i].test_accuracy ||
        a[i].examples_backprop != b[i].examples_backprop) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("full-batch sampling reduces to the baseline bitwise") {
  auto cfg = small_config();
  cfg.sampler.target_ratio = 1.0;
  cfg.sampler.p_min = 1.0;
  const auto base = run_baseline(cfg);
  const auto adaptive = run_adaptive(cfg);
  REQUIRE(base.records.size() == adaptive.records.size());
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    CHECK(base.records[i].train_loss == adaptive.records[i].train_loss);
    CHECK(base.records[i].test_loss == adaptive.records[i].test_loss);
    CHECK(base.records[i].test_accuracy == adaptive.records[i].test_accuracy);
    CHECK(base.records[i].examples_backprop ==
          adaptive.records[i].examples_backprop);
  }
}

TEST_CASE("warm-up iterations match the baseline exactly") {
  auto cfg = small_config();
  cfg.sampler.target_ratio = 0.5;
  cfg.sampler.p_min = 0.05;
  const auto base = run_baseline(cfg);
  const auto adaptive = run_adaptive(cfg);
  for (std::size_t i = 0; i < cfg.sampler.warmup_iters; ++i) {
    CHECK(base.records[i].train_loss == adaptive.records[i].train_loss);
    CHECK(base.records[i].test_accuracy == adaptive.records[i].test_accuracy);
  }
  // And past warm-up the adaptive run actually skips examples.
  std::uint64_t base_total = 0, adaptive_total = 0;
  for (std::size_t i = cfg.sampler.warmup_iters; i < base.records.size(); ++i) {
    base_total += base.records[i].examples_backprop;
    adaptive_total += adaptive.records[i].examples_backprop;
  }
  CHECK(adaptive_total < base_total);
}

TEST_CASE("runs replay deterministically from the same config") {
  auto cfg = small_config();
  cfg.sampler.target_ratio = 0.4;
  const auto a = run_adaptive(cfg);
  const auto b = run_adaptive(cfg);
  CHECK(records_equal(a.records, b.records));
  cfg.seed = 22;
  const auto c = run_adaptive(cfg);
  CHECK(!records_equal(a.records, c.records));
}

TEST_CASE("per-iteration accounting") {
  auto cfg = small_config();
  const auto base = run_baseline(cfg);
  REQUIRE(base.records.size() == cfg.iterations);
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    const auto& rec = base.records[i];
    CHECK(rec.iter == i);
    CHECK(rec.examples_backprop == cfg.batch_size);
    CHECK(rec.test_accuracy >= 0.0);
    CHECK(rec.test_accuracy <= 1.0);
    CHECK(std::isfinite(rec.train_loss));
    if (i > 0) CHECK(rec.wallclock_ns >= base.records[i - 1].wallclock_ns);
  }
  const auto adaptive = run_adaptive(cfg);
  for (const auto& rec : adaptive.records) {
    CHECK(rec.examples_backprop <= cfg.batch_size);
  }
}

TEST_CASE("metrics CSV round-trips the records") {
  auto cfg = small_config();
  cfg.iterations = 8;
  const auto run = run_adaptive(cfg);
  std::stringstream buf;
  write_metrics_csv(run, buf);
  const auto loaded = read_metrics_csv(buf);
  REQUIRE(loaded.records.size() == run.records.size());
  CHECK(records_equal(run.records, loaded.records));
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    CHECK(loaded.records[i].sketch_update == run.records[i].sketch_update);
    CHECK(loaded.records[i].wallclock_ns == run.records[i].wallclock_ns);
  }
}

TEST_CASE("compare_runs on identical runs reports unit speedups") {
  auto cfg = small_config();
  const auto base = run_baseline(cfg);
  const auto report = compare_runs(base, base);
  CHECK(report.reached);
  CHECK(report.baseline_final_accuracy == report.adaptive_final_accuracy);
  CHECK(report.speedup_examples == doctest::Approx(1.0));
}

TEST_CASE("config JSON round-trip") {
  TrainConfig cfg = small_config();
  cfg.data.kind = DataSpec::kCsv;
  cfg.data.csv_path = "some/file.csv";
  cfg.data.target_column = 3;
  cfg.data.has_header = true;
  cfg.model.kind = ModelConfig::kMlp;
  cfg.model.optimizer = ModelConfig::kAdam;
  cfg.model.hidden = 17;
  cfg.representation = TrainConfig::kPenultimate;
  cfg.sampler.update_decay = 1.5;
  cfg.sketch.decay_gamma = 0.9;

  const auto j = to_json(cfg);
  const auto back = train_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.data.csv_path == "some/file.csv");
  CHECK(back.model.hidden == 17);
  CHECK(back.representation == TrainConfig::kPenultimate);
  CHECK(back.sampler.update_decay == 1.5);

  SUBCASE("unknown keys are rejected") {
    auto bad = j;
    bad["unexpected"] = 1;
    CHECK_THROWS(train_config_from_json(bad));
  }
  SUBCASE("invalid enum strings are rejected") {
    auto bad = j;
    bad["model"]["kind"] = "transformer";
    CHECK_THROWS(train_config_from_json(bad));
  }
}
