#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nws/data.hpp"
#include "nws/model.hpp"
#include "nws/sampler.hpp"
#include "nws/sketch.hpp"

namespace nws {

struct DataSpec {
  enum Kind { kSynthClassification, kCsv } kind = kSynthClassification;
  // synthetic
  std::size_t n = 4096;
  std::size_t dim = 8;
  double separation = 3.0;
  double label_noise = 0.05;
  // csv
  std::string csv_path;
  std::size_t target_column = 0;
  bool has_header = false;

  double test_fraction = 0.2;
};

struct SketchConfig {
  unsigned rows = 200;
  unsigned bits = 10;
  double y_bound = 10.0;
  double decay_gamma = 1.0;  // applied at each update round when < 1
};

struct TrainConfig {
  DataSpec data;
  ModelConfig model;
  SamplerConfig sampler;
  SketchConfig sketch;
  enum Representation { kRawFeatures, kPenultimate } representation = kRawFeatures;
  std::uint64_t iterations = 300;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  std::uint64_t iter = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t examples_backprop = 0;
  std::uint64_t wallclock_ns = 0;  // cumulative training time
  bool sketch_update = false;
};

struct TrainRun {
  TrainConfig config;
  std::vector<IterationRecord> records;
};

TrainRun run_baseline(const TrainConfig& cfg);
TrainRun run_adaptive(const TrainConfig& cfg);

void write_metrics_csv(const TrainRun& run, std::ostream& out);

// Parses a metrics CSV back into a run (config left at defaults).
TrainRun read_metrics_csv(std::istream& in);

struct CompareReport {
  double baseline_final_accuracy = 0.0;
  double adaptive_final_accuracy = 0.0;
  bool reached = false;
  std::uint64_t reach_iter = 0;           // first adaptive iter at baseline acc
  std::uint64_t reach_wallclock_ns = 0;
  // Ratios of baseline cost to adaptive cost at the reach point; examples
  // backpropagated is the platform-independent proxy for wall-clock.
  double speedup_examples = 0.0;
  double speedup_wallclock = 0.0;
};

// Both runs must share the dataset and test split.
CompareReport compare_runs(const TrainRun& baseline, const TrainRun& adaptive);

}  // namespace nws
