#include "nws/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nws {

namespace {

TabularDataset load_dataset(const DataSpec& spec, std::uint64_t seed) {
  if (spec.kind == DataSpec::kSynthClassification) {
    return synth_classification(spec.n, spec.dim, spec.separation,
                                spec.label_noise, seed);
  }
  return load_csv(spec.csv_path, spec.target_column, spec.has_header);
}

bool nonzero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return true;
  }
  return false;
}

class TrainLoop {
 public:
  TrainLoop(const TrainConfig& cfg, bool adaptive)
      : cfg_(cfg),
        adaptive_(adaptive),
        data_rng_(cfg.seed + 1),
        sample_rng_(cfg.sampler.seed) {
    cfg_.sampler.validate();
    auto full = load_dataset(cfg_.data, cfg_.seed);
    auto split = split_dataset(full, cfg_.data.test_fraction, cfg_.seed);
    train_ = std::move(split.train);
    test_ = std::move(split.test);
    if (train_.size() == 0 || test_.size() == 0) {
      throw std::invalid_argument("trainer: empty train or test split");
    }
    unsigned classes = 2;
    for (double t : train_.targets) {
      classes = std::max(classes, static_cast<unsigned>(t) + 1);
    }
    ModelConfig mc = cfg_.model;
    mc.classes = std::max(mc.classes, classes);
    const unsigned input_dim = static_cast<unsigned>(train_.dim());
    model_.emplace(mc, input_dim, cfg_.seed);
    if (adaptive_) {
      LshFamilySpec spec;
      spec.bits = cfg_.sketch.bits;
      spec.dim = cfg_.representation == TrainConfig::kPenultimate &&
                         mc.kind == ModelConfig::kMlp
                     ? mc.hidden
                     : input_dim;
      spec.master_seed = cfg_.seed ^ 0x5E7CB00CULL;
      sketch_.emplace(spec, cfg_.sketch.rows, cfg_.sketch.y_bound);
    }
    order_.resize(train_.size());
    std::iota(order_.begin(), order_.end(), 0);
    cursor_ = order_.size();  // force shuffle before the first batch
  }

  TrainRun run() {
    TrainRun out;
    out.config = cfg_;
    std::uint64_t clock_ns = 0;
    for (std::uint64_t iter = 0; iter < cfg_.iterations; ++iter) {
      const auto batch = next_batch();
      const auto t0 = std::chrono::steady_clock::now();
      IterationRecord rec = step(iter, batch);
      const auto t1 = std::chrono::steady_clock::now();
      clock_ns += static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
      rec.iter = iter;
      rec.wallclock_ns = clock_ns;
      evaluate_test(rec);
      out.records.push_back(rec);
    }
    return out;
  }

 private:
  std::vector<std::size_t> next_batch() {
    std::vector<std::size_t> batch;
    const std::size_t want = std::min(cfg_.batch_size, train_.size());
    batch.reserve(want);
    while (batch.size() < want) {
      if (cursor_ >= order_.size()) {
        std::shuffle(order_.begin(), order_.end(), data_rng_);
        cursor_ = 0;
      }
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

  std::vector<double> representation(std::size_t idx) const {
    if (cfg_.representation == TrainConfig::kPenultimate) {
      return model_->penultimate(train_.features[idx]);
    }
    return train_.features[idx];
  }

  IterationRecord step(std::uint64_t iter, const std::vector<std::size_t>& batch) {
    IterationRecord rec;
    const std::size_t n = batch.size();
    const bool warm = !adaptive_ || iter < cfg_.sampler.warmup_iters;
    if (warm) {
      std::vector<std::vector<double>> xs;
      std::vector<double> labels, weights;
      xs.reserve(n);
      for (std::size_t idx : batch) {
        xs.push_back(train_.features[idx]);
        labels.push_back(train_.targets[idx]);
        weights.push_back(1.0);
      }
      const auto losses =
          model_->train_step(xs, labels, weights, static_cast<double>(n));
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += weights[i] * losses[i];
      rec.train_loss = sum / static_cast<double>(n);
      rec.examples_backprop = n;
      if (adaptive_) {
        for (std::size_t i = 0; i < n; ++i) {
          const auto repr = representation(batch[i]);
          if (nonzero(repr)) sketch_->insert(repr, losses[i]);
        }
        rec.sketch_update = true;
      }
      return rec;
    }

    // Loss estimation via the sketch, then importance sampling.
    std::vector<double> est(n);
    std::vector<std::vector<double>> reprs(n);
    for (std::size_t i = 0; i < n; ++i) {
      reprs[i] = representation(batch[i]);
      est[i] = nonzero(reprs[i]) ? sketch_->query(reprs[i]) : 0.0;
    }
    const SamplingPlan plan = make_plan(est, cfg_.sampler, sample_rng_);

    std::vector<std::vector<double>> xs;
    std::vector<double> labels, weights;
    std::vector<std::size_t> kept;  // positions in the batch
    for (std::size_t i = 0; i < n; ++i) {
      if (!plan.accepted[i]) continue;
      xs.push_back(train_.features[batch[i]]);
      labels.push_back(train_.targets[batch[i]]);
      weights.push_back(plan.weight[i]);
      kept.push_back(i);
    }
    rec.examples_backprop = kept.size();
    double sum = 0.0;
    if (!kept.empty()) {
      const auto losses =
          model_->train_step(xs, labels, weights, static_cast<double>(n));
      for (std::size_t j = 0; j < kept.size(); ++j) {
        sum += weights[j] * losses[j];
      }
      if (should_update_sketch(iter, cfg_.sampler)) {
        if (cfg_.sketch.decay_gamma < 1.0) {
          sketch_->decay(cfg_.sketch.decay_gamma);
        }
        for (std::size_t j = 0; j < kept.size(); ++j) {
          if (nonzero(reprs[kept[j]])) {
            sketch_->insert(reprs[kept[j]], losses[j]);
          }
        }
        rec.sketch_update = true;
      }
    }
    rec.train_loss = sum / static_cast<double>(n);
    return rec;
  }

  void evaluate_test(IterationRecord& rec) const {
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_.size(); ++i) {
      loss += model_->example_loss(test_.features[i], test_.targets[i]);
      if (model_->predict(test_.features[i]) ==
          static_cast<unsigned>(test_.targets[i])) {
        ++correct;
      }
    }
    rec.test_loss = loss / static_cast<double>(test_.size());
    rec.test_accuracy =
        static_cast<double>(correct) / static_cast<double>(test_.size());
  }

  TrainConfig cfg_;
  bool adaptive_;
  TabularDataset train_;
  TabularDataset test_;
  std::optional<DeskModel> model_;
  std::optional<NwSketch> sketch_;
  std::mt19937_64 data_rng_;
  std::mt19937_64 sample_rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

TrainRun run_baseline(const TrainConfig& cfg) {
  return TrainLoop(cfg, /*adaptive=*/false).run();
}

TrainRun run_adaptive(const TrainConfig& cfg) {
  return TrainLoop(cfg, /*adaptive=*/true).run();
}

void write_metrics_csv(const TrainRun& run, std::ostream& out) {
  out.precision(17);
  out << "iter,train_loss,test_loss,test_accuracy,examples_backprop,"
         "wallclock_ns,sketch_update\n";
  for (const auto& r : run.records) {
    out << r.iter << ',' << r.train_loss << ',' << r.test_loss << ','
        << r.test_accuracy << ',' << r.examples_backprop << ','
        << r.wallclock_ns << ',' << (r.sketch_update ? 1 : 0) << '\n';
  }
}

TrainRun read_metrics_csv(std::istream& in) {
  TrainRun run;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    IterationRecord r;
    char comma;
    int update = 0;
    std::istringstream ss(line);
    ss >> r.iter >> comma >> r.train_loss >> comma >> r.test_loss >> comma >>
        r.test_accuracy >> comma >> r.examples_backprop >> comma >>
        r.wallclock_ns >> comma >> update;
    if (ss.fail()) {
      throw std::runtime_error("read_metrics_csv: bad line: " + line);
    }
    r.sketch_update = update != 0;
    run.records.push_back(r);
  }
  return run;
}

CompareReport compare_runs(const TrainRun& baseline, const TrainRun& adaptive) {
  if (baseline.records.empty() || adaptive.records.empty()) {
    throw std::invalid_argument("compare_runs: empty run");
  }
  CompareReport rep;
  rep.baseline_final_accuracy = baseline.records.back().test_accuracy;
  rep.adaptive_final_accuracy = adaptive.records.back().test_accuracy;

  auto first_reach = [](const TrainRun& run, double target) {
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      if (run.records[i].test_accuracy >= target) return i;
    }
    return run.records.size();
  };
  auto examples_through = [](const TrainRun& run, std::size_t idx) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i <= idx; ++i) {
      total += run.records[i].examples_backprop;
    }
    return total;
  };

  const std::size_t b_idx = first_reach(baseline, rep.baseline_final_accuracy);
  const std::size_t a_idx = first_reach(adaptive, rep.baseline_final_accuracy);
  if (a_idx >= adaptive.records.size()) {
    rep.reached = false;
    return rep;
  }
  rep.reached = true;
  rep.reach_iter = adaptive.records[a_idx].iter;
  rep.reach_wallclock_ns = adaptive.records[a_idx].wallclock_ns;
  const double b_examples =
      static_cast<double>(examples_through(baseline, b_idx));
  const double a_examples =
      static_cast<double>(examples_through(adaptive, a_idx));
  rep.speedup_examples = a_examples > 0.0 ? b_examples / a_examples : 0.0;
  const double b_ns =
      static_cast<double>(baseline.records[b_idx].wallclock_ns);
  const double a_ns = static_cast<double>(rep.reach_wallclock_ns);
  rep.speedup_wallclock = a_ns > 0.0 ? b_ns / a_ns : 0.0;
  return rep;
}

}  // namespace nws
