#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nws {

struct SamplerConfig {
  double target_ratio = 0.5;   // expected fraction of a batch kept
  unsigned warmup_iters = 50;  // full batches, sketch fed every iteration
  double p_min = 0.05;         // floor on accept probability
  unsigned update_period_0 = 1;
  double update_decay = 2.0;   // gap multiplier; 1.0 means fixed period
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-example accept probabilities and debiasing weights for one batch.
// accepted[i] implies weight[i] = 1 / p[i]; rejected implies weight 0,
// so E[weight_i * 1{accepted}] = 1 for every example.
struct SamplingPlan {
  std::vector<double> p;
  std::vector<bool> accepted;
  std::vector<double> weight;

  std::size_t num_accepted() const;
};

// Loss-proportional accept probabilities normalized to the target keep
// ratio: p_i = clamp(s * n * l_i / sum(l), p_min, 1) with negative
// estimates floored at 0. A zero loss sum falls back to uniform p_i = s.
SamplingPlan make_plan(std::span<const double> est_losses,
                       const SamplerConfig& cfg, std::mt19937_64& rng);

// Sum of weight_i * loss_i over accepted examples; unbiased for the
// full-batch sum.
double debiased_batch_loss(const SamplingPlan& plan,
                           std::span<const double> true_losses);

// Whether iteration `iter` feeds the sketch. Every warm-up iteration does;
// afterwards update rounds start at the end of warm-up with gaps that grow
// by ceil(g * update_decay).
bool should_update_sketch(std::uint64_t iter, const SamplerConfig& cfg);

}  // namespace nws
