#include "nws/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace nws {

void SamplerConfig::validate() const {
  if (!(target_ratio > 0.0) || target_ratio > 1.0) {
    throw std::invalid_argument("SamplerConfig: target_ratio must be in (0, 1]");
  }
  if (!(p_min > 0.0) || p_min > 1.0) {
    throw std::invalid_argument("SamplerConfig: p_min must be in (0, 1]");
  }
  if (target_ratio < p_min) {
    throw std::invalid_argument("SamplerConfig: target_ratio must be >= p_min");
  }
  if (update_period_0 == 0) {
    throw std::invalid_argument("SamplerConfig: update_period_0 must be >= 1");
  }
  if (!(update_decay >= 1.0)) {
    throw std::invalid_argument("SamplerConfig: update_decay must be >= 1");
  }
}

std::size_t SamplingPlan::num_accepted() const {
  std::size_t n = 0;
  for (bool a : accepted) n += a ? 1 : 0;
  return n;
}

SamplingPlan make_plan(std::span<const double> est_losses,
                       const SamplerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t n = est_losses.size();
  if (n == 0) {
    throw std::invalid_argument("make_plan: empty loss vector");
  }
  double sum = 0.0;
  for (double l : est_losses) {
    if (!std::isfinite(l)) {
      throw std::invalid_argument("make_plan: non-finite loss estimate");
    }
    sum += std::fmax(l, 0.0);
  }

  SamplingPlan plan;
  plan.p.resize(n);
  plan.accepted.resize(n);
  plan.weight.resize(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double p;
    if (sum == 0.0) {
      p = cfg.target_ratio;
    } else {
      const double l = std::fmax(est_losses[i], 0.0);
      p = cfg.target_ratio * static_cast<double>(n) * l / sum;
      p = std::fmin(1.0, std::fmax(cfg.p_min, p));
    }
    plan.p[i] = p;
    const bool accept = unit(rng) < p;
    plan.accepted[i] = accept;
    plan.weight[i] = accept ? 1.0 / p : 0.0;
  }
  return plan;
}

double debiased_batch_loss(const SamplingPlan& plan,
                           std::span<const double> true_losses) {
  if (plan.weight.size() != true_losses.size()) {
    throw std::invalid_argument("debiased_batch_loss: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < true_losses.size(); ++i) {
    if (plan.accepted[i]) sum += plan.weight[i] * true_losses[i];
  }
  return sum;
}

bool should_update_sketch(std::uint64_t iter, const SamplerConfig& cfg) {
  cfg.validate();
  if (iter < cfg.warmup_iters) return true;
  if (cfg.update_decay == 1.0) {
    return (iter - cfg.warmup_iters) % cfg.update_period_0 == 0;
  }
  // Update rounds at warmup, warmup + g0, warmup + g0 + g1, ... with
  // g_{k+1} = ceil(g_k * decay).
  std::uint64_t round = cfg.warmup_iters;
  std::uint64_t gap = cfg.update_period_0;
  while (round < iter) {
    round += gap;
    gap = static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(gap) * cfg.update_decay));
  }
  return round == iter;
}

}  // namespace nws
