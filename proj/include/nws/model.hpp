#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nws {

struct ModelConfig {
  enum Kind { kLogistic, kMlp } kind = kLogistic;
  unsigned classes = 2;
  unsigned hidden = 32;  // MLP only
  enum Optimizer { kSgd, kAdam } optimizer = kSgd;
  double learning_rate = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Small differentiable classifier (multinomial logistic or one-hidden-layer
// ReLU MLP) trained with per-example cross-entropy and per-example loss
// weights. The parameter vector is flat and exposed for gradient checks.
class DeskModel {
 public:
  DeskModel(const ModelConfig& cfg, unsigned input_dim, std::uint64_t seed);

  // Forward pass on the batch, then one optimizer step on the gradient of
  // (1/norm) * sum_i weight_i * CE_i, skipping zero-weight examples.
  // Returns the UNWEIGHTED per-example losses for every example; weight-0
  // examples contribute no gradient.
  std::vector<double> train_step(
      std::span<const std::vector<double>> xs, std::span<const double> labels,
      std::span<const double> weights, double norm);

  // Per-example CE loss without touching parameters.
  double example_loss(const std::vector<double>& x, double label) const;

  // Argmax class.
  unsigned predict(const std::vector<double>& x) const;

  // Hidden activations for the MLP, the input itself for logistic.
  std::vector<double> penultimate(const std::vector<double>& x) const;

  // Gradient of (1/norm) * sum_i weight_i * CE_i at the current parameters,
  // without an optimizer step. Used by finite-difference checks.
  std::vector<double> loss_gradient(
      std::span<const std::vector<double>> xs, std::span<const double> labels,
      std::span<const double> weights, double norm) const;
  double weighted_loss(std::span<const std::vector<double>> xs,
                       std::span<const double> labels,
                       std::span<const double> weights, double norm) const;

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  unsigned input_dim() const { return input_dim_; }
  const ModelConfig& config() const { return cfg_; }

 private:
  std::vector<double> logits(const std::vector<double>& x,
                             std::vector<double>* hidden) const;
  void accumulate_gradient(const std::vector<double>& x, double label,
                           double coeff, std::vector<double>& grad) const;
  void apply_update(const std::vector<double>& grad);

  ModelConfig cfg_;
  unsigned input_dim_;
  std::vector<double> params_;
  // Adam state
  std::vector<double> adam_m_;
  std::vector<double> adam_v_;
  std::uint64_t adam_t_ = 0;
};

}  // namespace nws
