#include "nws/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nws {

namespace {

// log(sum exp) with the max subtracted.
double log_sum_exp(const std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::fmax(mx, x);
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

}  // namespace

DeskModel::DeskModel(const ModelConfig& cfg, unsigned input_dim,
                     std::uint64_t seed)
    : cfg_(cfg), input_dim_(input_dim) {
  if (cfg.classes < 2) {
    throw std::invalid_argument("DeskModel: need at least 2 classes");
  }
  if (input_dim == 0) {
    throw std::invalid_argument("DeskModel: input_dim must be positive");
  }
  std::size_t n_params;
  if (cfg.kind == ModelConfig::kLogistic) {
    n_params = static_cast<std::size_t>(cfg.classes) * input_dim + cfg.classes;
  } else {
    if (cfg.hidden == 0) {
      throw std::invalid_argument("DeskModel: MLP needs hidden units");
    }
    n_params = static_cast<std::size_t>(cfg.hidden) * input_dim + cfg.hidden +
               static_cast<std::size_t>(cfg.classes) * cfg.hidden + cfg.classes;
  }
  params_.assign(n_params, 0.0);
  if (cfg.kind == ModelConfig::kMlp) {
    // Small random init for the hidden layer; output layer starts at zero.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const std::size_t w1 = static_cast<std::size_t>(cfg.hidden) * input_dim;
    for (std::size_t i = 0; i < w1; ++i) params_[i] = scale * gauss(rng);
  }
  if (cfg.optimizer == ModelConfig::kAdam) {
    adam_m_.assign(n_params, 0.0);
    adam_v_.assign(n_params, 0.0);
  }
}

std::vector<double> DeskModel::logits(const std::vector<double>& x,
                                      std::vector<double>* hidden) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("DeskModel: input dimension mismatch");
  }
  const unsigned k = cfg_.classes;
  std::vector<double> out(k, 0.0);
  if (cfg_.kind == ModelConfig::kLogistic) {
    const double* w = params_.data();
    const double* b = params_.data() + static_cast<std::size_t>(k) * input_dim_;
    for (unsigned c = 0; c < k; ++c) {
      double z = b[c];
      for (unsigned i = 0; i < input_dim_; ++i) {
        z += w[static_cast<std::size_t>(c) * input_dim_ + i] * x[i];
      }
      out[c] = z;
    }
    return out;
  }
  const unsigned h = cfg_.hidden;
  const double* w1 = params_.data();
  const double* b1 = params_.data() + static_cast<std::size_t>(h) * input_dim_;
  const double* w2 = b1 + h;
  const double* b2 = w2 + static_cast<std::size_t>(k) * h;
  std::vector<double> act(h);
  for (unsigned j = 0; j < h; ++j) {
    double z = b1[j];
    for (unsigned i = 0; i < input_dim_; ++i) {
      z += w1[static_cast<std::size_t>(j) * input_dim_ + i] * x[i];
    }
    act[j] = z > 0.0 ? z : 0.0;  // ReLU
  }
  for (unsigned c = 0; c < k; ++c) {
    double z = b2[c];
    for (unsigned j = 0; j < h; ++j) {
      z += w2[static_cast<std::size_t>(c) * h + j] * act[j];
    }
    out[c] = z;
  }
  if (hidden) *hidden = std::move(act);
  return out;
}

double DeskModel::example_loss(const std::vector<double>& x,
                               double label) const {
  const auto z = logits(x, nullptr);
  const auto y = static_cast<unsigned>(label);
  if (y >= cfg_.classes) {
    throw std::invalid_argument("DeskModel: label out of range");
  }
  return log_sum_exp(z) - z[y];
}

unsigned DeskModel::predict(const std::vector<double>& x) const {
  const auto z = logits(x, nullptr);
  unsigned best = 0;
  for (unsigned c = 1; c < cfg_.classes; ++c) {
    if (z[c] > z[best]) best = c;
  }
  return best;
}

std::vector<double> DeskModel::penultimate(const std::vector<double>& x) const {
  if (cfg_.kind == ModelConfig::kLogistic) return x;
  std::vector<double> hidden;
  logits(x, &hidden);
  return hidden;
}

void DeskModel::accumulate_gradient(const std::vector<double>& x, double label,
                                    double coeff, std::vector<double>& grad) const {
  const unsigned k = cfg_.classes;
  const auto y = static_cast<unsigned>(label);
  std::vector<double> hidden;
  const auto z = logits(x, &hidden);
  const double lse = log_sum_exp(z);
  std::vector<double> dz(k);  // softmax - onehot
  for (unsigned c = 0; c < k; ++c) {
    dz[c] = std::exp(z[c] - lse) - (c == y ? 1.0 : 0.0);
  }
  if (cfg_.kind == ModelConfig::kLogistic) {
    double* gw = grad.data();
    double* gb = grad.data() + static_cast<std::size_t>(k) * input_dim_;
    for (unsigned c = 0; c < k; ++c) {
      const double g = coeff * dz[c];
      for (unsigned i = 0; i < input_dim_; ++i) {
        gw[static_cast<std::size_t>(c) * input_dim_ + i] += g * x[i];
      }
      gb[c] += g;
    }
    return;
  }
  const unsigned h = cfg_.hidden;
  const double* w2 = params_.data() + static_cast<std::size_t>(h) * input_dim_ + h;
  double* gw1 = grad.data();
  double* gb1 = grad.data() + static_cast<std::size_t>(h) * input_dim_;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + static_cast<std::size_t>(k) * h;
  std::vector<double> dact(h, 0.0);
  for (unsigned c = 0; c < k; ++c) {
    const double g = coeff * dz[c];
    for (unsigned j = 0; j < h; ++j) {
      gw2[static_cast<std::size_t>(c) * h + j] += g * hidden[j];
      dact[j] += g * w2[static_cast<std::size_t>(c) * h + j];
    }
    gb2[c] += g;
  }
  for (unsigned j = 0; j < h; ++j) {
    if (hidden[j] <= 0.0) continue;  // ReLU gate
    for (unsigned i = 0; i < input_dim_; ++i) {
      gw1[static_cast<std::size_t>(j) * input_dim_ + i] += dact[j] * x[i];
    }
    gb1[j] += dact[j];
  }
}

std::vector<double> DeskModel::loss_gradient(
    std::span<const std::vector<double>> xs, std::span<const double> labels,
    std::span<const double> weights, double norm) const {
  std::vector<double> grad(params_.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    accumulate_gradient(xs[i], labels[i], weights[i] / norm, grad);
  }
  return grad;
}

double DeskModel::weighted_loss(std::span<const std::vector<double>> xs,
                                std::span<const double> labels,
                                std::span<const double> weights,
                                double norm) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    sum += weights[i] * example_loss(xs[i], labels[i]);
  }
  return sum / norm;
}

void DeskModel::apply_update(const std::vector<double>& grad) {
  if (cfg_.optimizer == ModelConfig::kSgd) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      params_[i] -= cfg_.learning_rate * grad[i];
    }
    return;
  }
  ++adam_t_;
  const double b1 = cfg_.adam_beta1;
  const double b2 = cfg_.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * grad[i];
    adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = adam_m_[i] / corr1;
    const double vhat = adam_v_[i] / corr2;
    params_[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
  }
}

std::vector<double> DeskModel::train_step(
    std::span<const std::vector<double>> xs, std::span<const double> labels,
    std::span<const double> weights, double norm) {
  if (xs.size() != labels.size() || xs.size() != weights.size()) {
    throw std::invalid_argument("train_step: batch size mismatch");
  }
  std::vector<double> losses(xs.size(), 0.0);
  std::vector<double> grad(params_.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    losses[i] = example_loss(xs[i], labels[i]);
    if (weights[i] == 0.0) continue;
    accumulate_gradient(xs[i], labels[i], weights[i] / norm, grad);
  }
  apply_update(grad);
  return losses;
}

}  // namespace nws
