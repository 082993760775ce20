#include "nws/lsh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nws {

double SplitMix64::next_gaussian() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

SrpHash::SrpHash(unsigned bits, unsigned dim, std::uint64_t seed)
    : bits_(bits), dim_(dim), seed_(seed) {
  if (bits == 0 || bits > 24) {
    throw std::invalid_argument("SrpHash: bits must be in [1, 24]");
  }
  if (dim == 0) {
    throw std::invalid_argument("SrpHash: dim must be positive");
  }
  SplitMix64 rng(seed);
  projections_.resize(static_cast<std::size_t>(bits) * dim);
  for (double& p : projections_) {
    p = rng.next_gaussian();
  }
}

std::uint32_t SrpHash::hash(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("SrpHash::hash: dimension mismatch");
  }
  bool all_zero = true;
  for (double v : x) {
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) {
    throw std::invalid_argument("SrpHash::hash: zero vector has no angle");
  }
  std::uint32_t index = 0;
  for (unsigned j = 0; j < bits_; ++j) {
    const double* row = projections_.data() + static_cast<std::size_t>(j) * dim_;
    double dot = 0.0;
    for (unsigned i = 0; i < dim_; ++i) {
      dot += row[i] * x[i];
    }
    if (dot >= 0.0) {
      index |= (1u << j);
    }
  }
  return index;
}

namespace {

double angle_between(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("collision_kernel: dimension mismatch");
  }
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) {
    throw std::invalid_argument("collision_kernel: zero vector has no angle");
  }
  double c = dot / std::sqrt(nx * ny);
  c = std::fmin(1.0, std::fmax(-1.0, c));
  return std::acos(c);
}

}  // namespace

double SrpHash::collision_kernel(std::span<const double> x,
                                 std::span<const double> y) const {
  const double theta = angle_between(x, y);
  return std::pow(1.0 - theta / std::numbers::pi, bits_);
}

std::vector<SrpHash> spawn_functions(const LshFamilySpec& spec, unsigned r) {
  if (r == 0) {
    throw std::invalid_argument("spawn_functions: R must be >= 1");
  }
  SplitMix64 seeder(spec.master_seed);
  std::vector<SrpHash> out;
  out.reserve(r);
  for (unsigned i = 0; i < r; ++i) {
    out.emplace_back(spec.bits, spec.dim, seeder.next_u64());
  }
  return out;
}

double collision_kernel(const LshFamilySpec& spec, std::span<const double> x,
                        std::span<const double> y) {
  const double theta = angle_between(x, y);
  return std::pow(1.0 - theta / std::numbers::pi, spec.bits);
}

}  // namespace nws
