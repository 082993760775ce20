#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nws {

// Portable deterministic PRNG. All projection matrices are generated from
// this stream so that (seed, bits, dim) -> hashes is bit-identical across
// platforms. splitmix64 + Box-Muller; do not swap for std::normal_distribution,
// whose output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1].
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch only).
  double next_gaussian();

 private:
  std::uint64_t state_;
};

// Sign-random-projection hash: bucket index is the sign pattern of
// `bits` Gaussian projections. Scale-invariant; immutable after
// construction and safe to share across threads.
class SrpHash {
 public:
  SrpHash(unsigned bits, unsigned dim, std::uint64_t seed);

  // Bucket in [0, 2^bits). Ties <v,x> = 0 hash as bit 1.
  // Throws std::invalid_argument on dimension mismatch or the zero vector.
  std::uint32_t hash(std::span<const double> x) const;

  unsigned bits() const { return bits_; }
  unsigned dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t num_buckets() const { return 1u << bits_; }

  // Row j of the projection matrix.
  std::span<const double> projection_row(unsigned j) const {
    return {projections_.data() + static_cast<std::size_t>(j) * dim_, dim_};
  }

  // Exact collision probability of the full code: (1 - theta/pi)^bits.
  double collision_kernel(std::span<const double> x,
                          std::span<const double> y) const;

 private:
  unsigned bits_;
  unsigned dim_;
  std::uint64_t seed_;
  std::vector<double> projections_;  // row-major, bits x dim
};

struct LshFamilySpec {
  unsigned bits = 10;
  unsigned dim = 0;
  std::uint64_t master_seed = 0;
};

// R deterministically seeded hashers; prefix-stable in R.
std::vector<SrpHash> spawn_functions(const LshFamilySpec& spec, unsigned r);

// Kernel of the family itself (same for every spawned hasher).
double collision_kernel(const LshFamilySpec& spec, std::span<const double> x,
                        std::span<const double> y);

}  // namespace nws
