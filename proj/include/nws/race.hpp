#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "nws/lsh.hpp"

namespace nws {

// Little-endian primitives shared by the snapshot formats.
namespace detail {
void write_u64(std::ostream& out, std::uint64_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_f64(std::ostream& out, double v);
std::uint64_t read_u64(std::istream& in);
std::uint32_t read_u32(std::istream& in);
double read_f64(std::istream& in);
}  // namespace detail

// R x W array of accumulators, one row per hash function. Cells hold exact
// sums of the inserted values; memory is Theta(R*W) regardless of stream
// length. Concurrent reads are safe; writes (increment, scale, merge) must
// be externally serialized with respect to each other and to reads.
class RaceSketch {
 public:
  RaceSketch(const LshFamilySpec& spec, unsigned rows);
  RaceSketch(std::shared_ptr<const std::vector<SrpHash>> hashers,
             const LshFamilySpec& spec);

  // cells[r, h_r(x)] += value, for every row r.
  void increment(std::span<const double> x, double value);

  // Element r is cells[r, h_r(q)].
  std::vector<double> retrieve(std::span<const double> q) const;

  // Cell-wise sum; shapes and hasher seeds must match.
  void merge(const RaceSketch& other);

  // Multiply every cell by gamma (decay hook for non-stationary streams).
  void scale(double gamma);

  unsigned rows() const { return rows_; }
  std::uint32_t width() const { return width_; }
  const LshFamilySpec& spec() const { return spec_; }
  std::uint64_t insert_count() const { return insert_count_; }
  double cell(unsigned r, std::uint32_t w) const {
    return cells_[static_cast<std::size_t>(r) * width_ + w];
  }
  const std::shared_ptr<const std::vector<SrpHash>>& hashers() const {
    return hashers_;
  }

  void save(std::ostream& out) const;
  static RaceSketch load(std::istream& in);

 private:
  LshFamilySpec spec_;
  unsigned rows_;
  std::uint32_t width_;
  std::shared_ptr<const std::vector<SrpHash>> hashers_;
  std::vector<double> cells_;  // row-major
  std::uint64_t insert_count_ = 0;
};

double estimate_mean(std::span<const double> row_values);

// Median of m contiguous group means (group sizes differ by at most 1).
// Even m averages the two central values.
double estimate_mom(std::span<const double> row_values, unsigned groups);

}  // namespace nws
