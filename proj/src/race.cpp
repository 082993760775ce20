#include "nws/race.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace nws {

namespace detail {

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("snapshot: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("snapshot: truncated stream");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace detail

namespace {
constexpr std::uint32_t kRaceMagic = 0x45434152;  // "RACE" in byte order
constexpr std::uint32_t kRaceVersion = 1;
}  // namespace

RaceSketch::RaceSketch(const LshFamilySpec& spec, unsigned rows)
    : RaceSketch(
          std::make_shared<const std::vector<SrpHash>>(spawn_functions(spec, rows)),
          spec) {}

RaceSketch::RaceSketch(std::shared_ptr<const std::vector<SrpHash>> hashers,
                       const LshFamilySpec& spec)
    : spec_(spec),
      rows_(static_cast<unsigned>(hashers->size())),
      width_(1u << spec.bits),
      hashers_(std::move(hashers)) {
  if (rows_ == 0) throw std::invalid_argument("RaceSketch: R must be >= 1");
  cells_.assign(static_cast<std::size_t>(rows_) * width_, 0.0);
}

void RaceSketch::increment(std::span<const double> x, double value) {
  const auto& hs = *hashers_;
  for (unsigned r = 0; r < rows_; ++r) {
    cells_[static_cast<std::size_t>(r) * width_ + hs[r].hash(x)] += value;
  }
  ++insert_count_;
}

std::vector<double> RaceSketch::retrieve(std::span<const double> q) const {
  const auto& hs = *hashers_;
  std::vector<double> out(rows_);
  for (unsigned r = 0; r < rows_; ++r) {
    out[r] = cells_[static_cast<std::size_t>(r) * width_ + hs[r].hash(q)];
  }
  return out;
}

void RaceSketch::merge(const RaceSketch& other) {
  if (other.rows_ != rows_ || other.width_ != width_ ||
      other.spec_.bits != spec_.bits || other.spec_.dim != spec_.dim ||
      other.spec_.master_seed != spec_.master_seed) {
    throw std::invalid_argument("RaceSketch::merge: incompatible sketches");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    cells_[i] += other.cells_[i];
  }
  insert_count_ += other.insert_count_;
}

void RaceSketch::scale(double gamma) {
  for (double& c : cells_) c *= gamma;
}

void RaceSketch::save(std::ostream& out) const {
  detail::write_u32(out, kRaceMagic);
  detail::write_u32(out, kRaceVersion);
  detail::write_u32(out, rows_);
  detail::write_u32(out, width_);
  detail::write_u32(out, spec_.bits);
  detail::write_u32(out, spec_.dim);
  detail::write_u64(out, spec_.master_seed);
  detail::write_u64(out, insert_count_);
  for (double c : cells_) detail::write_f64(out, c);
}

RaceSketch RaceSketch::load(std::istream& in) {
  if (detail::read_u32(in) != kRaceMagic) {
    throw std::runtime_error("snapshot: bad magic");
  }
  if (detail::read_u32(in) != kRaceVersion) {
    throw std::runtime_error("snapshot: unsupported version");
  }
  const std::uint32_t rows = detail::read_u32(in);
  const std::uint32_t width = detail::read_u32(in);
  LshFamilySpec spec;
  spec.bits = detail::read_u32(in);
  spec.dim = detail::read_u32(in);
  spec.master_seed = detail::read_u64(in);
  if (rows == 0 || spec.bits == 0 || spec.bits > 24 ||
      width != (1u << spec.bits)) {
    throw std::runtime_error("snapshot: corrupt header");
  }
  RaceSketch s(spec, rows);
  s.insert_count_ = detail::read_u64(in);
  for (double& c : s.cells_) c = detail::read_f64(in);
  return s;
}

double estimate_mean(std::span<const double> row_values) {
  if (row_values.empty()) {
    throw std::invalid_argument("estimate_mean: empty input");
  }
  double sum = 0.0;
  for (double v : row_values) sum += v;
  return sum / static_cast<double>(row_values.size());
}

double estimate_mom(std::span<const double> row_values, unsigned groups) {
  const std::size_t n = row_values.size();
  if (groups == 0 || groups > n) {
    throw std::invalid_argument("estimate_mom: need 1 <= m <= R");
  }
  std::vector<double> means(groups);
  // Contiguous groups, sizes n/m rounded so they differ by at most 1.
  std::size_t start = 0;
  for (unsigned g = 0; g < groups; ++g) {
    const std::size_t end = (n * (g + 1)) / groups;
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i) sum += row_values[i];
    means[g] = sum / static_cast<double>(end - start);
    start = end;
  }
  std::sort(means.begin(), means.end());
  if (groups % 2 == 1) return means[groups / 2];
  return 0.5 * (means[groups / 2 - 1] + means[groups / 2]);
}

}  // namespace nws
