#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "latsec/closest_point.hpp"

namespace latsec::detail {

// Mixed-radix packing of integer vectors with known per-coordinate bounds
// into a single 64-bit key, so large sum sets can be sorted and counted
// without allocating a vector per element. Key order matches
// lexicographic order of the vectors.
class Packer {
 public:
  static std::optional<Packer> for_bounds(const IntVec& lo, const IntVec& hi) {
    Packer p;
    p.lo_ = lo;
    p.radix_.resize(lo.size());
    uint128 total = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const int128 span = static_cast<int128>(hi[i]) - lo[i] + 1;
      if (span <= 0) return std::nullopt;
      p.radix_[i] = static_cast<std::uint64_t>(span);
      total *= static_cast<uint128>(span);
      if (total > (static_cast<uint128>(1) << 62)) return std::nullopt;
    }
    return p;
  }

  std::uint64_t pack(const std::int64_t* v) const {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < radix_.size(); ++i)
      key = key * radix_[i] + static_cast<std::uint64_t>(v[i] - lo_[i]);
    return key;
  }

  IntVec unpack(std::uint64_t key) const {
    IntVec v(radix_.size());
    for (std::size_t i = radix_.size(); i-- > 0;) {
      v[i] = static_cast<std::int64_t>(key % radix_[i]) + lo_[i];
      key /= radix_[i];
    }
    return v;
  }

 private:
  IntVec lo_;
  std::vector<std::uint64_t> radix_;
};

struct Bounds {
  IntVec lo;
  IntVec hi;
};

inline Bounds bounds_of(const std::vector<IntVec>& points, std::size_t dim) {
  Bounds b{IntVec(dim, std::numeric_limits<std::int64_t>::max()),
           IntVec(dim, std::numeric_limits<std::int64_t>::min())};
  for (const auto& p : points) {
    for (std::size_t i = 0; i < dim; ++i) {
      if (p[i] < b.lo[i]) b.lo[i] = p[i];
      if (p[i] > b.hi[i]) b.hi[i] = p[i];
    }
  }
  if (points.empty()) {
    b.lo.assign(dim, 0);
    b.hi.assign(dim, 0);
  }
  return b;
}

inline Bounds sum_bounds(const Bounds& a, const Bounds& b) {
  Bounds out{a.lo, a.hi};
  for (std::size_t i = 0; i < out.lo.size(); ++i) {
    out.lo[i] += b.lo[i];
    out.hi[i] += b.hi[i];
  }
  return out;
}

}  // namespace latsec::detail
