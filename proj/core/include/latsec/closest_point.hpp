#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace latsec {

using IntVec = std::vector<std::int64_t>;
using RealVec = std::vector<double>;

/// Closest-vector search in a small-dimensional lattice with a square
/// basis B (columns are basis vectors). A Babai round-off candidate fixes
/// a search radius; Fincke-Pohst enumeration over the QR factor then
/// returns every coefficient vector within that radius, so the true
/// nearest point (and every point tied with it) is always among the
/// candidates. Intended for n up to about 10.
class ClosestPointSearch {
 public:
  /// `basis` is n*n, row-major, columns are the lattice generators.
  ClosestPointSearch(std::size_t n, std::span<const double> basis);

  std::size_t dim() const noexcept { return n_; }

  /// round(B^-1 x) componentwise.
  IntVec round_off(std::span<const double> x) const;

  /// B w.
  RealVec apply(std::span<const std::int64_t> w) const;

  /// All w with |x - B w|^2 <= radius_sq (plus a relative slack of 1e-9).
  std::vector<IntVec> enumerate(std::span<const double> x, double radius_sq) const;

  /// Round-off candidate plus every point at most as far as it.
  std::vector<IntVec> nearest_candidates(std::span<const double> x) const;

 private:
  struct Factor;
  std::size_t n_;
  std::shared_ptr<const Factor> factor_;
};

}  // namespace latsec
