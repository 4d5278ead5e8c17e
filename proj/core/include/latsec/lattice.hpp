#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "latsec/closest_point.hpp"
#include "latsec/rational.hpp"

namespace latsec {

/// Default cap on enumerated points and pair sums.
inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

bool is_prime(std::int64_t p) noexcept;

/// n x k generator matrix of a linear code over GF(p).
class FieldMatrix {
 public:
  /// Entries row-major; every entry must already lie in [0, p).
  FieldMatrix(std::int64_t p, std::size_t rows, std::size_t cols,
              std::vector<std::int64_t> entries);

  std::int64_t modulus() const noexcept { return p_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::int64_t at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  const std::vector<std::int64_t>& entries() const noexcept { return entries_; }

  std::size_t rank() const;

  /// True when v (reduced mod p) lies in the column space over GF(p).
  bool spans(std::span<const std::int64_t> v) const;

  FieldMatrix leading_columns(std::size_t count) const;

  /// Basis (n x n, row-major, columns are generators) of the integer
  /// lattice {G z + p w}. Requires full column rank.
  std::vector<std::int64_t> lattice_basis() const;

 private:
  std::int64_t p_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::int64_t> entries_;
};

/// Square integer matrix with determinant +-1; the inverse is integral and
/// cached.
class UnimodularMatrix {
 public:
  static UnimodularMatrix identity(std::size_t n);

  /// Throws NotUnimodular when |det| != 1.
  UnimodularMatrix(std::size_t n, std::vector<std::int64_t> entries);

  std::size_t dim() const noexcept { return n_; }
  std::int64_t at(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }
  const std::vector<std::int64_t>& entries() const noexcept { return entries_; }
  const std::vector<std::int64_t>& inverse_entries() const noexcept { return inverse_; }
  std::int64_t determinant() const noexcept { return det_; }

  IntVec apply(std::span<const std::int64_t> v) const;
  IntVec apply_inverse(std::span<const std::int64_t> v) const;

 private:
  std::size_t n_;
  std::vector<std::int64_t> entries_;
  std::vector<std::int64_t> inverse_;
  std::int64_t det_;
};

/// Exact point with real coordinates scale * numerators[i] / denominator.
struct LatticePoint {
  IntVec numerators;
  std::int64_t denominator = 1;
  Rational scale = 1;

  std::size_t dim() const noexcept { return numerators.size(); }
  Rational coordinate(std::size_t i) const;
  RealVec coordinates() const;

  /// Equality of the real points, independent of representation.
  friend bool operator==(const LatticePoint& a, const LatticePoint& b);
};

/// Nested pair: fine lattice scale*G'(p^-1 G Z_p^k + Z^n) over the coarse
/// lattice scale*G' Z^n. Immutable.
///
/// Points of the fine lattice are handled as integer "numerators" in
/// units of scale/p; the coarse lattice has integer basis p*G' in the
/// same units.
class ConstructionALattice {
 public:
  std::int64_t p() const noexcept { return p_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  const FieldMatrix& generator() const noexcept { return g_; }
  const UnimodularMatrix& transform() const noexcept { return gprime_; }
  const Rational& scale() const noexcept { return scale_; }
  Rational unit() const { return scale_ / Rational(p_); }

  ConstructionALattice with_scale(const Rational& scale) const;

  /// G'(G z + p w), integer numerators of a fine-lattice point.
  IntVec fine_numerators(std::span<const std::int64_t> z,
                         std::span<const std::int64_t> w) const;

  LatticePoint point(IntVec numerators) const;
  RealVec real_point(std::span<const std::int64_t> numerators) const;

  /// Integer coarse basis p*G', row-major.
  const std::vector<std::int64_t>& coarse_basis() const noexcept { return coarse_basis_; }
  /// Integer fine basis G' * (Construction-A basis), row-major.
  const std::vector<std::int64_t>& fine_basis() const noexcept { return fine_basis_; }

  /// Coarse coefficients w of the coarse point nearest to `numerators / extra_den`
  /// (in lattice units), with the lexicographic tie rule, computed exactly.
  IntVec coarse_coefficients(std::span<const std::int64_t> numerators,
                             std::int64_t extra_den = 1) const;

  /// numerators - p G' w for the nearest coarse point w: the exact
  /// representative in the half-open Voronoi region.
  IntVec reduce(std::span<const std::int64_t> numerators) const;

  const ClosestPointSearch& coarse_search() const noexcept { return *coarse_search_; }
  const ClosestPointSearch& fine_search() const noexcept { return *fine_search_; }

 private:
  friend ConstructionALattice build_lattice(std::int64_t, std::size_t, std::size_t,
                                            const FieldMatrix&, const UnimodularMatrix&,
                                            Rational);
  ConstructionALattice(std::int64_t p, std::size_t k, std::size_t n, FieldMatrix g,
                       UnimodularMatrix gprime, Rational scale);

  std::int64_t p_;
  std::size_t k_;
  std::size_t n_;
  FieldMatrix g_;
  UnimodularMatrix gprime_;
  Rational scale_;
  std::vector<std::int64_t> coarse_basis_;
  std::vector<std::int64_t> fine_basis_;
  std::shared_ptr<const ClosestPointSearch> coarse_search_;  // in lattice units
  std::shared_ptr<const ClosestPointSearch> fine_search_;    // in lattice units
};

/// Validates and builds the nested pair. Errors: NotPrime, RankDeficientG,
/// NotUnimodular (dimension mismatch of G'), NonPositiveScale,
/// InvalidArgument (k outside [1, n] or G of the wrong shape).
ConstructionALattice build_lattice(std::int64_t p, std::size_t k, std::size_t n,
                                   const FieldMatrix& g, const UnimodularMatrix& gprime,
                                   Rational scale);

/// Nearest coarse point. Among equidistant candidates the one leaving the
/// lexicographically smallest residual wins, which makes the Voronoi
/// region half-open ([-1/2, 1/2) on Z).
LatticePoint quantize_coarse(std::span<const double> x, const ConstructionALattice& lat);
LatticePoint quantize_coarse(const LatticePoint& x, const ConstructionALattice& lat);

/// x - quantize_coarse(x).
RealVec mod_coarse(std::span<const double> x, const ConstructionALattice& lat);
LatticePoint mod_coarse(const LatticePoint& x, const ConstructionALattice& lat);

bool is_in_fine(const LatticePoint& x, const ConstructionALattice& lat);

/// Numerators of the fine-lattice point nearest to the real point x.
IntVec nearest_fine(std::span<const double> x, const ConstructionALattice& lat);

/// Uniform sample over the half-open coarse Voronoi region: a uniform point
/// of the fundamental parallelepiped folded by mod_coarse.
RealVec sample_voronoi(const ConstructionALattice& lat, std::mt19937_64& rng);

/// Monte Carlo per-dimension second moment of the coarse Voronoi region.
double voronoi_second_moment(const ConstructionALattice& lat, std::size_t samples,
                             std::uint64_t seed);

/// Rejection-samples an n x k generator of full column rank.
FieldMatrix random_full_rank(std::int64_t p, std::size_t n, std::size_t k,
                             std::mt19937_64& rng);

/// Identity scrambled by random elementary row operations (row swaps and
/// row_i +-= row_j), so the determinant stays +-1.
UnimodularMatrix random_unimodular(std::size_t n, std::mt19937_64& rng);

}  // namespace latsec
