#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "latsec/lattice.hpp"
#include "latsec/rational.hpp"

namespace latsec {

/// Finite set of exact points on the grid unit * Z^n, sorted and
/// de-duplicated.
struct PointSet {
  Rational unit = 1;
  std::size_t dim = 0;
  std::vector<IntVec> points;

  std::size_t size() const noexcept { return points.size(); }
  bool contains(const IntVec& v) const;

  static PointSet make(Rational unit, std::size_t dim, std::vector<IntVec> points);
};

/// Re-expresses every point on the finer grid `unit`; throws
/// InvalidArgument when a point does not land on it.
PointSet rebase(const PointSet& set, const Rational& unit);

/// Codebook C = fine ∩ V_coarse: one representative per coset of the
/// quotient, indexed by message. Message i corresponds to the GF(p)
/// vector z whose base-p digits (z[0] most significant) spell i.
class Codebook {
 public:
  Codebook(ConstructionALattice lattice, std::vector<IntVec> numerators);

  const ConstructionALattice& lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return numerators_->size(); }
  std::size_t dim() const noexcept { return lattice_.n(); }
  double size_log2() const;

  /// Empirical second moment per dimension, exact.
  Rational average_power() const;

  const IntVec& numerators(std::size_t index) const { return numerators_->at(index); }
  const std::vector<IntVec>& all_numerators() const noexcept { return *numerators_; }
  LatticePoint point(std::size_t index) const;
  RealVec real_point(std::size_t index) const;
  std::optional<std::size_t> index_of(const IntVec& numerators) const;

  /// Points in units of lattice().unit().
  PointSet point_set() const;

  Codebook with_scale(const Rational& scale) const;

 private:
  ConstructionALattice lattice_;
  std::shared_ptr<const std::vector<IntVec>> numerators_;
  std::shared_ptr<const std::map<IntVec, std::size_t>> index_;
};

Codebook enumerate_codebook(const ConstructionALattice& lat,
                            std::uint64_t budget = kDefaultBudget);

/// Exact de-duplicated sum set. Inputs on different grids are moved to
/// their common grid first. Errors: DimensionMismatch, BudgetExceeded.
PointSet minkowski_sum(const PointSet& a, const PointSet& b,
                       std::uint64_t budget = kDefaultBudget);

struct SumBoundReport {
  std::uint64_t codebook_size = 0;
  std::uint64_t sum_size = 0;
  std::uint64_t bound = 0;  // 2^n |C|
  bool pass = false;
};

/// |C ⊕ C| <= 2^n |C|, counted exactly.
SumBoundReport verify_sum_bound(const Codebook& codebook,
                                std::uint64_t budget = kDefaultBudget);

inline constexpr std::size_t kPowerSamples = 100'000;
inline constexpr std::uint64_t kPowerSeed = 0x5eedf00dULL;

/// Shrinks the scale (never grows it) so the Monte Carlo estimate of the
/// dithered transmit power per dimension is at most `power`. The new scale
/// is a dyadic rational, so codewords stay exact. Message indexing is
/// unchanged. Errors: InvalidArgument (power <= 0), DegenerateCodebook.
Codebook scale_to_power(const Codebook& codebook, double power,
                        std::size_t samples = kPowerSamples,
                        std::uint64_t seed = kPowerSeed);

/// Rescales (up or down) to the largest dyadic scale whose dithered power
/// estimate is at most `power`. Errors: InvalidArgument, DegenerateCodebook.
Codebook fit_to_power(const Codebook& codebook, double power,
                      std::size_t samples = kPowerSamples,
                      std::uint64_t seed = kPowerSeed);

struct BinnedCodebook {
  Codebook codebook;
  std::vector<std::vector<std::size_t>> bins;
  std::vector<std::size_t> bin_of;  // codeword index -> bin (message)
  std::uint64_t seed = 0;

  std::size_t num_bins() const noexcept { return bins.size(); }
  /// (1/n) log2 |C|
  double rate() const;
  /// (1/n) log2 #bins
  double bin_rate() const;
};

/// bin_of map for `size` equally likely messages: a seeded shuffle of the
/// indices cut into equal contiguous slices. Errors: NonDivisibleBins,
/// InvalidArgument (zero bins).
std::vector<std::size_t> bin_assignment(std::size_t size, std::size_t num_bins,
                                        std::uint64_t seed);

/// Bins from bin_assignment, each listing its codewords in index order.
BinnedCodebook assign_bins(const Codebook& codebook, std::size_t num_bins,
                           std::uint64_t seed);

struct LayerSpec {
  std::size_t k = 1;
  Rational scale = 1;
};

/// N codebooks sharing one fine lattice, each with its own coarse
/// sublattice. Both transmitters use the same instance.
class LayeredCodebook {
 public:
  LayeredCodebook(ConstructionALattice fine, std::vector<Codebook> layers,
                  std::vector<double> powers);

  const ConstructionALattice& fine() const noexcept { return fine_; }
  const std::vector<Codebook>& layers() const noexcept { return layers_; }
  const std::vector<double>& powers() const noexcept { return powers_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }

  /// Gain applied to layer i on the channel so it carries powers()[i].
  double amplitude(std::size_t layer) const;

  /// Layer points on the fine lattice grid (unit fine().unit()).
  PointSet layer_set(std::size_t layer) const;

  /// C_1 ⊕ ... ⊕ C_N on the fine lattice grid.
  PointSet sum_set(std::uint64_t budget = kDefaultBudget) const;

 private:
  ConstructionALattice fine_;
  std::vector<Codebook> layers_;
  std::vector<double> powers_;
};

/// Layer i uses the first k_i columns of the fine generator, the same G'
/// and scale_i. Errors: InvalidArgument (bad k_i, non-positive powers,
/// powers summing above total_power), LayerNotNested, BudgetExceeded.
LayeredCodebook build_layered(const ConstructionALattice& fine,
                              std::span<const LayerSpec> specs,
                              std::span<const double> powers,
                              double total_power = std::numeric_limits<double>::infinity(),
                              std::uint64_t budget = kDefaultBudget);

}  // namespace latsec
