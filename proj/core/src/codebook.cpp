#include "latsec/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "latsec/error.hpp"
#include "packing.hpp"

namespace latsec {
namespace {

void sort_unique(std::vector<IntVec>& points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
  const uint128 prod = static_cast<uint128>(a) * b;
  if (prod > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(prod);
}

}  // namespace

// ------------------------------------------------------------------ PointSet

bool PointSet::contains(const IntVec& v) const {
  return std::binary_search(points.begin(), points.end(), v);
}

PointSet PointSet::make(Rational unit, std::size_t dim, std::vector<IntVec> points) {
  if (unit.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "grid unit must be positive");
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "point of wrong dimension");
  }
  sort_unique(points);
  return PointSet{unit, dim, std::move(points)};
}

PointSet rebase(const PointSet& set, const Rational& unit) {
  if (set.unit == unit) return set;
  const Rational ratio = set.unit / unit;
  if (!ratio.is_integer()) {
    throw Error(ErrorCode::InvalidArgument,
                "unit " + set.unit.str() + " is not a multiple of " + unit.str());
  }
  std::vector<IntVec> pts = set.points;
  for (auto& p : pts)
    for (auto& v : p) v *= ratio.num();
  return PointSet::make(unit, set.dim, std::move(pts));
}

// ------------------------------------------------------------------ Codebook

Codebook::Codebook(ConstructionALattice lattice, std::vector<IntVec> numerators)
    : lattice_(std::move(lattice)) {
  std::map<IntVec, std::size_t> index;
  for (std::size_t i = 0; i < numerators.size(); ++i) {
    if (numerators[i].size() != lattice_.n()) {
      throw Error(ErrorCode::DimensionMismatch, "codeword of wrong dimension");
    }
    if (!index.emplace(numerators[i], i).second) {
      throw Error(ErrorCode::InvalidArgument, "codewords must be distinct");
    }
  }
  numerators_ = std::make_shared<const std::vector<IntVec>>(std::move(numerators));
  index_ = std::make_shared<const std::map<IntVec, std::size_t>>(std::move(index));
}

double Codebook::size_log2() const { return std::log2(static_cast<double>(size())); }

Rational Codebook::average_power() const {
  if (size() == 0) throw Error(ErrorCode::EmptyCodebook, "empty codebook");
  std::int64_t sum = 0;
  for (const auto& c : *numerators_)
    for (const auto v : c) sum += v * v;
  const Rational u = lattice_.unit();
  return u * u * Rational(sum, static_cast<std::int64_t>(size() * dim()));
}

LatticePoint Codebook::point(std::size_t index) const { return lattice_.point(numerators(index)); }

RealVec Codebook::real_point(std::size_t index) const {
  return lattice_.real_point(numerators(index));
}

std::optional<std::size_t> Codebook::index_of(const IntVec& numerators) const {
  const auto it = index_->find(numerators);
  if (it == index_->end()) return std::nullopt;
  return it->second;
}

PointSet Codebook::point_set() const {
  return PointSet::make(lattice_.unit(), dim(), *numerators_);
}

Codebook Codebook::with_scale(const Rational& scale) const {
  Codebook copy = *this;
  copy.lattice_ = lattice_.with_scale(scale);
  return copy;
}

Codebook enumerate_codebook(const ConstructionALattice& lat, std::uint64_t budget) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < lat.k(); ++i) count = checked_product(count, static_cast<std::uint64_t>(lat.p()));
  if (count > budget) {
    throw Error(ErrorCode::BudgetExceeded, "codebook of " + std::to_string(count) +
                                               " points exceeds budget " + std::to_string(budget));
  }
  std::vector<IntVec> points;
  points.reserve(count);
  IntVec z(lat.k(), 0);
  const IntVec zero_w(lat.n(), 0);
  for (std::uint64_t m = 0; m < count; ++m) {
    std::uint64_t rest = m;
    for (std::size_t i = lat.k(); i-- > 0;) {
      z[i] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(lat.p()));
      rest /= static_cast<std::uint64_t>(lat.p());
    }
    points.push_back(lat.reduce(lat.fine_numerators(z, zero_w)));
  }
  return Codebook(lat, std::move(points));
}

PointSet minkowski_sum(const PointSet& a, const PointSet& b, std::uint64_t budget) {
  if (a.dim != b.dim) throw Error(ErrorCode::DimensionMismatch, "Minkowski sum of different dimensions");
  if (checked_product(a.size(), b.size()) > budget) {
    throw Error(ErrorCode::BudgetExceeded, "pair count " + std::to_string(a.size()) + "x" +
                                               std::to_string(b.size()) + " exceeds budget");
  }
  const Rational unit = a.unit == b.unit ? a.unit : rational_gcd(a.unit, b.unit);
  const PointSet ra = rebase(a, unit);
  const PointSet rb = rebase(b, unit);
  const std::size_t n = a.dim;

  const auto bounds = detail::sum_bounds(detail::bounds_of(ra.points, n), detail::bounds_of(rb.points, n));
  if (const auto packer = detail::Packer::for_bounds(bounds.lo, bounds.hi)) {
    std::vector<std::uint64_t> keys;
    keys.reserve(ra.size() * rb.size());
    IntVec s(n);
    for (const auto& x : ra.points) {
      for (const auto& y : rb.points) {
        for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
        keys.push_back(packer->pack(s.data()));
      }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<IntVec> out;
    out.reserve(keys.size());
    for (const auto key : keys) out.push_back(packer->unpack(key));
    return PointSet{unit, n, std::move(out)};
  }

  std::vector<IntVec> out;
  out.reserve(ra.size() * rb.size());
  for (const auto& x : ra.points) {
    for (const auto& y : rb.points) {
      IntVec s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
      out.push_back(std::move(s));
    }
  }
  return PointSet::make(unit, n, std::move(out));
}

SumBoundReport verify_sum_bound(const Codebook& codebook, std::uint64_t budget) {
  const PointSet c = codebook.point_set();
  const PointSet sum = minkowski_sum(c, c, budget);
  SumBoundReport r;
  r.codebook_size = c.size();
  r.sum_size = sum.size();
  r.bound = (std::uint64_t{1} << codebook.dim()) * c.size();
  r.pass = r.sum_size <= r.bound;
  return r;
}

Codebook scale_to_power(const Codebook& codebook, double power, std::size_t samples,
                        std::uint64_t seed) {
  if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "power must be positive");
  const bool degenerate = std::all_of(
      codebook.all_numerators().begin(), codebook.all_numerators().end(),
      [](const IntVec& c) { return std::all_of(c.begin(), c.end(), [](auto v) { return v == 0; }); });
  if (degenerate) throw Error(ErrorCode::DegenerateCodebook, "all codewords are zero");
  if (std::isinf(power)) return codebook;

  const double moment = voronoi_second_moment(codebook.lattice(), samples, seed);
  if (moment <= power) return codebook;

  // The fold commutes with scaling, so the same-seed estimate at the new
  // scale is moment * (new/old)^2; flooring keeps it at or below `power`.
  const double old_scale = codebook.lattice().scale().to_double();
  const double target = old_scale * std::sqrt(power / moment) * (1.0 - 1e-12);
  std::int64_t den = std::int64_t{1} << 20;
  Rational scale = Rational::floor_of(target, den);
  while (scale.sign() <= 0 && den < (std::int64_t{1} << 52)) {
    den <<= 4;
    scale = Rational::floor_of(target, den);
  }
  if (scale.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "power too small to represent");
  return codebook.with_scale(scale);
}

Codebook fit_to_power(const Codebook& codebook, double power, std::size_t samples,
                      std::uint64_t seed) {
  if (!(power > 0.0) || std::isinf(power)) {
    throw Error(ErrorCode::InvalidArgument, "power must be positive and finite");
  }
  const double moment = voronoi_second_moment(codebook.lattice(), samples, seed);
  if (!(moment > 0.0)) throw Error(ErrorCode::DegenerateCodebook, "zero-volume shaping region");
  // Grow by an integer factor past the target, then shrink onto it.
  const auto grow = static_cast<std::int64_t>(std::ceil(std::sqrt(power / moment))) + 1;
  return scale_to_power(codebook.with_scale(codebook.lattice().scale() * Rational(grow)), power,
                        samples, seed);
}

// ----------------------------------------------------------------- binning

double BinnedCodebook::rate() const {
  return std::log2(static_cast<double>(codebook.size())) / static_cast<double>(codebook.dim());
}

double BinnedCodebook::bin_rate() const {
  return std::log2(static_cast<double>(num_bins())) / static_cast<double>(codebook.dim());
}

std::vector<std::size_t> bin_assignment(std::size_t size, std::size_t num_bins,
                                        std::uint64_t seed) {
  if (num_bins == 0) throw Error(ErrorCode::InvalidArgument, "need at least one bin");
  if (size % num_bins != 0) {
    throw Error(ErrorCode::NonDivisibleBins, std::to_string(num_bins) + " bins do not divide " +
                                                 std::to_string(size) + " codewords");
  }
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t per_bin = size / num_bins;
  std::vector<std::size_t> bin_of(size);
  for (std::size_t i = 0; i < size; ++i) bin_of[order[i]] = i / per_bin;
  return bin_of;
}

BinnedCodebook assign_bins(const Codebook& codebook, std::size_t num_bins, std::uint64_t seed) {
  BinnedCodebook out{codebook, std::vector<std::vector<std::size_t>>(num_bins),
                     bin_assignment(codebook.size(), num_bins, seed), seed};
  for (std::size_t i = 0; i < out.bin_of.size(); ++i) out.bins[out.bin_of[i]].push_back(i);
  return out;
}

// ---------------------------------------------------------------- layering

LayeredCodebook::LayeredCodebook(ConstructionALattice fine, std::vector<Codebook> layers,
                                 std::vector<double> powers)
    : fine_(std::move(fine)), layers_(std::move(layers)), powers_(std::move(powers)) {
  if (layers_.empty() || layers_.size() != powers_.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one power per layer and at least one layer");
  }
}

double LayeredCodebook::amplitude(std::size_t layer) const {
  const double avg = layers_.at(layer).average_power().to_double();
  if (avg <= 0.0) throw Error(ErrorCode::DegenerateCodebook, "layer has zero power");
  return std::sqrt(powers_.at(layer) / avg);
}

PointSet LayeredCodebook::layer_set(std::size_t layer) const {
  return rebase(layers_.at(layer).point_set(), fine_.unit());
}

PointSet LayeredCodebook::sum_set(std::uint64_t budget) const {
  PointSet acc = layer_set(0);
  for (std::size_t i = 1; i < layers_.size(); ++i) acc = minkowski_sum(acc, layer_set(i), budget);
  return acc;
}

LayeredCodebook build_layered(const ConstructionALattice& fine, std::span<const LayerSpec> specs,
                              std::span<const double> powers, double total_power,
                              std::uint64_t budget) {
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one layer");
  if (specs.size() != powers.size()) {
    throw Error(ErrorCode::InvalidArgument, "need exactly one power per layer");
  }
  double power_sum = 0.0;
  for (const double p : powers) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "layer powers must be positive");
    power_sum += p;
  }
  if (power_sum > total_power * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "layer powers exceed the total power budget");
  }

  std::vector<Codebook> layers;
  layers.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    if (spec.k < 1 || spec.k > fine.k()) {
      throw Error(ErrorCode::InvalidArgument, "layer k must lie in [1, k of the fine lattice]");
    }
    const auto lat = build_lattice(fine.p(), spec.k, fine.n(), fine.generator().leading_columns(spec.k),
                                   fine.transform(), spec.scale);
    // The layer lattice is generated by its basis columns, so checking
    // those is enough for nesting.
    const std::size_t n = fine.n();
    for (const auto* basis : {&lat.coarse_basis(), &lat.fine_basis()}) {
      for (std::size_t c = 0; c < n; ++c) {
        IntVec column(n);
        for (std::size_t r = 0; r < n; ++r) column[r] = (*basis)[r * n + c];
        if (!is_in_fine(lat.point(column), fine)) {
          throw Error(ErrorCode::LayerNotNested,
                      "layer " + std::to_string(i + 1) + " (scale " + spec.scale.str() +
                          ") is not a sublattice of the fine lattice",
                      static_cast<std::int64_t>(i + 1));
        }
      }
    }
    layers.push_back(enumerate_codebook(lat, budget));
  }
  return LayeredCodebook(fine, std::move(layers), std::vector<double>(powers.begin(), powers.end()));
}

}  // namespace latsec
