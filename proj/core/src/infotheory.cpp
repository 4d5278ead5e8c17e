#include "latsec/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "latsec/error.hpp"
#include "packing.hpp"

namespace latsec {
namespace {

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t m) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    if (m % d != 0) continue;
    int e = 0;
    while (m % d == 0) {
      m /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  const uint128 p = static_cast<uint128>(a) * b;
  if (p > std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::Overflow, "probability denominator overflow");
  }
  return static_cast<std::uint64_t>(p);
}

}  // namespace

// ------------------------------------------------------------------ ExactLog

ExactLog ExactLog::log2_of(std::uint64_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "log2 of zero");
  ExactLog out;
  for (const auto& [q, e] : factorize(m)) out.add_term(q, Rational(e));
  return out;
}

ExactLog ExactLog::bits(const Rational& r) {
  ExactLog out;
  out.add_term(2, r);
  return out;
}

void ExactLog::add_term(std::uint64_t prime, const Rational& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.emplace(prime, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

double ExactLog::value() const {
  long double acc = 0.0L;
  for (const auto& [q, c] : terms_) {
    acc += static_cast<long double>(c.num()) / static_cast<long double>(c.den()) *
           std::log2(static_cast<long double>(q));
  }
  return static_cast<double>(acc);
}

std::string ExactLog::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Print non-2 primes first, the plain-bits term last.
  auto emit = [&](std::uint64_t q, const Rational& c) {
    const Rational mag = abs(c);
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    if (q == 2) {
      os << mag.str();
    } else {
      if (mag != Rational(1)) os << mag.str() << "*";
      os << "log2(" << q << ")";
    }
  };
  for (const auto& [q, c] : terms_)
    if (q != 2) emit(q, c);
  if (const auto it = terms_.find(2); it != terms_.end()) emit(2, it->second);
  return os.str();
}

ExactLog& ExactLog::operator+=(const ExactLog& rhs) {
  for (const auto& [q, c] : rhs.terms_) add_term(q, c);
  return *this;
}

ExactLog& ExactLog::operator-=(const ExactLog& rhs) {
  for (const auto& [q, c] : rhs.terms_) add_term(q, -c);
  return *this;
}

ExactLog& ExactLog::operator*=(const Rational& r) {
  if (r.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [q, c] : terms_) c *= r;
  return *this;
}

ExactLog& ExactLog::operator/=(const Rational& r) {
  for (auto& [q, c] : terms_) c /= r;
  return *this;
}

// ------------------------------------------------------------ PointMassDist

PointMassDist::PointMassDist(Rational unit, std::size_t dim,
                             std::vector<std::pair<IntVec, std::uint64_t>> weights)
    : unit_(unit), dim_(dim) {
  if (unit.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "grid unit must be positive");
  std::sort(weights.begin(), weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [pt, w] : weights) {
    if (pt.size() != dim) throw Error(ErrorCode::DimensionMismatch, "point of wrong dimension");
    if (w == 0) continue;
    if (!entries_.empty() && entries_.back().first == pt) {
      entries_.back().second += w;
    } else {
      entries_.emplace_back(std::move(pt), w);
    }
    total_ += w;
  }
  if (entries_.empty()) throw Error(ErrorCode::EmptyCodebook, "distribution with empty support");
}

Rational PointMassDist::probability(const IntVec& point) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), point,
                                   [](const auto& e, const IntVec& v) { return e.first < v; });
  if (it == entries_.end() || it->first != point) return Rational(0);
  return Rational(static_cast<std::int64_t>(it->second), static_cast<std::int64_t>(total_));
}

PointSet PointMassDist::support() const {
  std::vector<IntVec> pts;
  pts.reserve(entries_.size());
  for (const auto& e : entries_) pts.push_back(e.first);
  return PointSet{unit_, dim_, std::move(pts)};
}

PointMassDist uniform_dist(const PointSet& set) {
  if (set.size() == 0) throw Error(ErrorCode::EmptyCodebook, "uniform law over an empty set");
  std::vector<std::pair<IntVec, std::uint64_t>> w;
  w.reserve(set.size());
  for (const auto& p : set.points) w.emplace_back(p, 1);
  return PointMassDist(set.unit, set.dim, std::move(w));
}

PointMassDist uniform_dist(const Codebook& codebook) {
  if (codebook.size() == 0) throw Error(ErrorCode::EmptyCodebook, "empty codebook");
  return uniform_dist(codebook.point_set());
}

PointMassDist point_mass(IntVec point, Rational unit) {
  const std::size_t dim = point.size();
  std::vector<std::pair<IntVec, std::uint64_t>> w;
  w.emplace_back(std::move(point), 1);
  return PointMassDist(unit, dim, std::move(w));
}

PointMassDist rebase(const PointMassDist& dist, const Rational& unit) {
  if (dist.unit() == unit) return dist;
  const Rational ratio = dist.unit() / unit;
  if (!ratio.is_integer()) {
    throw Error(ErrorCode::InvalidArgument, "distribution does not live on grid " + unit.str());
  }
  auto entries = dist.entries();
  for (auto& [pt, w] : entries)
    for (auto& v : pt) v *= ratio.num();
  return PointMassDist(unit, dist.dim(), std::move(entries));
}

PointMassDist convolve(const PointMassDist& a, const PointMassDist& b, std::uint64_t budget) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "convolution of different dimensions");
  if (static_cast<uint128>(a.support_size()) * b.support_size() > budget) {
    throw Error(ErrorCode::BudgetExceeded, "convolution pair count exceeds budget");
  }
  const Rational unit = a.unit() == b.unit() ? a.unit() : rational_gcd(a.unit(), b.unit());
  const PointMassDist ra = rebase(a, unit);
  const PointMassDist rb = rebase(b, unit);
  const std::size_t n = a.dim();
  checked_mul(ra.total(), rb.total());

  std::vector<IntVec> pa;
  std::vector<IntVec> pb;
  for (const auto& e : ra.entries()) pa.push_back(e.first);
  for (const auto& e : rb.entries()) pb.push_back(e.first);
  const auto bounds = detail::sum_bounds(detail::bounds_of(pa, n), detail::bounds_of(pb, n));

  std::vector<std::pair<IntVec, std::uint64_t>> out;
  if (const auto packer = detail::Packer::for_bounds(bounds.lo, bounds.hi)) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
    keyed.reserve(pa.size() * pb.size());
    IntVec s(n);
    for (const auto& [x, wx] : ra.entries()) {
      for (const auto& [y, wy] : rb.entries()) {
        for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
        keyed.emplace_back(packer->pack(s.data()), wx * wy);
      }
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size();) {
      std::uint64_t w = 0;
      std::size_t j = i;
      for (; j < keyed.size() && keyed[j].first == keyed[i].first; ++j) w += keyed[j].second;
      out.emplace_back(packer->unpack(keyed[i].first), w);
      i = j;
    }
  } else {
    for (const auto& [x, wx] : ra.entries()) {
      for (const auto& [y, wy] : rb.entries()) {
        IntVec s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
        out.emplace_back(std::move(s), wx * wy);
      }
    }
  }
  return PointMassDist(unit, n, std::move(out));
}

// ------------------------------------------------------------------ entropy

ExactLog entropy_of_counts(std::span<const std::uint64_t> counts, std::uint64_t total) {
  if (total == 0) throw Error(ErrorCode::InvalidArgument, "entropy of an empty distribution");
  // H = log2 T - (1/T) sum c log2 c. Group equal counts, accumulate integer
  // prime exponents, divide once.
  std::map<std::uint64_t, std::uint64_t> multiplicity;
  std::uint64_t check = 0;
  for (const auto c : counts) {
    if (c == 0) continue;
    ++multiplicity[c];
    check += c;
  }
  if (check != total) throw Error(ErrorCode::InvalidArgument, "counts do not sum to the total");

  std::map<std::uint64_t, int128> weighted;
  for (const auto& [c, mult] : multiplicity) {
    if (c == 1) continue;
    for (const auto& [q, e] : factorize(c)) {
      weighted[q] += static_cast<int128>(mult) * c * e;
    }
  }
  ExactLog h = ExactLog::log2_of(total);
  const auto t = static_cast<std::int64_t>(total);
  for (const auto& [q, sum] : weighted) {
    // sum / T, reduced before narrowing.
    int128 num = sum;
    int128 den = t;
    int128 a = num;
    int128 b = den;
    while (b != 0) {
      const int128 r = a % b;
      a = b;
      b = r;
    }
    num /= a;
    den /= a;
    if (num > INT64_MAX) throw Error(ErrorCode::Overflow, "entropy coefficient overflow");
    ExactLog term = ExactLog::log2_of(q) * Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
    h -= term;
  }
  return h;
}

ExactLog entropy_exact(const PointMassDist& dist) {
  std::vector<std::uint64_t> counts;
  counts.reserve(dist.support_size());
  for (const auto& e : dist.entries()) counts.push_back(e.second);
  return entropy_of_counts(counts, dist.total());
}

double entropy_bits(const PointMassDist& dist) { return entropy_exact(dist).value(); }

ExactLog mutual_info_sum_exact(const PointSet& c1, const PointSet& c2, std::uint64_t budget) {
  if (c1.dim != c2.dim) throw Error(ErrorCode::DimensionMismatch, "codebooks of different dimensions");
  const PointMassDist d1 = uniform_dist(c1);
  const PointMassDist d2 = uniform_dist(c2);
  // H(X1 + X2 | X1) = H(X2) by independence.
  return entropy_exact(convolve(d1, d2, budget)) - entropy_exact(d2);
}

ExactLog mutual_info_sum_exact(const Codebook& c1, const Codebook& c2, std::uint64_t budget) {
  return mutual_info_sum_exact(c1.point_set(), c2.point_set(), budget);
}

double mutual_info_sum(const Codebook& c1, const Codebook& c2, std::uint64_t budget) {
  return mutual_info_sum_exact(c1, c2, budget).value();
}

// ----------------------------------------------------------- joint (W, S)

JointBinSumDist::JointBinSumDist(std::size_t num_bins, Rational unit, std::size_t dim,
                                 std::vector<Entry> entries, std::uint64_t total)
    : num_bins_(num_bins), unit_(unit), dim_(dim), entries_(std::move(entries)), total_(total) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.bin != b.bin ? a.bin < b.bin : a.sum < b.sum;
  });
  std::uint64_t check = 0;
  for (const auto& e : entries_) {
    if (e.bin >= num_bins_) throw Error(ErrorCode::InvalidArgument, "bin index out of range");
    check += e.count;
  }
  if (check != total_) throw Error(ErrorCode::InvalidArgument, "joint counts do not sum to total");
}

std::vector<std::uint64_t> JointBinSumDist::bin_counts() const {
  std::vector<std::uint64_t> out(num_bins_, 0);
  for (const auto& e : entries_) out[e.bin] += e.count;
  return out;
}

PointMassDist JointBinSumDist::sum_marginal() const {
  std::vector<std::pair<IntVec, std::uint64_t>> w;
  w.reserve(entries_.size());
  for (const auto& e : entries_) w.emplace_back(e.sum, e.count);
  return PointMassDist(unit_, dim_, std::move(w));
}

JointBinSumDist joint_bin_sum(std::span<const IntVec> x_points, const Rational& x_unit,
                              std::span<const std::size_t> bin_of, std::size_t num_bins,
                              std::span<const IntVec> y_points, const Rational& y_unit,
                              std::uint64_t budget) {
  if (x_points.empty() || y_points.empty()) throw Error(ErrorCode::EmptyCodebook, "empty codebook");
  if (bin_of.size() != x_points.size()) {
    throw Error(ErrorCode::DimensionMismatch, "bin map does not cover the codebook");
  }
  const std::size_t n = x_points.front().size();
  if (y_points.front().size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "codebooks of different dimensions");
  }
  if (static_cast<uint128>(x_points.size()) * y_points.size() > budget) {
    throw Error(ErrorCode::BudgetExceeded, "joint enumeration exceeds budget");
  }
  const Rational unit = x_unit == y_unit ? x_unit : rational_gcd(x_unit, y_unit);
  const std::int64_t m1 = (x_unit / unit).num();
  const std::int64_t m2 = (y_unit / unit).num();

  std::vector<IntVec> xs;
  std::vector<IntVec> ys;
  for (const auto& v : x_points) {
    IntVec s(v);
    for (auto& t : s) t *= m1;
    xs.push_back(std::move(s));
  }
  for (const auto& v : y_points) {
    IntVec s(v);
    for (auto& t : s) t *= m2;
    ys.push_back(std::move(s));
  }

  std::vector<JointBinSumDist::Entry> entries;
  const auto bounds = detail::sum_bounds(detail::bounds_of(xs, n), detail::bounds_of(ys, n));
  if (const auto packer = detail::Packer::for_bounds(bounds.lo, bounds.hi)) {
    std::vector<std::pair<std::size_t, std::uint64_t>> keys;
    keys.reserve(xs.size() * ys.size());
    IntVec s(n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (const auto& y : ys) {
        for (std::size_t d = 0; d < n; ++d) s[d] = xs[i][d] + y[d];
        keys.emplace_back(bin_of[i], packer->pack(s.data()));
      }
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      entries.push_back({keys[i].first, packer->unpack(keys[i].second), j - i});
      i = j;
    }
  } else {
    std::map<std::pair<std::size_t, IntVec>, std::uint64_t> counts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (const auto& y : ys) {
        IntVec s(n);
        for (std::size_t d = 0; d < n; ++d) s[d] = xs[i][d] + y[d];
        ++counts[{bin_of[i], std::move(s)}];
      }
    }
    for (auto& [key, cnt] : counts) entries.push_back({key.first, key.second, cnt});
  }
  return JointBinSumDist(num_bins, unit, n, std::move(entries),
                         static_cast<std::uint64_t>(xs.size() * ys.size()));
}

JointBinSumDist joint_bin_sum(const BinnedCodebook& binned, const Codebook& other,
                              std::uint64_t budget) {
  const Codebook& c = binned.codebook;
  if (c.dim() != other.dim()) throw Error(ErrorCode::DimensionMismatch, "codebooks of different dimensions");
  // Uniform W, then uniform within an equal-size bin, makes X1 uniform
  // over C, so every (x1, x2) pair is equally likely.
  return joint_bin_sum(c.all_numerators(), c.lattice().unit(), binned.bin_of, binned.num_bins(),
                       other.all_numerators(), other.lattice().unit(), budget);
}

LeakageBreakdown leakage_breakdown(const JointBinSumDist& joint) {
  LeakageBreakdown out;
  const auto bins = joint.bin_counts();
  out.h_bin = entropy_of_counts(bins, joint.total());
  out.h_sum = entropy_exact(joint.sum_marginal());

  std::vector<std::uint64_t> all;
  all.reserve(joint.entries().size());
  for (const auto& e : joint.entries()) all.push_back(e.count);
  out.h_joint = entropy_of_counts(all, joint.total());
  out.h_bin_given_sum = out.h_joint - out.h_sum;
  out.leakage = out.h_bin - out.h_bin_given_sum;

  // H(S | W) = sum_w P(w) H(S | W = w), built bin by bin.
  const auto t = static_cast<std::int64_t>(joint.total());
  std::size_t i = 0;
  const auto& entries = joint.entries();
  while (i < entries.size()) {
    const std::size_t bin = entries[i].bin;
    std::vector<std::uint64_t> within;
    std::size_t j = i;
    for (; j < entries.size() && entries[j].bin == bin; ++j) within.push_back(entries[j].count);
    const ExactLog h = entropy_of_counts(within, bins[bin]);
    out.h_sum_given_bin += h * Rational(static_cast<std::int64_t>(bins[bin]), t);
    i = j;
  }
  out.chain_rule_holds = (out.leakage == out.h_sum - out.h_sum_given_bin);
  return out;
}

LeakageBreakdown leakage_breakdown(const BinnedCodebook& binned, const Codebook& other,
                                   std::uint64_t budget) {
  return leakage_breakdown(joint_bin_sum(binned, other, budget));
}

double leakage_binned(const BinnedCodebook& binned, const Codebook& other, std::uint64_t budget) {
  return leakage_breakdown(binned, other, budget).leakage.value();
}

double equivocation_rate(const BinnedCodebook& binned, const Codebook& other,
                         std::uint64_t budget) {
  const auto b = leakage_breakdown(binned, other, budget);
  return b.h_bin_given_sum.value() / static_cast<double>(binned.codebook.dim());
}

// ----------------------------------------------------------------------- TV

Rational tv_to_uniform(const PointMassDist& dist, const PointSet& set) {
  if (dist.dim() != set.dim) throw Error(ErrorCode::DimensionMismatch, "dimension mismatch");
  if (set.size() == 0) throw Error(ErrorCode::SupportMismatch, "empty reference set");
  const Rational unit = dist.unit() == set.unit ? set.unit : rational_gcd(dist.unit(), set.unit);
  const PointMassDist d = rebase(dist, unit);
  const PointSet s = rebase(set, unit);
  for (const auto& e : d.entries()) {
    if (!s.contains(e.first)) throw Error(ErrorCode::SupportMismatch, "distribution has mass outside the set");
  }
  // sum_s |c_s |S| - T| / (2 T |S|)
  const auto size = static_cast<int128>(s.size());
  const auto total = static_cast<int128>(d.total());
  int128 acc = 0;
  for (const auto& pt : s.points) {
    const Rational pr = d.probability(pt);
    const int128 c = pr.is_zero() ? 0 : static_cast<int128>(pr.num()) * (total / pr.den());
    const int128 diff = c * size - total;
    acc += diff < 0 ? -diff : diff;
  }
  const int128 den = 2 * total * size;
  int128 a = acc;
  int128 b = den;
  while (b != 0) {
    const int128 r = a % b;
    a = b;
    b = r;
  }
  if (a == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(acc / a), static_cast<std::int64_t>(den / a));
}

}  // namespace latsec
