#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latsec/codebook.hpp"
#include "latsec/rational.hpp"

namespace latsec {

/// A value sum_q c_q * log2(q) over primes q with rational coefficients.
///
/// Entropies and mutual informations of distributions with rational
/// probabilities are exactly of this form, so identities between them can be
/// checked with exact equality. Conversion to double happens only in
/// value().
class ExactLog {
 public:
  ExactLog() = default;

  /// log2(m) for m >= 1.
  static ExactLog log2_of(std::uint64_t m);
  /// r bits, i.e. r * log2(2).
  static ExactLog bits(const Rational& r);

  const std::map<std::uint64_t, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  double value() const;

  /// e.g. "5/3*log2(3) - 4/9"; the log2(2) coefficient prints as a plain
  /// rational.
  std::string str() const;

  ExactLog& operator+=(const ExactLog& rhs);
  ExactLog& operator-=(const ExactLog& rhs);
  ExactLog& operator*=(const Rational& r);
  ExactLog& operator/=(const Rational& r);

  friend ExactLog operator+(ExactLog a, const ExactLog& b) { return a += b; }
  friend ExactLog operator-(ExactLog a, const ExactLog& b) { return a -= b; }
  friend ExactLog operator*(ExactLog a, const Rational& r) { return a *= r; }
  friend ExactLog operator/(ExactLog a, const Rational& r) { return a /= r; }
  friend bool operator==(const ExactLog&, const ExactLog&) = default;

 private:
  void add_term(std::uint64_t prime, const Rational& coeff);
  std::map<std::uint64_t, Rational> terms_;
};

/// Finite distribution over points of unit * Z^n with probabilities
/// count / total. Counts are positive; the entries are sorted by point.
class PointMassDist {
 public:
  PointMassDist(Rational unit, std::size_t dim,
                std::vector<std::pair<IntVec, std::uint64_t>> weights);

  const Rational& unit() const noexcept { return unit_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t total() const noexcept { return total_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  const std::vector<std::pair<IntVec, std::uint64_t>>& entries() const noexcept { return entries_; }

  /// Zero for points outside the support.
  Rational probability(const IntVec& point) const;
  PointSet support() const;

 private:
  Rational unit_;
  std::size_t dim_;
  std::vector<std::pair<IntVec, std::uint64_t>> entries_;
  std::uint64_t total_ = 0;
};

PointMassDist uniform_dist(const PointSet& set);
/// Errors: EmptyCodebook.
PointMassDist uniform_dist(const Codebook& codebook);
PointMassDist point_mass(IntVec point, Rational unit);

/// Same distribution on the finer grid `unit`.
PointMassDist rebase(const PointMassDist& dist, const Rational& unit);

/// Law of X1 + X2 for independent X1 ~ a, X2 ~ b.
/// Errors: DimensionMismatch, BudgetExceeded.
PointMassDist convolve(const PointMassDist& a, const PointMassDist& b,
                       std::uint64_t budget = kDefaultBudget);

/// Entropy of the distribution count_i / total, in bits.
ExactLog entropy_of_counts(std::span<const std::uint64_t> counts, std::uint64_t total);
ExactLog entropy_exact(const PointMassDist& dist);
double entropy_bits(const PointMassDist& dist);

/// I(X1; X1 + X2) = H(X1 + X2) - H(X2) for independent uniform X1 on c1
/// and X2 on c2.
ExactLog mutual_info_sum_exact(const PointSet& c1, const PointSet& c2,
                               std::uint64_t budget = kDefaultBudget);
ExactLog mutual_info_sum_exact(const Codebook& c1, const Codebook& c2,
                               std::uint64_t budget = kDefaultBudget);
double mutual_info_sum(const Codebook& c1, const Codebook& c2,
                       std::uint64_t budget = kDefaultBudget);

/// Joint law of (W1, X1 + X2): W1 uniform over bins, X1 uniform within
/// bin W1, X2 uniform over another codebook.
class JointBinSumDist {
 public:
  struct Entry {
    std::size_t bin;
    IntVec sum;
    std::uint64_t count;
  };

  JointBinSumDist(std::size_t num_bins, Rational unit, std::size_t dim,
                  std::vector<Entry> entries, std::uint64_t total);

  std::size_t num_bins() const noexcept { return num_bins_; }
  const Rational& unit() const noexcept { return unit_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t total() const noexcept { return total_; }
  /// Sorted by (bin, sum).
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  std::vector<std::uint64_t> bin_counts() const;
  PointMassDist sum_marginal() const;

 private:
  std::size_t num_bins_;
  Rational unit_;
  std::size_t dim_;
  std::vector<Entry> entries_;
  std::uint64_t total_;
};

/// Generic form: user 1 sends x_points[i] (grid x_unit) for equally likely
/// message slots i, slot i belonging to bin bin_of[i]; user 2 sends an
/// equally likely entry of y_points (grid y_unit). Repeated points are
/// allowed. Errors: EmptyCodebook, DimensionMismatch, BudgetExceeded.
JointBinSumDist joint_bin_sum(std::span<const IntVec> x_points, const Rational& x_unit,
                              std::span<const std::size_t> bin_of, std::size_t num_bins,
                              std::span<const IntVec> y_points, const Rational& y_unit,
                              std::uint64_t budget = kDefaultBudget);
JointBinSumDist joint_bin_sum(const BinnedCodebook& binned, const Codebook& other,
                              std::uint64_t budget = kDefaultBudget);

struct LeakageBreakdown {
  ExactLog h_bin;             // H(W)
  ExactLog h_sum;             // H(S)
  ExactLog h_joint;           // H(W, S)
  ExactLog h_bin_given_sum;   // H(W | S)
  ExactLog h_sum_given_bin;   // H(S | W), summed bin by bin
  ExactLog leakage;           // I(W; S) = H(W) - H(W | S)
  bool chain_rule_holds = false;  // I(W;S) == H(S) - H(S|W) exactly
};

LeakageBreakdown leakage_breakdown(const JointBinSumDist& joint);
LeakageBreakdown leakage_breakdown(const BinnedCodebook& binned, const Codebook& other,
                                   std::uint64_t budget = kDefaultBudget);

/// I(W1; X1 + X2) in bits.
double leakage_binned(const BinnedCodebook& binned, const Codebook& other,
                      std::uint64_t budget = kDefaultBudget);

/// (1/n) H(W1 | X1 + X2) in bits per dimension.
double equivocation_rate(const BinnedCodebook& binned, const Codebook& other,
                         std::uint64_t budget = kDefaultBudget);

/// (1/2) sum_{s in S} |d(s) - 1/|S||, exact. Errors: SupportMismatch when
/// the support of d is not inside S, DimensionMismatch.
Rational tv_to_uniform(const PointMassDist& dist, const PointSet& set);

}  // namespace latsec
