#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latsec/channel.hpp"
#include "latsec/codebook.hpp"
#include "latsec/infotheory.hpp"
#include "latsec/lattice.hpp"
#include "latsec/rational.hpp"

namespace latsec {

/// Recipe for a nested lattice pair. G and G' are either explicit or drawn
/// from `matrix_seed` (G first, then G', from one stream).
struct LatticeConfig {
  std::int64_t p = 2;
  std::size_t k = 1;
  std::size_t n = 1;
  std::optional<std::vector<std::int64_t>> g;       // n x k, row-major
  std::optional<std::vector<std::int64_t>> gprime;  // n x n, row-major
  std::uint64_t matrix_seed = 0;
  Rational scale = 1;

  std::string label() const;
};

ConstructionALattice realize(const LatticeConfig& config);

struct GridSpec {
  std::vector<std::int64_t> primes{2, 3, 5, 7};
  std::size_t max_n = 6;
  std::uint64_t max_size = 512;
  std::size_t draws = 5;
  std::uint64_t seed = 0;
};

/// Every (p, k, n) with 1 <= k <= n <= max_n and p^k <= max_size, `draws`
/// seeded (G, G') pairs each, in (p, n, k, draw) order.
std::vector<LatticeConfig> standard_grid(const GridSpec& spec = {});

enum class RunStatus { Ok, BudgetExceeded, Failed };
const char* to_string(RunStatus status) noexcept;

struct SumSetReport {
  std::string label;
  std::size_t n = 0;
  RunStatus status = RunStatus::Ok;
  std::string message;
  SumBoundReport sum_bound;
  ExactLog h_sum;              // H(X1 + X2)
  double entropy_bound = 0.0;   // log2|C| + n
  bool entropy_pass = false;
  ExactLog mutual_info;        // I(X1; X1 + X2)
  ExactLog mutual_info_per_dim;
  bool leakage_pass = false;

  bool pass() const noexcept;
};

/// Sum-set count bound, entropy bound and per-dimension leakage bound for
/// one codebook, with X1, X2 uniform on it.
SumSetReport run_sumset_check(const LatticeConfig& config, std::uint64_t budget = kDefaultBudget);
std::vector<SumSetReport> run_sumset_suite(std::span<const LatticeConfig> grid,
                                         std::uint64_t budget = kDefaultBudget);

struct SecrecyReport {
  std::string label;
  std::size_t n = 0;
  std::uint64_t codebook_size = 0;  // equally likely message slots
  std::uint64_t num_bins = 0;
  double rate = 0.0;                // (1/n) log2 |C|
  double bin_rate = 0.0;            // (1/n) log2 #bins
  ExactLog leakage;                 // I(W1; X1 + X2)
  ExactLog equivocation;            // H(W1 | X1 + X2)
  ExactLog leakage_per_dim;
  ExactLog equivocation_per_dim;
  bool identity_holds = false;      // equivocation/n == Rhat - leak/n, exact
  bool chain_rule_holds = false;
  bool onebit_pass = false;         // leakage/n <= 1 + 1e-9
  double sum_gap_bits = 0.0;        // 2 * leakage/n at the symmetric point
  RunStatus status = RunStatus::Ok;
  std::string message;

  bool pass() const noexcept;
};

inline constexpr double kOneBitTolerance = 1e-9;

/// Report for a finished joint (bin, sum) law.
SecrecyReport make_secrecy_report(std::string label, const JointBinSumDist& joint,
                                  std::size_t n, std::uint64_t slots);

SecrecyReport run_secrecy_check(const Codebook& codebook, std::size_t num_bins,
                                std::uint64_t bin_seed, std::string label,
                                std::uint64_t budget = kDefaultBudget);

/// For every grid codebook, every divisor of |C| as bin count.
std::vector<SecrecyReport> run_binned_suite(std::span<const LatticeConfig> grid,
                                              std::uint64_t bin_seed = 0,
                                              std::uint64_t budget = kDefaultBudget);

struct LayeredConfig {
  LatticeConfig fine;
  std::vector<LayerSpec> layers;
  std::vector<double> powers;  // empty: one unit per layer

  std::string label() const;
};

LayeredCodebook realize(const LayeredConfig& config, std::uint64_t budget = kDefaultBudget);

/// Two-layer configurations: mostly an outer layer at scale p over an inner
/// layer at scale 1 (unique layer sums), plus two same-scale overlapping
/// pairs and one three-layer stack.
std::vector<LayeredConfig> standard_layered_configs();

struct LayeredReport {
  std::string label;
  std::size_t n = 0;
  std::size_t layer_count = 0;
  RunStatus status = RunStatus::Ok;
  std::string message;
  std::uint64_t tuple_count = 0;        // prod |C_i|
  std::uint64_t sum_codebook_size = 0;  // |C_1 + ... + C_N|
  bool sums_unique = false;             // tuple_count == sum_codebook_size
  ExactLog h_sum;                       // H(L1 + L2), L_i ~ sum of uniform layers
  double entropy_bound = 0.0;            // log2 |C+| + n
  bool entropy_pass = false;
  std::uint64_t double_sum_size = 0;    // |C+ + C+|
  bool count_pass = false;              // double_sum_size <= 2^n |C+|
  Rational tv;                          // TV(law of L, uniform on C+)
  ExactLog mutual_info;                 // I(L1; L1 + L2)
  ExactLog mutual_info_per_dim;
  bool leakage_pass = false;

  /// Gates only the entropy bound; the rest is diagnostic.
  bool pass() const noexcept;
};

LayeredReport run_layered_check(const LayeredCodebook& layered, std::string label,
                                std::uint64_t budget = kDefaultBudget);
std::vector<LayeredReport> run_layered_suite(std::span<const LayeredConfig> configs,
                                             std::uint64_t budget = kDefaultBudget);

/// Exact points of every layer tuple sum, in tuple order (layer 0 digit
/// most significant), on the fine grid.
std::vector<IntVec> layer_tuple_points(const LayeredCodebook& layered,
                                       std::uint64_t budget = kDefaultBudget);

struct BaselineSeed {
  std::uint64_t seed = 0;
  std::uint64_t distinct_sums = 0;
  ExactLog random_leak;
  double random_leak_per_dim = 0.0;
  ExactLog lattice_leak;
  double lattice_leak_per_dim = 0.0;
};

struct BaselineComparison {
  std::uint64_t codebook_size = 0;
  std::size_t n = 0;
  double power = 0.0;
  std::string lattice_label;
  std::vector<BaselineSeed> seeds;
  std::uint64_t random_above_one = 0;
  std::uint64_t lattice_within_one = 0;
  double fraction_random_above_one = 0.0;
  double mac_sum_rate = 0.0;  // (1/2) log2(1 + b^2 2P / Ne), reference only

  bool pass(double min_fraction = 0.95) const noexcept;
};

/// Random codebooks of distinct points on the grid delta * Z^n with
/// delta = 2^-10 sqrt(P), inside the cube of half-width sqrt(3P), against a
/// lattice codebook of the same size (layered when no single lattice has
/// exactly `size` points in dimension n). Grid points are exact in units
/// of sqrt(P) / 1024.
/// Errors: InvalidArgument (size not a prime power), BudgetExceeded.
BaselineComparison random_codebook_baseline(std::uint64_t size, std::size_t n, double power,
                                            std::span<const std::uint64_t> seeds,
                                            double b = 1.0, double eve_noise = 1.0,
                                            std::uint64_t budget = kDefaultBudget);

/// The lattice side of the baseline for one matrix seed.
LayeredCodebook matched_lattice_codebook(std::uint64_t size, std::size_t n,
                                         std::uint64_t matrix_seed,
                                         std::uint64_t budget = kDefaultBudget);

struct LoopbackReport {
  std::string label;
  std::uint64_t codebook_size = 0;
  std::uint64_t combinations = 0;       // message pairs per scheme
  std::uint64_t weak_failures = 0;
  std::uint64_t very_strong_failures = 0;
  std::uint64_t layered_failures = 0;
  double very_strong_gain = 0.0;
  double layered_gain = 0.0;
  std::size_t layer_count = 0;
  RunStatus status = RunStatus::Ok;
  std::string message;

  bool pass() const noexcept;
};

/// Cross gain for noiseless two-stage decoding of one codebook: above
/// 2 r_max / d_min, and at least sqrt(P + 1).
double noiseless_cross_gain(const Codebook& codebook);

/// Layer powers and cross gain under which noiseless layered decoding is
/// exact and every stage condition holds at unit reference noise.
struct LayeredPlan {
  double a = 0.0;
  std::vector<double> powers;
};
LayeredPlan plan_noiseless_layered(const LayeredCodebook& layered);

/// Splits a lattice into an outer layer of rank ceil(k/2) at scale p*s and
/// an inner layer of rank floor(k/2) at scale s (one layer when k = 1);
/// layer sums are unique, so the tuples match the codewords one to one.
LayeredCodebook split_layers(const ConstructionALattice& lat,
                             std::uint64_t budget = kDefaultBudget);

/// Zero-noise decoding of every message pair by the weak, very-strong and
/// layered receivers.
LoopbackReport run_loopback(const LatticeConfig& config, std::uint64_t budget = kDefaultBudget);
std::vector<LoopbackReport> run_loopback_suite(std::span<const LatticeConfig> grid,
                                               std::uint64_t max_size = 64,
                                               std::uint64_t budget = kDefaultBudget);

struct PipelineConfig {
  ChannelParams channel;
  LatticeConfig lattice;
  std::size_t num_bins = 1;
  std::uint64_t bin_seed = 0;
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultBudget;
};

struct PipelineReport {
  Regime regime;
  std::string scheme;  // very-strong | weak | layered | weak-tin
  SecrecyReport secrecy;
  Reliability reliability;
  double rate = 0.0;        // (1/n) log2 (message slots)
  double rate_limit = 0.0;  // formula rate of the chosen scheme
  double transmit_power = 0.0;
  std::vector<double> layer_powers;
  double mac_sum_rate = 0.0;
};

/// The codebook is first fitted to the power budget (fit_to_power).
/// Very-strong: successive decoding on the power-scaled codebook. Weak:
/// dithered modulo-lattice decoding. General with |a| > 1: two layers with
/// a stage-feasible power split. General with |a| < 1: the weak receiver,
/// treating interference as noise. Leakage is exact on the transmitted
/// lattice points and so ignores b and Ne. Errors: UnityGain, sub-errors.
PipelineReport run_regime_pipeline(const PipelineConfig& config);

/// Layer powers for the general regime: P_2 = min(a^2 - 1, P), then the
/// largest P_1 <= P - P_2 meeting the stage-1 condition.
std::vector<double> general_layer_powers(double a, double power);

}  // namespace latsec
