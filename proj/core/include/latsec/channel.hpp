#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "latsec/codebook.hpp"
#include "latsec/lattice.hpp"

namespace latsec {

/// Two-user symmetric interference channel plus eavesdropper:
///   Y1 = X1 + a X2 + N1,  Y2 = X2 + a X1 + N2,  Z = b (X1 + X2) + Ne.
/// Noise is i.i.d. Gaussian per coordinate; variances may be zero.
struct ChannelParams {
  double a = 0.5;
  double b = 1.0;
  double power = 1.0;
  double noise1 = 1.0;
  double noise2 = 1.0;
  double eve_noise = 1.0;

  /// Errors: UnityGain (a == 1), InvalidArgument (power <= 0 or a negative
  /// variance).
  void validate() const;
};

enum class RegimeKind { VeryStrong, Weak, General };
const char* to_string(RegimeKind kind) noexcept;

struct Regime {
  RegimeKind kind = RegimeKind::General;
  double a_squared = 0.0;
  double very_strong_threshold = 0.0;  // P + 1
  double weak_statistic = 0.0;         // |a + a^3 P|, weak when <= 1/2
  double multiuser_threshold = 0.0;    // (P + 1)^2 / P, reported only
};

/// VeryStrong iff a^2 >= P + 1, else Weak iff |a + a^3 P| <= 1/2, else
/// General. Errors: UnityGain.
Regime classify_regime(double a, double power);

/// P / ((1 + a^2) P + N)
double mmse_alpha(double power, double a, double noise);

/// (1 - alpha)^2 P + alpha^2 a^2 P + alpha^2 N: variance of the effective
/// noise -(1 - alpha) X1 + alpha a X2 + alpha N1 for a given alpha.
double effective_noise_variance_at(double alpha, double power, double a, double noise);

/// P (a^2 P + N) / ((1 + a^2) P + N), the value at the MMSE alpha.
double effective_noise_variance(double power, double a, double noise);

/// (1/2) log2(1 + P / (a^2 P + N)), treating interference as noise.
double achievable_rate_weak(double power, double a, double noise);

/// (1/2) log2(1 + b^2 (P1 + P2) / Ne), the multiple-access sum-rate bound at
/// the eavesdropper (infinite when Ne == 0).
double mac_sum_rate_bound(double b, double p1, double p2, double eve_noise);

using RandomStream = std::mt19937_64;

/// Independent stream for trial `trial` under `root_seed`; trials can run
/// in any order and give the same draws.
RandomStream trial_stream(std::uint64_t root_seed, std::uint64_t trial);

RealVec dither_sample(const ConstructionALattice& lat, RandomStream& rng);

/// [L + U] mod coarse.
RealVec encode_dithered(const LatticePoint& codeword, std::span<const double> dither,
                        const ConstructionALattice& lat);

struct ChannelOutputs {
  RealVec y1;
  RealVec y2;
  RealVec z;
};

ChannelOutputs transmit(std::span<const double> x1, std::span<const double> x2,
                        const ChannelParams& params, RandomStream& rng);

/// Modulo-lattice receiver: [alpha y - U] mod coarse, then the nearest
/// fine-lattice point reduced back into the codebook.
class WeakDecoder {
 public:
  WeakDecoder(Codebook codebook, double alpha);

  double alpha() const noexcept { return alpha_; }
  const Codebook& codebook() const noexcept { return codebook_; }

  RealVec folded(std::span<const double> y, std::span<const double> dither) const;
  std::size_t decode(std::span<const double> y, std::span<const double> dither) const;

 private:
  Codebook codebook_;
  double alpha_;
};

/// Uses alpha = mmse_alpha(P, a, N1).
LatticePoint decode_weak(std::span<const double> y, std::span<const double> dither,
                         const ChannelParams& params, const Codebook& codebook);

enum class DecodeOrder { InterferenceFirst, OwnFirst };

struct SuccessiveEstimate {
  std::size_t own = 0;
  std::size_t interference = 0;
};

/// Two-stage successive decoding for Y = c1 + a c2 + noise with both users
/// on the same codebook (sent at unit gain). With InterferenceFirst, a*c2 is
/// found by nearest-point search over the a-scaled codebook, subtracted,
/// and c1 is decoded from the remainder; OwnFirst swaps the stages.
SuccessiveEstimate decode_very_strong(std::span<const double> y, const Codebook& codebook,
                                      const ChannelParams& params,
                                      DecodeOrder order = DecodeOrder::InterferenceFirst);

/// Per-stage check for interference-first successive decoding: with
/// I_i = sum_{j>i} (1 + a^2) P_j still undecoded, stage i needs
/// (a^2 - 1)(I_i + N) >= P_i, i.e. the interfering layer is decodable at a
/// rate no lower than the own layer. Reduces to a^2 >= P + 1 for one layer.
/// Throws StageConditionViolated with the 1-based failing stage.
void check_stage_conditions(const LayeredCodebook& layered, double a, double noise = 1.0);

/// Sum of amplitude_i * c_i over layers.
RealVec layered_signal(const LayeredCodebook& layered, std::span<const std::size_t> messages);

struct LayeredEstimate {
  std::vector<std::size_t> own;
  std::vector<std::size_t> interference;
};

/// N-stage decode-and-subtract: at stage i the interfering layer i, then the
/// own layer i. Stage conditions are checked first at unit reference noise.
LayeredEstimate decode_layered(std::span<const double> y, const LayeredCodebook& layered,
                               const ChannelParams& params);

struct ErrorCount {
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;

  double rate() const noexcept;
  double standard_error() const noexcept;
};

struct Reliability {
  ErrorCount codeword;
  ErrorCount message;  // bin index errors; equals codeword when unbinned
};

/// Receiver-1 error rates with uniformly random codewords for both users.
/// `bin_of` maps codewords to messages (empty: identity).
Reliability simulate_weak(const Codebook& codebook, const ChannelParams& params,
                          std::uint64_t trials, std::uint64_t seed,
                          std::span<const std::size_t> bin_of = {});
Reliability simulate_very_strong(const Codebook& codebook, const ChannelParams& params,
                                 std::uint64_t trials, std::uint64_t seed,
                                 DecodeOrder order = DecodeOrder::InterferenceFirst,
                                 std::span<const std::size_t> bin_of = {});
/// A trial counts as a codeword error if any own layer is wrong.
Reliability simulate_layered(const LayeredCodebook& layered, const ChannelParams& params,
                             std::uint64_t trials, std::uint64_t seed);

struct ResidualStats {
  std::uint64_t samples = 0;        // trials * n scalar samples
  double variance = 0.0;            // of the effective noise alpha Y1 - X1
  double standard_error = 0.0;      // of `variance`
  double folded_variance = 0.0;     // of [alpha Y1 - U1 - L1] mod coarse
  double folded_standard_error = 0.0;
  double max_fold_mismatch = 0.0;   // sup-norm gap between the two, mod coarse
};

/// Residual statistics of the weak-interference receiver at user 1.
ResidualStats weak_residual_stats(const Codebook& codebook, const ChannelParams& params,
                                  std::uint64_t trials, std::uint64_t seed);

}  // namespace latsec
