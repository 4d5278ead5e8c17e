#include "latsec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latsec/error.hpp"

namespace latsec {

void ChannelParams::validate() const {
  if (a == 1.0) throw Error(ErrorCode::UnityGain, "cross gain a = 1 is not supported", 0, "a");
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw Error(ErrorCode::InvalidArgument, "power must be positive", 0, "P");
  }
  if (!(noise1 >= 0.0) || !(noise2 >= 0.0) || !(eve_noise >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise variances must be non-negative", 0, "noise");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument, "gains must be finite", 0, "a");
  }
}

const char* to_string(RegimeKind kind) noexcept {
  switch (kind) {
    case RegimeKind::VeryStrong: return "very-strong";
    case RegimeKind::Weak: return "weak";
    case RegimeKind::General: return "general";
  }
  return "unknown";
}

Regime classify_regime(double a, double power) {
  ChannelParams params;
  params.a = a;
  params.power = power;
  params.validate();
  Regime r;
  r.a_squared = a * a;
  r.very_strong_threshold = power + 1.0;
  r.weak_statistic = std::abs(a + a * a * a * power);
  r.multiuser_threshold = (power + 1.0) * (power + 1.0) / power;
  if (r.a_squared >= r.very_strong_threshold) {
    r.kind = RegimeKind::VeryStrong;
  } else if (r.weak_statistic <= 0.5) {
    r.kind = RegimeKind::Weak;
  } else {
    r.kind = RegimeKind::General;
  }
  return r;
}

double mmse_alpha(double power, double a, double noise) {
  return power / ((1.0 + a * a) * power + noise);
}

double effective_noise_variance_at(double alpha, double power, double a, double noise) {
  return (1.0 - alpha) * (1.0 - alpha) * power + alpha * alpha * (a * a * power + noise);
}

double effective_noise_variance(double power, double a, double noise) {
  return power * (a * a * power + noise) / ((1.0 + a * a) * power + noise);
}

double achievable_rate_weak(double power, double a, double noise) {
  const double denom = a * a * power + noise;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::log2(1.0 + power / denom);
}

double mac_sum_rate_bound(double b, double p1, double p2, double eve_noise) {
  if (eve_noise <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::log2(1.0 + b * b * (p1 + p2) / eve_noise);
}

RandomStream trial_stream(std::uint64_t root_seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return RandomStream(seq);
}

RealVec dither_sample(const ConstructionALattice& lat, RandomStream& rng) {
  return sample_voronoi(lat, rng);
}

RealVec encode_dithered(const LatticePoint& codeword, std::span<const double> dither,
                        const ConstructionALattice& lat) {
  if (dither.size() != codeword.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dither dimension mismatch");
  }
  RealVec x = codeword.coordinates();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dither[i];
  return mod_coarse(x, lat);
}

ChannelOutputs transmit(std::span<const double> x1, std::span<const double> x2,
                        const ChannelParams& params, RandomStream& rng) {
  if (x1.size() != x2.size()) throw Error(ErrorCode::DimensionMismatch, "input dimension mismatch");
  const std::size_t n = x1.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double s1 = std::sqrt(params.noise1);
  const double s2 = std::sqrt(params.noise2);
  const double se = std::sqrt(params.eve_noise);
  ChannelOutputs out{RealVec(n), RealVec(n), RealVec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double n1 = gauss(rng);
    const double n2 = gauss(rng);
    const double ne = gauss(rng);
    out.y1[i] = x1[i] + params.a * x2[i] + s1 * n1;
    out.y2[i] = x2[i] + params.a * x1[i] + s2 * n2;
    out.z[i] = params.b * (x1[i] + x2[i]) + se * ne;
  }
  return out;
}

WeakDecoder::WeakDecoder(Codebook codebook, double alpha)
    : codebook_(std::move(codebook)), alpha_(alpha) {}

RealVec WeakDecoder::folded(std::span<const double> y, std::span<const double> dither) const {
  const std::size_t n = codebook_.dim();
  if (y.size() != n || dither.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "observation dimension mismatch");
  }
  RealVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = alpha_ * y[i] - dither[i];
  return mod_coarse(v, codebook_.lattice());
}

std::size_t WeakDecoder::decode(std::span<const double> y, std::span<const double> dither) const {
  const auto& lat = codebook_.lattice();
  const IntVec rep = lat.reduce(nearest_fine(folded(y, dither), lat));
  const auto idx = codebook_.index_of(rep);
  if (!idx) throw Error(ErrorCode::InvalidArgument, "reduced point is not a codeword");
  return *idx;
}

LatticePoint decode_weak(std::span<const double> y, std::span<const double> dither,
                         const ChannelParams& params, const Codebook& codebook) {
  const WeakDecoder decoder(codebook, mmse_alpha(params.power, params.a, params.noise1));
  return codebook.point(decoder.decode(y, dither));
}

namespace {

// Index of the codeword c minimizing |y - gain * c|; first index on ties.
std::size_t nearest_scaled(std::span<const double> y, const std::vector<RealVec>& points,
                           double gain) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points.size(); ++j) {
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = y[i] - gain * points[j][i];
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::vector<RealVec> real_points(const Codebook& codebook) {
  std::vector<RealVec> out;
  out.reserve(codebook.size());
  for (std::size_t j = 0; j < codebook.size(); ++j) out.push_back(codebook.real_point(j));
  return out;
}

SuccessiveEstimate successive(std::span<const double> y, const std::vector<RealVec>& points,
                              double a, DecodeOrder order) {
  const double first_gain = order == DecodeOrder::InterferenceFirst ? a : 1.0;
  const double second_gain = order == DecodeOrder::InterferenceFirst ? 1.0 : a;
  const std::size_t first = nearest_scaled(y, points, first_gain);
  RealVec rest(y.begin(), y.end());
  for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= first_gain * points[first][i];
  const std::size_t second = nearest_scaled(rest, points, second_gain);
  if (order == DecodeOrder::InterferenceFirst) return {second, first};
  return {first, second};
}

}  // namespace

SuccessiveEstimate decode_very_strong(std::span<const double> y, const Codebook& codebook,
                                      const ChannelParams& params, DecodeOrder order) {
  if (y.size() != codebook.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "observation dimension mismatch");
  }
  return successive(y, real_points(codebook), params.a, order);
}

void check_stage_conditions(const LayeredCodebook& layered, double a, double noise) {
  const auto& powers = layered.powers();
  const double a2 = a * a;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    double remaining = 0.0;
    for (std::size_t j = i + 1; j < powers.size(); ++j) remaining += (1.0 + a2) * powers[j];
    const double lhs = (a2 - 1.0) * (remaining + noise);
    if (lhs < powers[i]) {
      throw Error(ErrorCode::StageConditionViolated,
                  "interference layer " + std::to_string(i + 1) + " is not decodable first",
                  static_cast<std::int64_t>(i + 1));
    }
  }
}

RealVec layered_signal(const LayeredCodebook& layered, std::span<const std::size_t> messages) {
  if (messages.size() != layered.layer_count()) {
    throw Error(ErrorCode::DimensionMismatch, "need one message per layer");
  }
  RealVec x(layered.fine().n(), 0.0);
  for (std::size_t l = 0; l < messages.size(); ++l) {
    const double g = layered.amplitude(l);
    const RealVec c = layered.layers()[l].real_point(messages[l]);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += g * c[i];
  }
  return x;
}

namespace {

std::vector<std::vector<RealVec>> layer_points(const LayeredCodebook& layered) {
  std::vector<std::vector<RealVec>> out;
  for (const auto& cb : layered.layers()) out.push_back(real_points(cb));
  return out;
}

LayeredEstimate layered_decode(std::span<const double> y, const LayeredCodebook& layered,
                               const std::vector<std::vector<RealVec>>& points, double a) {
  LayeredEstimate est;
  RealVec rest(y.begin(), y.end());
  for (std::size_t l = 0; l < layered.layer_count(); ++l) {
    const double g = layered.amplitude(l);
    const std::size_t inter = nearest_scaled(rest, points[l], a * g);
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= a * g * points[l][inter][i];
    const std::size_t own = nearest_scaled(rest, points[l], g);
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= g * points[l][own][i];
    est.interference.push_back(inter);
    est.own.push_back(own);
  }
  return est;
}

}  // namespace

LayeredEstimate decode_layered(std::span<const double> y, const LayeredCodebook& layered,
                               const ChannelParams& params) {
  if (y.size() != layered.fine().n()) {
    throw Error(ErrorCode::DimensionMismatch, "observation dimension mismatch");
  }
  check_stage_conditions(layered, params.a);
  return layered_decode(y, layered, layer_points(layered), params.a);
}

double ErrorCount::rate() const noexcept {
  return trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
}

double ErrorCount::standard_error() const noexcept {
  if (trials == 0) return 0.0;
  const double r = rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

namespace {

void check_bins(std::span<const std::size_t> bin_of, std::size_t size) {
  if (!bin_of.empty() && bin_of.size() != size) {
    throw Error(ErrorCode::DimensionMismatch, "bin map does not cover the codebook");
  }
}

void tally(Reliability& r, std::size_t sent, std::size_t got,
           std::span<const std::size_t> bin_of) {
  ++r.codeword.trials;
  ++r.message.trials;
  if (sent != got) ++r.codeword.errors;
  const bool msg_error = bin_of.empty() ? sent != got : bin_of[sent] != bin_of[got];
  if (msg_error) ++r.message.errors;
}

}  // namespace

Reliability simulate_weak(const Codebook& codebook, const ChannelParams& params,
                          std::uint64_t trials, std::uint64_t seed,
                          std::span<const std::size_t> bin_of) {
  params.validate();
  check_bins(bin_of, codebook.size());
  const auto& lat = codebook.lattice();
  const WeakDecoder decoder(codebook, mmse_alpha(params.power, params.a, params.noise1));
  Reliability r;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rng = trial_stream(seed, t);
    std::uniform_int_distribution<std::size_t> pick(0, codebook.size() - 1);
    const std::size_t m1 = pick(rng);
    const std::size_t m2 = pick(rng);
    const RealVec u1 = dither_sample(lat, rng);
    const RealVec u2 = dither_sample(lat, rng);
    const RealVec x1 = encode_dithered(codebook.point(m1), u1, lat);
    const RealVec x2 = encode_dithered(codebook.point(m2), u2, lat);
    const ChannelOutputs out = transmit(x1, x2, params, rng);
    tally(r, m1, decoder.decode(out.y1, u1), bin_of);
  }
  return r;
}

Reliability simulate_very_strong(const Codebook& codebook, const ChannelParams& params,
                                 std::uint64_t trials, std::uint64_t seed, DecodeOrder order,
                                 std::span<const std::size_t> bin_of) {
  params.validate();
  check_bins(bin_of, codebook.size());
  const auto points = real_points(codebook);
  Reliability r;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rng = trial_stream(seed, t);
    std::uniform_int_distribution<std::size_t> pick(0, codebook.size() - 1);
    const std::size_t m1 = pick(rng);
    const std::size_t m2 = pick(rng);
    const ChannelOutputs out = transmit(points[m1], points[m2], params, rng);
    tally(r, m1, successive(out.y1, points, params.a, order).own, bin_of);
  }
  return r;
}

Reliability simulate_layered(const LayeredCodebook& layered, const ChannelParams& params,
                             std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  check_stage_conditions(layered, params.a);
  const auto points = layer_points(layered);
  const std::size_t layers = layered.layer_count();
  Reliability r;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rng = trial_stream(seed, t);
    std::vector<std::size_t> m1(layers), m2(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      std::uniform_int_distribution<std::size_t> pick(0, points[l].size() - 1);
      m1[l] = pick(rng);
      m2[l] = pick(rng);
    }
    const ChannelOutputs out =
        transmit(layered_signal(layered, m1), layered_signal(layered, m2), params, rng);
    const LayeredEstimate est = layered_decode(out.y1, layered, points, params.a);
    ++r.codeword.trials;
    ++r.message.trials;
    if (est.own != m1) {
      ++r.codeword.errors;
      ++r.message.errors;
    }
  }
  return r;
}

namespace {

struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  // Pebay's single-sample update of central moments.
  void add(double x) {
    const double n1 = static_cast<double>(count);
    ++count;
    const double n = static_cast<double>(count);
    const double delta = x - mean;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double t1 = delta * dn * n1;
    mean += dn;
    m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
    m3 += t1 * dn * (n - 2.0) - 3.0 * dn * m2;
    m2 += t1;
  }

  double variance() const { return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1); }

  double variance_standard_error() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double var = m2 / n;
    const double mu4 = m4 / n;
    return std::sqrt(std::max(0.0, mu4 - var * var) / n);
  }
};

}  // namespace

ResidualStats weak_residual_stats(const Codebook& codebook, const ChannelParams& params,
                                  std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  const auto& lat = codebook.lattice();
  const std::size_t n = lat.n();
  const double alpha = mmse_alpha(params.power, params.a, params.noise1);
  Moments unfolded, folded;
  double mismatch = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rng = trial_stream(seed, t);
    std::uniform_int_distribution<std::size_t> pick(0, codebook.size() - 1);
    const std::size_t m1 = pick(rng);
    const std::size_t m2 = pick(rng);
    const RealVec u1 = dither_sample(lat, rng);
    const RealVec u2 = dither_sample(lat, rng);
    const RealVec c1 = codebook.real_point(m1);
    const RealVec x1 = encode_dithered(codebook.point(m1), u1, lat);
    const RealVec x2 = encode_dithered(codebook.point(m2), u2, lat);
    const ChannelOutputs out = transmit(x1, x2, params, rng);
    RealVec effective(n), raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      effective[i] = alpha * out.y1[i] - x1[i];
      raw[i] = alpha * out.y1[i] - u1[i] - c1[i];
    }
    const RealVec fold = mod_coarse(raw, lat);
    RealVec gap(n);
    for (std::size_t i = 0; i < n; ++i) gap[i] = fold[i] - effective[i];
    for (const double g : mod_coarse(gap, lat)) mismatch = std::max(mismatch, std::abs(g));
    for (std::size_t i = 0; i < n; ++i) {
      unfolded.add(effective[i]);
      folded.add(fold[i]);
    }
  }
  ResidualStats s;
  s.samples = unfolded.count;
  s.variance = unfolded.variance();
  s.standard_error = unfolded.variance_standard_error();
  s.folded_variance = folded.variance();
  s.folded_standard_error = folded.variance_standard_error();
  s.max_fold_mismatch = mismatch;
  return s;
}

}  // namespace latsec
