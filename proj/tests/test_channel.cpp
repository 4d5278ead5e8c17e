#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "latsec/channel.hpp"
#include "latsec/codebook.hpp"
#include "latsec/error.hpp"
#include "latsec/experiments.hpp"

using namespace latsec;

namespace {

ConstructionALattice make(std::int64_t p, std::size_t k, std::size_t n, std::vector<std::int64_t> g,
                          Rational scale = 1) {
  return build_lattice(p, k, n, FieldMatrix(p, n, k, std::move(g)), UnimodularMatrix::identity(n),
                       scale);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Overflow;
}

ChannelParams params(double a, double power, double noise) {
  ChannelParams ch;
  ch.a = a;
  ch.power = power;
  ch.noise1 = noise;
  ch.noise2 = noise;
  return ch;
}

// Chi-square statistic of fractional parallelepiped coordinates of x over
// `cells`^n equal cells; uniform on the Voronoi region <=> uniform here.
struct CellCounter {
  const ConstructionALattice& lat;
  std::size_t cells;
  std::vector<std::uint64_t> counts;

  CellCounter(const ConstructionALattice& l, std::size_t c)
      : lat(l), cells(c), counts(static_cast<std::size_t>(std::pow(c, l.n())), 0) {}

  void add(const RealVec& x) {
    const std::size_t n = lat.n();
    const auto& inv = lat.transform().inverse_entries();
    const double s = lat.scale().to_double();
    std::size_t idx = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double t = 0;
      for (std::size_t c = 0; c < n; ++c) t += static_cast<double>(inv[r * n + c]) * x[c] / s;
      t -= std::floor(t);
      idx = idx * cells + std::min(cells - 1, static_cast<std::size_t>(t * static_cast<double>(cells)));
    }
    ++counts[idx];
  }

  double chi_square() const {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expect = static_cast<double>(total) / static_cast<double>(counts.size());
    double chi = 0;
    for (auto c : counts) chi += (static_cast<double>(c) - expect) * (static_cast<double>(c) - expect) / expect;
    return chi;
  }
};

constexpr double kChi15At1e3 = 37.697;  // upper 0.001 quantile, 15 degrees of freedom

}  // namespace

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime(1.5, 1.0).kind, RegimeKind::VeryStrong);
  const auto weak = classify_regime(0.3, 1.0);
  EXPECT_EQ(weak.kind, RegimeKind::Weak);
  EXPECT_NEAR(weak.weak_statistic, 0.327, 1e-12);
  EXPECT_EQ(classify_regime(0.8, 1.0).kind, RegimeKind::General);
  EXPECT_DOUBLE_EQ(classify_regime(2.0, 1.0).multiuser_threshold, 4.0);
  EXPECT_EQ(code_of([] { classify_regime(1.0, 1.0); }), ErrorCode::UnityGain);
  EXPECT_EQ(code_of([] { params(1.0, 1.0, 1.0).validate(); }), ErrorCode::UnityGain);
  EXPECT_EQ(code_of([] { params(0.5, 0.0, 1.0).validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { params(0.5, 1.0, -1.0).validate(); }), ErrorCode::InvalidArgument);
}

TEST(Formulas, Examples) {
  EXPECT_NEAR(mmse_alpha(1, 0.5, 1), 1 / 2.25, 1e-15);
  EXPECT_DOUBLE_EQ(mmse_alpha(1, 0, 0), 1.0);
  EXPECT_NEAR(mmse_alpha(1e12, 0, 1), 1.0, 1e-9);
  EXPECT_NEAR(effective_noise_variance(1, 0.5, 1), 1.25 / 2.25, 1e-15);
  EXPECT_DOUBLE_EQ(effective_noise_variance(1, 0, 0), 0.0);
  EXPECT_NEAR(effective_noise_variance(1, 0.3, 1), 1.09 / 2.09, 1e-15);
  EXPECT_NEAR(effective_noise_variance(1, 0.3, 1), 0.5215, 1e-4);
  EXPECT_NEAR(achievable_rate_weak(1, 0.5, 1), 0.5 * std::log2(1.8), 1e-15);
  EXPECT_NEAR(achievable_rate_weak(1, 0.5, 1), 0.4240, 1e-4);
  EXPECT_DOUBLE_EQ(achievable_rate_weak(1, 0, 1), 0.5);
  EXPECT_NEAR(achievable_rate_weak(1e-12, 0.5, 1), 0.0, 1e-11);
  EXPECT_NEAR(mac_sum_rate_bound(1, 1, 1, 1), 0.5 * std::log2(3.0), 1e-15);
  EXPECT_TRUE(std::isinf(mac_sum_rate_bound(1, 1, 1, 0)));
}

TEST(Formulas, MmseAlphaIsGridArgmin) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 100; ++t) {
    const double P = u(rng), a = u(rng), N = u(rng);
    const double best = effective_noise_variance_at(mmse_alpha(P, a, N), P, a, N);
    for (int i = 0; i <= 1000; ++i) {
      const double alpha = i * 1e-3;
      const double v = (1 - alpha) * (1 - alpha) * P + alpha * alpha * a * a * P + alpha * alpha * N;
      ASSERT_GE(v, best - 1e-6);
    }
    EXPECT_NEAR(effective_noise_variance(P, a, N) / best, 1.0, 1e-12);
  }
}

TEST(Dither, ScalarFoldIsUniform) {
  const auto lat = make(2, 1, 1, {1});  // coarse Z
  RandomStream rng(17);
  CellCounter cells(lat, 16);
  double sum = 0, sum2 = 0, sum4 = 0;
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) {
    const auto u = dither_sample(lat, rng);
    ASSERT_GE(u[0], -0.5);
    ASSERT_LT(u[0], 0.5);
    cells.add(u);
    sum += u[0];
    sum2 += u[0] * u[0];
    sum4 += u[0] * u[0] * u[0] * u[0];
  }
  EXPECT_LT(cells.chi_square(), kChi15At1e3);
  const double mean = sum / draws, m2 = sum2 / draws;
  EXPECT_LT(std::abs(mean), 3 * std::sqrt(m2 / draws));
  const double se2 = std::sqrt((sum4 / draws - m2 * m2) / draws);
  EXPECT_LT(std::abs(m2 - 1.0 / 12.0), 3 * se2);
}

TEST(Dither, EncodedSignalIndependentOfCodeword) {
  for (const auto& cfg : standard_grid({{3}, 2, 9, 2, 31})) {
    if (cfg.n != 2) continue;
    const auto lat = realize(cfg);
    const auto cb = enumerate_codebook(lat);
    for (std::size_t m = 0; m < cb.size(); ++m) {
      RandomStream rng(1000 + m);
      CellCounter cells(lat, 4);
      for (int i = 0; i < 100'000; ++i) {
        const auto u = dither_sample(lat, rng);
        cells.add(encode_dithered(cb.point(m), u, lat));
      }
      EXPECT_LT(cells.chi_square(), kChi15At1e3) << cfg.label() << " m=" << m;
    }
  }
}

TEST(Encode, Examples) {
  const auto lat = make(3, 1, 1, {1});
  const auto cb = enumerate_codebook(lat);
  const double zero[] = {0.0};
  EXPECT_DOUBLE_EQ(encode_dithered(cb.point(1), zero, lat)[0], cb.real_point(1)[0]);
  const double u[] = {0.25};
  EXPECT_DOUBLE_EQ(encode_dithered(lat.point({0}), u, lat)[0], 0.25);
}

TEST(Transmit, ZeroNoiseExample) {
  ChannelParams ch = params(0.5, 1.0, 0.0);
  ch.eve_noise = 0.0;
  RandomStream rng(0);
  const double x1[] = {1.0}, x2[] = {2.0};
  const auto out = transmit(x1, x2, ch, rng);
  EXPECT_DOUBLE_EQ(out.y1[0], 2.0);
  EXPECT_DOUBLE_EQ(out.y2[0], 2.5);
  EXPECT_DOUBLE_EQ(out.z[0], 3.0);
}

TEST(Transmit, PureNoiseAndOutputVariance) {
  // Cube shaping at scale 7/2: dithered power is exactly 49/48.
  const auto lat = make(2, 1, 1, {1}, Rational(7, 2));
  const auto cb = enumerate_codebook(lat);
  const double P = 49.0 / 48.0;
  const ChannelParams ch = params(0.5, P, 1.0);
  const int trials = 100'000;
  double s = 0, s2 = 0, s4 = 0, z2 = 0;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng = trial_stream(3, t);
    std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
    const auto x1 = encode_dithered(cb.point(pick(rng)), dither_sample(lat, rng), lat);
    const auto x2 = encode_dithered(cb.point(pick(rng)), dither_sample(lat, rng), lat);
    const auto out = transmit(x1, x2, ch, rng);
    s += out.y1[0];
    s2 += out.y1[0] * out.y1[0];
    s4 += std::pow(out.y1[0], 4);
    const double zero[] = {0.0};
    const auto noise = transmit(zero, zero, ch, rng);
    z2 += noise.y1[0] * noise.y1[0];
  }
  const double var = s2 / trials - (s / trials) * (s / trials);
  const double se = std::sqrt((s4 / trials - (s2 / trials) * (s2 / trials)) / trials);
  EXPECT_LT(std::abs(var - (P + 0.25 * P + 1.0)), 3 * se);
  EXPECT_NEAR(z2 / trials, 1.0, 0.02);
}

TEST(TrialStreams, OrderIndependent) {
  RandomStream a = trial_stream(9, 5);
  for (int t = 0; t < 5; ++t) (void)trial_stream(9, t)();
  RandomStream b = trial_stream(9, 5);
  EXPECT_EQ(a(), b());
  EXPECT_NE(trial_stream(9, 5)(), trial_stream(9, 6)());
  EXPECT_NE(trial_stream(9, 5)(), trial_stream(10, 5)());
}

TEST(WeakDecoder, NoiselessLoopback) {
  for (const auto& cfg : standard_grid({{2, 3}, 3, 27, 2, 2})) {
    const auto cb = enumerate_codebook(realize(cfg));
    ChannelParams ch = params(0.0, 1.0, 0.0);
    RandomStream rng(cfg.matrix_seed);
    for (std::size_t m = 0; m < cb.size(); ++m) {
      const auto u = dither_sample(cb.lattice(), rng);
      const auto x = encode_dithered(cb.point(m), u, cb.lattice());
      const double zero_x2[3] = {0, 0, 0};
      const auto out = transmit(x, std::span(zero_x2, x.size()), ch, rng);
      EXPECT_EQ(decode_weak(out.y1, u, ch, cb), cb.point(m)) << cfg.label();
      EXPECT_EQ(WeakDecoder(cb, 1.0).decode(out.y1, u), m);
    }
  }
}

TEST(WeakDecoder, ResidualMatchesEffectiveNoise) {
  const auto cb = fit_to_power(enumerate_codebook(make(2, 1, 2, {1, 1})), 1.0);
  const auto ch = params(0.3, 1.0, 1.0);
  const auto stats = weak_residual_stats(cb, ch, 20'000, 5);
  EXPECT_EQ(stats.samples, 40'000u);
  EXPECT_LT(std::abs(stats.variance - effective_noise_variance(1.0, 0.3, 1.0)), 3 * stats.standard_error);
  EXPECT_LT(stats.max_fold_mismatch, 1e-9);
}

TEST(WeakDecoder, ErrorRateNearRateLimitIsIntermediate) {
  const auto cb = fit_to_power(enumerate_codebook(make(2, 1, 2, {1, 1})), 1.0);
  const double rate = cb.size_log2() / 2.0;
  // Noise chosen so that rate = 0.99 * achievable_rate_weak.
  const double a = 0.3, target = rate / 0.99;
  const double noise = 1.0 / (std::pow(2.0, 2 * target) - 1.0) - a * a;
  const auto ch = params(a, 1.0, noise);
  EXPECT_NEAR(rate, 0.99 * achievable_rate_weak(1.0, a, noise), 1e-12);
  const auto r = simulate_weak(cb, ch, 10'000, 1);
  EXPECT_GT(r.codeword.rate(), 0.0);
  EXPECT_LT(r.codeword.rate(), 1.0);
  std::cout << "weak n=2 error rate at 0.99 of the rate limit: " << r.codeword.rate() << " +- "
            << r.codeword.standard_error() << '\n';
}

TEST(VeryStrong, NoiselessLoopback) {
  for (const auto& cfg : standard_grid({{2, 3}, 2, 9, 2, 2})) {
    const auto cb = enumerate_codebook(realize(cfg));
    ChannelParams ch = params(noiseless_cross_gain(cb), 1.0, 0.0);
    for (std::size_t m1 = 0; m1 < cb.size(); ++m1)
      for (std::size_t m2 = 0; m2 < cb.size(); ++m2) {
        RandomStream rng(0);
        const auto out = transmit(cb.real_point(m1), cb.real_point(m2), ch, rng);
        const auto est = decode_very_strong(out.y1, cb, ch);
        ASSERT_EQ(est.own, m1);
        ASSERT_EQ(est.interference, m2);
      }
  }
}

TEST(VeryStrong, LargerCrossGainDecodesBetter) {
  // Rate 1/2 bit/dim is half the single-user rate at P = 1, N = 1/3.
  const auto cb = fit_to_power(enumerate_codebook(make(2, 1, 2, {1, 1})), 1.0);
  const auto strong = simulate_very_strong(cb, params(10.0, 1.0, 1.0 / 3.0), 10'000, 21);
  const auto marginal = simulate_very_strong(cb, params(1.5, 1.0, 1.0 / 3.0), 10'000, 21);
  EXPECT_LT(strong.codeword.rate(), marginal.codeword.rate());
}

TEST(VeryStrong, InterferenceFirstBeatsOwnFirst) {
  const auto cb = fit_to_power(enumerate_codebook(make(2, 1, 2, {1, 1})), 1.0);
  const auto ch = params(10.0, 1.0, 1.0 / 3.0);
  const auto good = simulate_very_strong(cb, ch, 10'000, 22, DecodeOrder::InterferenceFirst);
  const auto bad = simulate_very_strong(cb, ch, 10'000, 22, DecodeOrder::OwnFirst);
  EXPECT_LT(good.codeword.rate(), bad.codeword.rate());
}

TEST(Layered, SingleLayerMatchesVeryStrong) {
  const auto cb = enumerate_codebook(make(3, 1, 2, {1, 2}));
  const LayerSpec spec{1, Rational(1)};
  const double power = cb.average_power().to_double();  // unit amplitude
  const auto layered = build_layered(cb.lattice(), std::span(&spec, 1), std::span(&power, 1));
  const auto ch = params(3.0, power, 1.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double y[] = {g(rng), g(rng)};
    const auto a = decode_layered(y, layered, ch);
    const auto b = decode_very_strong(y, cb, ch);
    ASSERT_EQ(a.own, std::vector<std::size_t>{b.own});
    ASSERT_EQ(a.interference, std::vector<std::size_t>{b.interference});
  }
}

TEST(Layered, NoiselessTwoLayerRecovery) {
  const auto fine = make(2, 2, 2, {1, 0, 1, 1});
  const LayerSpec specs[] = {{1, Rational(2)}, {1, Rational(1)}};
  const double unit_powers[] = {1.0, 1.0};
  const auto base = build_layered(fine, specs, unit_powers);
  const auto plan = plan_noiseless_layered(base);
  const LayeredCodebook layered(base.fine(), base.layers(), plan.powers);
  ChannelParams ch = params(plan.a, 1.0, 0.0);
  for (std::size_t a0 = 0; a0 < 2; ++a0)
    for (std::size_t a1 = 0; a1 < 2; ++a1)
      for (std::size_t b0 = 0; b0 < 2; ++b0)
        for (std::size_t b1 = 0; b1 < 2; ++b1) {
          const std::size_t m1[] = {a0, a1}, m2[] = {b0, b1};
          RandomStream rng(0);
          const auto out = transmit(layered_signal(layered, m1), layered_signal(layered, m2), ch, rng);
          const auto est = decode_layered(out.y1, layered, ch);
          EXPECT_EQ(est.own, (std::vector<std::size_t>{a0, a1}));
          EXPECT_EQ(est.interference, (std::vector<std::size_t>{b0, b1}));
        }
}

TEST(Layered, StageTwoViolation) {
  const auto fine = make(2, 1, 1, {1});
  const LayerSpec specs[] = {{1, Rational(2)}, {1, Rational(1)}};
  const double powers[] = {0.5, 0.5};
  const auto layered = build_layered(fine, specs, powers);
  try {
    check_stage_conditions(layered, 1.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StageConditionViolated);
    EXPECT_EQ(e.detail(), 2);
  }
  EXPECT_NO_THROW(check_stage_conditions(layered, 3.0));
  const double y[] = {0.0};
  EXPECT_EQ(code_of([&] { decode_layered(y, layered, params(1.2, 1.0, 1.0)); }),
            ErrorCode::StageConditionViolated);
}

TEST(Simulation, SeededRunsRepeat) {
  const auto cb = fit_to_power(enumerate_codebook(make(3, 1, 2, {1, 1})), 1.0);
  const auto ch = params(0.3, 1.0, 0.5);
  const auto a = simulate_weak(cb, ch, 2000, 77);
  const auto b = simulate_weak(cb, ch, 2000, 77);
  EXPECT_EQ(a.codeword.errors, b.codeword.errors);
  const auto c = simulate_very_strong(cb, params(3.0, 1.0, 0.5), 2000, 77);
  const auto d = simulate_very_strong(cb, params(3.0, 1.0, 0.5), 2000, 77);
  EXPECT_EQ(c.codeword.errors, d.codeword.errors);
}

TEST(ErrorCount, RateAndStandardError) {
  const ErrorCount e{25, 100};
  EXPECT_DOUBLE_EQ(e.rate(), 0.25);
  EXPECT_NEAR(e.standard_error(), std::sqrt(0.25 * 0.75 / 100), 1e-15);
  EXPECT_EQ(ErrorCount{}.rate(), 0.0);
}
