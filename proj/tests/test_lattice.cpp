#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "latsec/codebook.hpp"
#include "latsec/error.hpp"
#include "latsec/experiments.hpp"
#include "latsec/lattice.hpp"
#include "oracles.hpp"

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
  return ErrorCode::Overflow;  // sentinel: nothing thrown
}

// Rigorous bound on the coarse coefficients of the reduced representative of
// v: |r| <= |v| since w = 0 is a candidate.
std::int64_t coefficient_radius(const ConstructionALattice& lat, const IntVec& v) {
  const std::size_t n = lat.n();
  std::int64_t row_sum = 0;
  for (std::size_t r = 0; r < n; ++r) {
    std::int64_t s = 0;
    for (std::size_t c = 0; c < n; ++c) s += std::abs(lat.transform().inverse_entries()[r * n + c]);
    row_sum = std::max(row_sum, s);
  }
  std::int64_t inf = 0;
  for (auto x : v) inf = std::max<std::int64_t>(inf, std::abs(x));
  const double l2 = std::sqrt(static_cast<double>(oracle::norm_sq(v)));
  return 1 + static_cast<std::int64_t>(
                 std::ceil(static_cast<double>(row_sum) * (static_cast<double>(inf) + l2) /
                           static_cast<double>(lat.p())));
}

}  // namespace

TEST(LatticeBuild, ScalarIdentityCase) {
  const auto lat = make(2, 1, 1, {1});
  EXPECT_EQ(lat.unit(), Rational(1, 2));
  EXPECT_TRUE(is_in_fine(lat.point({1}), lat));      // 1/2
  EXPECT_TRUE(is_in_fine(lat.point({2}), lat));      // 1
  const LatticePoint third{{1}, 3, Rational(1)};     // 1/3
  EXPECT_FALSE(is_in_fine(third, lat));
  EXPECT_TRUE(is_in_fine(lat.point({0}), lat));
}

TEST(LatticeBuild, ThreeCosetsInTwoDimensions) {
  const auto lat = make(3, 1, 2, {1, 1});
  const auto cb = enumerate_codebook(lat);
  EXPECT_EQ(cb.size(), 3u);
  // Cosets by brute force over z in GF(3): (0,0), (1,1)/3, (2,2)/3 ~ (-1,-1)/3.
  std::set<IntVec> got(cb.all_numerators().begin(), cb.all_numerators().end());
  EXPECT_EQ(got, (std::set<IntVec>{{0, 0}, {1, 1}, {-1, -1}}));
}

TEST(LatticeBuild, Errors) {
  EXPECT_EQ(code_of([] { make(2, 1, 1, {0}); }), ErrorCode::RankDeficientG);
  EXPECT_EQ(code_of([] { make(4, 1, 1, {1}); }), ErrorCode::NotPrime);
  EXPECT_EQ(code_of([] { make(2, 1, 1, {1}, Rational(0)); }), ErrorCode::NonPositiveScale);
  EXPECT_EQ(code_of([] { UnimodularMatrix(2, {2, 0, 0, 1}); }), ErrorCode::NotUnimodular);
  EXPECT_EQ(code_of([] { make(2, 2, 1, {1, 1}); }), ErrorCode::InvalidArgument);
}

TEST(Quantize, Examples) {
  const auto lat = make(2, 1, 1, {1});
  const double a[] = {0.2};
  EXPECT_EQ(quantize_coarse(a, lat).coordinates(), RealVec{0.0});
  const double tie[] = {0.5};
  EXPECT_EQ(quantize_coarse(tie, lat).coordinates(), RealVec{1.0});
  const double neg_tie[] = {-0.5};
  EXPECT_EQ(quantize_coarse(neg_tie, lat).coordinates(), RealVec{0.0});

  const auto lat2 = make(2, 2, 2, {1, 0, 0, 1});
  const double b[] = {0.7, -1.4};
  EXPECT_EQ(quantize_coarse(b, lat2).coordinates(), (RealVec{1.0, -1.0}));
}

TEST(ModCoarse, Examples) {
  const auto lat = make(2, 1, 1, {1});
  const double half[] = {0.5};
  const auto m = mod_coarse(half, lat);
  EXPECT_DOUBLE_EQ(m[0], -0.5);
  EXPECT_EQ(mod_coarse(m, lat), m);
  const double x[] = {1.2};
  EXPECT_NEAR(mod_coarse(x, lat)[0], 0.2, 1e-12);
  const double zero[] = {0.0};
  EXPECT_EQ(mod_coarse(zero, lat)[0], 0.0);
  const LatticePoint exact_half = lat.point({1});
  EXPECT_EQ(mod_coarse(exact_half, lat), lat.point({-1}));
}

TEST(ModCoarse, IdempotentOnRandomLattices) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& cfg : standard_grid({{2, 3}, 3, 27, 2, 4})) {
    const auto lat = realize(cfg);
    for (int t = 0; t < 50; ++t) {
      RealVec x(lat.n());
      for (auto& v : x) v = u(rng);
      const auto once = mod_coarse(x, lat);
      const auto twice = mod_coarse(once, lat);
      for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(once[i], twice[i], 1e-9) << cfg.label();
    }
  }
}

TEST(Quantize, MatchesBruteForceSearch) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const auto& cfg : standard_grid({{2, 3, 5}, 3, 125, 2, 9})) {
    const auto lat = realize(cfg);
    const std::size_t n = lat.n();
    const auto& basis = lat.coarse_basis();  // units scale/p, i.e. p G'
    for (int t = 0; t < 20; ++t) {
      RealVec x(n);
      for (auto& v : x) v = u(rng);
      const auto got = quantize_coarse(x, lat).coordinates();
      // x in lattice units; search w around the real solution.
      double best = 1e300;
      RealVec best_pt;
      const double s = lat.scale().to_double();
      const auto& inv = lat.transform().inverse_entries();
      IntVec w0(n);
      for (std::size_t r = 0; r < n; ++r) {
        double acc = 0;
        for (std::size_t c = 0; c < n; ++c) acc += static_cast<double>(inv[r * n + c]) * x[c] / s;
        w0[r] = std::llround(acc);
      }
      oracle::for_each_box(n, -6, 6, [&](IntVec w) {
        for (std::size_t i = 0; i < n; ++i) w[i] += w0[i];
        RealVec pt(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
          double acc = 0;
          for (std::size_t c = 0; c < n; ++c) acc += static_cast<double>(basis[r * n + c] * w[c]);
          pt[r] = acc * s / static_cast<double>(lat.p());
        }
        double d = 0;
        for (std::size_t i = 0; i < n; ++i) d += (x[i] - pt[i]) * (x[i] - pt[i]);
        if (d < best) {
          best = d;
          best_pt = pt;
        }
      });
      double d_got = 0;
      for (std::size_t i = 0; i < n; ++i) d_got += (x[i] - got[i]) * (x[i] - got[i]);
      ASSERT_LE(d_got, best + 1e-9) << cfg.label();
    }
  }
}

TEST(NearestFine, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& cfg : standard_grid({{2, 3}, 3, 27, 2, 3})) {
    const auto lat = realize(cfg);
    const std::size_t n = lat.n(), k = lat.k();
    const auto& g = lat.generator().entries();
    const auto& gp = lat.transform().entries();
    const double unit = lat.unit().to_double();
    // All fine points G'(G z + p w) with small w.
    std::vector<IntVec> pts;
    oracle::for_each_box(k, 0, lat.p() - 1, [&](const IntVec& z) {
      const IntVec gz = oracle::mat_vec(g, n, k, z);
      oracle::for_each_box(n, -4, 4, [&](const IntVec& w) {
        IntVec v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = gz[i] + lat.p() * w[i];
        pts.push_back(oracle::mat_vec(gp, n, n, v));
      });
    });
    for (int t = 0; t < 20; ++t) {
      RealVec x(n);
      for (auto& v : x) v = u(rng);
      auto dist = [&](const IntVec& v) {
        double d = 0;
        for (std::size_t i = 0; i < n; ++i) d += (x[i] - unit * v[i]) * (x[i] - unit * v[i]);
        return d;
      };
      double best = 1e300;
      for (const auto& v : pts) best = std::min(best, dist(v));
      const auto got = nearest_fine(x, lat);
      ASSERT_TRUE(is_in_fine(lat.point(got), lat));
      ASSERT_LE(dist(got), best + 1e-9) << cfg.label();
    }
  }
}

TEST(Codebook, MatchesBruteForceCosetReduction) {
  for (const auto& cfg : standard_grid({{2, 3, 5}, 3, 64, 3, 21})) {
    const auto lat = realize(cfg);
    const auto cb = enumerate_codebook(lat);
    ASSERT_EQ(cb.size(), static_cast<std::size_t>(std::pow(lat.p(), lat.k()))) << cfg.label();
    std::int64_t radius = 0;
    for (const auto& v : cb.all_numerators()) radius = std::max(radius, coefficient_radius(lat, v));
    // Reduction of G' G z, z in [0, p)^k: bound from the unreduced points.
    const std::size_t n = lat.n(), k = lat.k();
    oracle::for_each_box(k, 0, lat.p() - 1, [&](const IntVec& z) {
      IntVec gz = oracle::mat_vec(lat.generator().entries(), n, k, z);
      for (auto& x : gz) x = oracle::mod_p(x, lat.p());
      radius = std::max(radius, coefficient_radius(lat, oracle::mat_vec(lat.transform().entries(), n, n, gz)));
    });
    if (radius > 8) continue;
    const auto want = oracle::codebook_brute(lat.p(), k, n, lat.generator().entries(),
                                             lat.transform().entries(), radius);
    const std::set<IntVec> got(cb.all_numerators().begin(), cb.all_numerators().end());
    EXPECT_EQ(got, want) << cfg.label();
  }
}

TEST(Codebook, Examples) {
  const auto c2 = enumerate_codebook(make(2, 1, 1, {1}));
  EXPECT_EQ(c2.size(), 2u);
  EXPECT_EQ(c2.point_set().points, (std::vector<IntVec>{{-1}, {0}}));  // {-1/2, 0}
  const auto c3 = enumerate_codebook(make(3, 1, 1, {1}));
  EXPECT_EQ(c3.point_set().points, (std::vector<IntVec>{{-1}, {0}, {1}}));  // {-1/3, 0, 1/3}
  EXPECT_EQ(c3.average_power(), Rational(2, 27));
}

TEST(Codebook, MessageIndexingFollowsBasePDigits) {
  const auto lat = make(3, 2, 2, {1, 0, 1, 1});
  const auto cb = enumerate_codebook(lat);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const IntVec z{static_cast<std::int64_t>(i / 3), static_cast<std::int64_t>(i % 3)};
    const auto want = lat.reduce(lat.fine_numerators(z, IntVec{0, 0}));
    EXPECT_EQ(cb.numerators(i), want);
    EXPECT_EQ(cb.index_of(want), i);
  }
}

TEST(Codebook, PropertiesOnGrid) {
  for (const auto& cfg : standard_grid({{2, 3, 5, 7}, 4, 128, 2, 3})) {
    const auto lat = realize(cfg);
    const auto cb = enumerate_codebook(lat);
    std::set<IntVec> cosets;
    for (const auto& v : cb.all_numerators()) {
      ASSERT_TRUE(is_in_fine(lat.point(v), lat));
      ASSERT_EQ(lat.reduce(v), v) << "not a Voronoi representative";
      // Coset label: G'^-1 v mod p.
      auto u = lat.transform().apply_inverse(v);
      for (auto& x : u) x = oracle::mod_p(x, lat.p());
      cosets.insert(u);
    }
    EXPECT_EQ(cosets.size(), cb.size()) << cfg.label();
  }
}

TEST(SampleVoronoi, InsideRegion) {
  std::mt19937_64 rng(3);
  for (const auto& cfg : standard_grid({{2, 3}, 3, 27, 2, 1})) {
    const auto lat = realize(cfg);
    for (int t = 0; t < 100; ++t) {
      const auto u = sample_voronoi(lat, rng);
      const auto q = quantize_coarse(u, lat).coordinates();
      for (double v : q) ASSERT_EQ(v, 0.0) << cfg.label();
    }
  }
}

TEST(RandomMatrices, FullRankAndUnimodular) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto g = random_full_rank(3, 4, 2, rng);
    EXPECT_EQ(g.rank(), 2u);
    const auto u = random_unimodular(4, rng);
    EXPECT_EQ(std::abs(u.determinant()), 1);
    const IntVec v{3, -1, 4, 1};
    EXPECT_EQ(u.apply_inverse(u.apply(v)), v);
  }
}

TEST(Realize, DeterministicFromSeed) {
  LatticeConfig cfg;
  cfg.p = 5;
  cfg.k = 2;
  cfg.n = 3;
  cfg.matrix_seed = 42;
  const auto a = realize(cfg), b = realize(cfg);
  EXPECT_EQ(a.generator().entries(), b.generator().entries());
  EXPECT_EQ(a.transform().entries(), b.transform().entries());
}
