// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "latsec/channel.hpp"
#include "latsec/config.hpp"
#include "latsec/experiments.hpp"
#include "latsec/report.hpp"

using namespace latsec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d [%s] %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LatticeConfig scalar(std::int64_t p) {
  LatticeConfig c;
  c.p = p;
  c.g = std::vector<std::int64_t>{1};
  c.gprime = std::vector<std::int64_t>{1};
  return c;
}

}  // namespace

int main() {
  const auto grid = standard_grid();
  std::vector<SumSetReport> sumset;
  double sumset_seconds = 0;

  report(1, "sum-set bound over the grid, < 60 s", [&] {
    const auto t0 = Clock::now();
    sumset = run_sumset_suite(grid);
    sumset_seconds = seconds_since(t0);
    std::size_t violations = 0, skipped = 0;
    for (const auto& r : sumset) {
      if (r.status != RunStatus::Ok) ++skipped;
      else if (!r.sum_bound.pass) ++violations;
    }
    return Outcome{violations == 0 && skipped == 0 && sumset_seconds < 60.0,
                   fmt("%zu configs, %zu violations, %zu not run, %.2f s", sumset.size(), violations,
                       skipped, sumset_seconds)};
  });

  report(2, "per-dimension leakage of X1 + X2 <= 1, spot values", [&] {
    std::size_t violations = 0;
    double worst = 0;
    for (const auto& r : sumset) {
      if (r.status != RunStatus::Ok || !r.leakage_pass || !r.entropy_pass) ++violations;
      worst = std::max(worst, r.mutual_info_per_dim.value());
    }
    const LatticeConfig spots[] = {scalar(2), scalar(3)};
    const auto s = run_sumset_suite(spots);
    const double v2 = s[0].mutual_info_per_dim.value(), v3 = s[1].mutual_info_per_dim.value();
    const double want3 = 2.0 / 3.0 * std::log2(3.0) - 4.0 / 9.0;
    // 0.6121 is the four-decimal truncation of the closed form.
    const bool spot = v2 == 0.5 && std::abs(v3 - want3) <= 1e-9 && std::floor(v3 * 1e4) == 6121.0;
    return Outcome{!sumset.empty() && violations == 0 && spot,
                   fmt("%zu violations, max %.6f bits/dim; (2,1,1) = %.17g, (3,1,1) = %.12f [%s]",
                       violations, worst, v2, v3, s[1].mutual_info_per_dim.str().c_str())};
  });

  report(3, "binned leakage <= 1 bit/dim for every divisor, exact equivocation identity", [&] {
    const auto t0 = Clock::now();
    const auto reports = run_binned_suite(grid);
    std::size_t violations = 0, identity = 0;
    double worst = 0;
    for (const auto& r : reports) {
      if (r.status != RunStatus::Ok || !r.onebit_pass) ++violations;
      if (!r.identity_holds) ++identity;
      worst = std::max(worst, r.leakage_per_dim.value());
    }
    return Outcome{!reports.empty() && violations == 0 && identity == 0,
                   fmt("%zu reports, %zu violations, %zu identity failures, max %.6f bits/dim, %.2f s",
                       reports.size(), violations, identity, worst, seconds_since(t0))};
  });

  report(4, "layered sum entropy bound over fixed configurations", [&] {
    const auto configs = standard_layered_configs();
    const auto reports = run_layered_suite(configs);
    std::size_t violations = 0;
    std::string tvs;
    for (const auto& r : reports) {
      if (!r.pass()) ++violations;
      if (!r.tv.is_zero()) tvs += (tvs.empty() ? "" : ", ") + r.tv.str();
    }
    return Outcome{configs.size() >= 10 && violations == 0,
                   fmt("%zu configs, %zu violations; nonzero TV to uniform: %s", configs.size(),
                       violations, tvs.empty() ? "none" : tvs.c_str())};
  });

  report(5, "MMSE scaling is the grid argmin, closed-form variance identity", [&] {
    std::mt19937_64 rng(20240605);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst_gain = 0, worst_rel = 0;
    for (int t = 0; t < 100; ++t) {
      const double P = u(rng), a = u(rng), N = u(rng);
      const double alpha = mmse_alpha(P, a, N);
      const double at = (1 - alpha) * (1 - alpha) * P + alpha * alpha * a * a * P + alpha * alpha * N;
      for (int i = 0; i <= 1000; ++i) {
        const double g = i * 1e-3;
        const double v = (1 - g) * (1 - g) * P + g * g * a * a * P + g * g * N;
        worst_gain = std::max(worst_gain, at - v);
      }
      worst_rel = std::max(worst_rel, std::abs(effective_noise_variance(P, a, N) - at) / at);
    }
    return Outcome{worst_gain <= 1e-6 && worst_rel <= 1e-12,
                   fmt("largest grid improvement %.3g, largest relative identity gap %.3g", worst_gain,
                       worst_rel)};
  });

  report(6, "weak-scheme residual variance at P=1, a=0.3, N=1, n=2, 1e5 trials", [&] {
    LatticeConfig cfg;
    cfg.p = 2;
    cfg.k = 1;
    cfg.n = 2;
    cfg.g = std::vector<std::int64_t>{1, 1};
    cfg.gprime = std::vector<std::int64_t>{1, 0, 0, 1};
    const auto cb = fit_to_power(enumerate_codebook(realize(cfg)), 1.0);
    ChannelParams ch;
    ch.a = 0.3;
    ch.power = 1.0;
    const auto s = weak_residual_stats(cb, ch, 100'000, 6);
    const double want = effective_noise_variance(1.0, 0.3, 1.0);
    const double z = (s.variance - want) / s.standard_error;
    return Outcome{std::abs(z) <= 3.0 && s.max_fold_mismatch < 1e-9,
                   fmt("variance %.5f +- %.5f vs %.5f (z = %.2f); folded %.5f +- %.5f; fold mismatch %.2g",
                       s.variance, s.standard_error, want, z, s.folded_variance,
                       s.folded_standard_error, s.max_fold_mismatch)};
  });

  report(7, "noiseless loopback of all schemes for |C| <= 64", [&] {
    const auto t0 = Clock::now();
    const auto reports = run_loopback_suite(grid, 64);
    std::size_t failed = 0;
    std::uint64_t combos = 0;
    for (const auto& r : reports) {
      if (!r.pass()) ++failed;
      combos += r.combinations;
    }
    return Outcome{!reports.empty() && failed == 0,
                   fmt("%zu configs, %llu message pairs per scheme, %zu failures, %.2f s", reports.size(),
                       static_cast<unsigned long long>(combos), failed, seconds_since(t0))};
  });

  report(8, "random vs lattice codebooks, |C|=16, n=2, 100 seeds, < 120 s", [&] {
    const auto t0 = Clock::now();
    std::vector<std::uint64_t> seeds(100);
    for (std::uint64_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
    const auto cmp = random_codebook_baseline(16, 2, 1.0, seeds);
    const double secs = seconds_since(t0);
    return Outcome{cmp.random_above_one >= 95 && cmp.lattice_within_one == 100 && secs < 120.0,
                   fmt("random above 1 bit/dim in %llu/100, lattice within in %llu/100, %.2f s",
                       static_cast<unsigned long long>(cmp.random_above_one),
                       static_cast<unsigned long long>(cmp.lattice_within_one), secs)};
  });

  report(9, "leakage field identical across b and Ne", [&] {
    std::string ref;
    std::size_t runs = 0, mismatches = 0;
    for (double b : {0.1, 1.0, 10.0})
      for (double ne : {0.0, 1.0}) {
        auto c = parse_config("kind = pipeline\na = 1.5\np = 3\nk = 2\nn = 2\nbins = 3\ntrials = 200\n");
        c.channel.b = b;
        c.channel.eve_noise = ne;
        const auto env = run(c);
        const std::string field = env.items.at(0).at("secrecy").at("leakage").dump();
        if (runs++ == 0) ref = field;
        else if (field != ref) ++mismatches;
      }
    return Outcome{mismatches == 0, fmt("%zu runs, %zu mismatches, field %s", runs, mismatches, ref.c_str())};
  });

  report(10, "byte-identical payloads across repeated runs", [&] {
    const char* configs[] = {
        "kind = lattice\np = 3\nk = 1\nn = 2\nmatrix_seed = 4\n",
        "kind = lemmas\ngrid_primes = 2,3\ngrid_max_n = 3\ngrid_max_size = 27\n",
        "kind = theorem1\np = 2\nk = 2\nn = 3\n",
        "kind = layered\np = 2\nk = 2\nn = 2\nlayers = 1:2,2:1\na = 3\ntrials = 500\n",
        "kind = baseline\nbaseline_seeds = 5\n",
        "kind = pipeline\na = 0.3\np = 3\nk = 1\nn = 2\nbins = 3\ntrials = 2000\n",
        "kind = pipeline\na = 1.2\np = 2\nk = 2\nn = 2\ntrials = 2000\n",
        "kind = sweep\np = 2\nk = 1\nn = 2\ntrials = 1000\n",
    };
    std::size_t differ = 0;
    for (const char* text : configs) {
      const auto c = parse_config(text);
      const auto a = run(c), b = run(c);
      if (a.to_json(false).dump() != b.to_json(false).dump() || a.to_csv() != b.to_csv()) ++differ;
    }
    return Outcome{differ == 0, fmt("%zu configs, %zu differing payloads", std::size(configs), differ)};
  });

  std::printf("acceptance: %d failing criteria\n", failures);
  return failures == 0 ? 0 : 1;
}
