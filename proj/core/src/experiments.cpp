#include "latsec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "latsec/error.hpp"

namespace latsec {

namespace {

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (const auto v : parts) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

std::uint64_t ipow(std::int64_t p, std::size_t k) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < k; ++i) v *= static_cast<std::uint64_t>(p);
  return v;
}

ExactLog per_dim(const ExactLog& v, std::size_t n) {
  return v / Rational(static_cast<std::int64_t>(n));
}

bool within_one_bit(const ExactLog& per_dim_value) {
  return per_dim_value.value() <= 1.0 + kOneBitTolerance;
}

// I(L1; L1 + L2) = H(L1 + L2) - H(L2) for i.i.d. L1, L2 ~ dist.
ExactLog self_sum_leak(const PointMassDist& dist, std::uint64_t budget) {
  return entropy_exact(convolve(dist, dist, budget)) - entropy_exact(dist);
}

PointMassDist counting_dist(const std::vector<IntVec>& points, const Rational& unit,
                            std::size_t n) {
  std::vector<std::pair<IntVec, std::uint64_t>> w;
  w.reserve(points.size());
  for (const auto& pt : points) w.emplace_back(pt, 1);
  return PointMassDist(unit, n, std::move(w));
}

std::vector<RealVec> codebook_points(const Codebook& cb) {
  std::vector<RealVec> out;
  for (std::size_t i = 0; i < cb.size(); ++i) out.push_back(cb.real_point(i));
  return out;
}

// Largest norm and smallest pairwise distance (infinite for one point).
std::pair<double, double> radius_and_spacing(const Codebook& cb) {
  const auto pts = codebook_points(cb);
  double r = 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double norm = 0.0;
    for (const double v : pts[i]) norm += v * v;
    r = std::max(r, std::sqrt(norm));
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double dist = 0.0;
      for (std::size_t c = 0; c < pts[i].size(); ++c) {
        dist += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      }
      d = std::min(d, std::sqrt(dist));
    }
  }
  return {r, d};
}

std::vector<std::size_t> tuple_digits(std::uint64_t index, const LayeredCodebook& layered) {
  std::vector<std::size_t> digits(layered.layer_count());
  for (std::size_t l = layered.layer_count(); l-- > 0;) {
    const std::size_t base = layered.layers()[l].size();
    digits[l] = static_cast<std::size_t>(index % base);
    index /= base;
  }
  return digits;
}

std::uint64_t tuple_count(const LayeredCodebook& layered) {
  std::uint64_t t = 1;
  for (const auto& cb : layered.layers()) t *= cb.size();
  return t;
}

}  // namespace

// ------------------------------------------------------------------ configs

std::string LatticeConfig::label() const {
  std::ostringstream os;
  os << "p=" << p << ";k=" << k << ";n=" << n;
  if (g) {
    os << ";G=explicit";
  }
  if (gprime) {
    os << ";G'=explicit";
  }
  if (!g || !gprime) os << ";seed=" << matrix_seed;
  if (scale != Rational(1)) os << ";scale=" << scale.str();
  return os.str();
}

ConstructionALattice realize(const LatticeConfig& config) {
  std::mt19937_64 rng(config.matrix_seed);
  const FieldMatrix g = config.g ? FieldMatrix(config.p, config.n, config.k, *config.g)
                                 : random_full_rank(config.p, config.n, config.k, rng);
  const UnimodularMatrix gp = config.gprime ? UnimodularMatrix(config.n, *config.gprime)
                                            : random_unimodular(config.n, rng);
  return build_lattice(config.p, config.k, config.n, g, gp, config.scale);
}

std::vector<LatticeConfig> standard_grid(const GridSpec& spec) {
  std::vector<LatticeConfig> out;
  for (const auto p : spec.primes) {
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    for (std::size_t n = 1; n <= spec.max_n; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        if (ipow(p, k) > spec.max_size) break;
        for (std::size_t d = 0; d < spec.draws; ++d) {
          LatticeConfig c;
          c.p = p;
          c.k = k;
          c.n = n;
          c.matrix_seed = mix_seed({spec.seed, static_cast<std::uint64_t>(p), k, n, d});
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::BudgetExceeded: return "budget-exceeded";
    case RunStatus::Failed: return "failed";
  }
  return "unknown";
}

// ------------------------------------------------------------------- sum sets

bool SumSetReport::pass() const noexcept {
  return status == RunStatus::Ok && sum_bound.pass && entropy_pass && leakage_pass;
}

SumSetReport run_sumset_check(const LatticeConfig& config, std::uint64_t budget) {
  SumSetReport r;
  r.label = config.label();
  r.n = config.n;
  try {
    const Codebook cb = enumerate_codebook(realize(config), budget);
    r.sum_bound = verify_sum_bound(cb, budget);
    r.h_sum = entropy_exact(convolve(uniform_dist(cb), uniform_dist(cb), budget));
    r.entropy_bound = cb.size_log2() + static_cast<double>(config.n);
    r.entropy_pass = r.h_sum.value() <= r.entropy_bound + kOneBitTolerance;
    r.mutual_info = r.h_sum - ExactLog::log2_of(cb.size());
    r.mutual_info_per_dim = per_dim(r.mutual_info, config.n);
    r.leakage_pass = within_one_bit(r.mutual_info_per_dim);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    r.status = RunStatus::BudgetExceeded;
    r.message = e.what();
  }
  return r;
}

std::vector<SumSetReport> run_sumset_suite(std::span<const LatticeConfig> grid, std::uint64_t budget) {
  std::vector<SumSetReport> out;
  out.reserve(grid.size());
  for (const auto& c : grid) out.push_back(run_sumset_check(c, budget));
  return out;
}

// ----------------------------------------------------------------- secrecy

bool SecrecyReport::pass() const noexcept {
  return status == RunStatus::Ok && onebit_pass && identity_holds && chain_rule_holds;
}

SecrecyReport make_secrecy_report(std::string label, const JointBinSumDist& joint, std::size_t n,
                                  std::uint64_t slots) {
  const LeakageBreakdown b = leakage_breakdown(joint);
  SecrecyReport r;
  r.label = std::move(label);
  r.n = n;
  r.codebook_size = slots;
  r.num_bins = joint.num_bins();
  const double dn = static_cast<double>(n);
  r.rate = std::log2(static_cast<double>(slots)) / dn;
  r.bin_rate = std::log2(static_cast<double>(r.num_bins)) / dn;
  r.leakage = b.leakage;
  r.equivocation = b.h_bin_given_sum;
  r.leakage_per_dim = per_dim(r.leakage, n);
  r.equivocation_per_dim = per_dim(r.equivocation, n);
  // Rhat - leak/n with the leakage taken through the other chain,
  // H(S) - H(S | W), so the identity is a real cross-check.
  const ExactLog rhat = per_dim(ExactLog::log2_of(r.num_bins), n);
  r.identity_holds = r.equivocation_per_dim == rhat - per_dim(b.h_sum - b.h_sum_given_bin, n);
  r.chain_rule_holds = b.chain_rule_holds;
  r.onebit_pass = within_one_bit(r.leakage_per_dim);
  r.sum_gap_bits = 2.0 * r.leakage_per_dim.value();
  return r;
}

SecrecyReport run_secrecy_check(const Codebook& codebook, std::size_t num_bins,
                                std::uint64_t bin_seed, std::string label, std::uint64_t budget) {
  const BinnedCodebook binned = assign_bins(codebook, num_bins, bin_seed);
  return make_secrecy_report(std::move(label), joint_bin_sum(binned, codebook, budget),
                             codebook.dim(), codebook.size());
}

std::vector<SecrecyReport> run_binned_suite(std::span<const LatticeConfig> grid,
                                              std::uint64_t bin_seed, std::uint64_t budget) {
  std::vector<SecrecyReport> out;
  for (const auto& config : grid) {
    try {
      const Codebook cb = enumerate_codebook(realize(config), budget);
      for (std::size_t bins = 1; bins <= cb.size(); ++bins) {
        if (cb.size() % bins != 0) continue;
        out.push_back(run_secrecy_check(cb, bins, bin_seed,
                                        config.label() + ";bins=" + std::to_string(bins), budget));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      SecrecyReport r;
      r.label = config.label();
      r.n = config.n;
      r.status = RunStatus::BudgetExceeded;
      r.message = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ------------------------------------------------------------------ layered

std::string LayeredConfig::label() const {
  std::ostringstream os;
  os << fine.label() << ";layers=";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) os << '/';
    os << layers[i].k << ':' << layers[i].scale.str();
  }
  return os.str();
}

LayeredCodebook realize(const LayeredConfig& config, std::uint64_t budget) {
  const auto lat = realize(config.fine);
  const std::vector<double> powers =
      config.powers.empty() ? std::vector<double>(config.layers.size(), 1.0) : config.powers;
  return build_layered(lat, config.layers, powers, std::numeric_limits<double>::infinity(), budget);
}

std::vector<LayeredConfig> standard_layered_configs() {
  struct Row {
    std::int64_t p;
    std::size_t k, n, k_outer, k_inner;
  };
  // k_outer rides at scale p, k_inner at scale 1.
  const Row rows[] = {{2, 1, 1, 1, 1}, {3, 1, 1, 1, 1}, {5, 1, 1, 1, 1}, {7, 1, 1, 1, 1},
                      {2, 2, 2, 2, 2}, {2, 2, 2, 1, 2}, {2, 2, 2, 2, 1}, {3, 2, 2, 2, 1},
                      {3, 1, 2, 1, 1}, {5, 2, 2, 1, 2}, {2, 3, 3, 2, 3}, {2, 2, 4, 2, 1}};
  std::vector<LayeredConfig> out;
  std::uint64_t seed = 101;
  for (const auto& row : rows) {
    LayeredConfig c;
    c.fine.p = row.p;
    c.fine.k = row.k;
    c.fine.n = row.n;
    c.fine.matrix_seed = seed++;
    c.layers = {{row.k_outer, Rational(row.p)}, {row.k_inner, Rational(1)}};
    out.push_back(std::move(c));
  }
  // Same-scale layers overlap, so layer sums collide and the law of the
  // sum is not uniform on the sum codebook.
  for (const auto& [p, k, k_outer] : {std::tuple<std::int64_t, std::size_t, std::size_t>{2, 2, 1},
                                      {3, 1, 1}}) {
    LayeredConfig c;
    c.fine.p = p;
    c.fine.k = k;
    c.fine.n = k;
    c.fine.matrix_seed = seed++;
    c.layers = {{k_outer, Rational(1)}, {k, Rational(1)}};
    out.push_back(std::move(c));
  }
  // Three layers at scales 4, 2, 1.
  LayeredConfig three;
  three.fine.p = 2;
  three.fine.k = 2;
  three.fine.n = 2;
  three.fine.matrix_seed = seed++;
  three.layers = {{2, Rational(4)}, {1, Rational(2)}, {2, Rational(1)}};
  out.push_back(std::move(three));
  return out;
}

std::vector<IntVec> layer_tuple_points(const LayeredCodebook& layered, std::uint64_t budget) {
  const auto& fine = layered.fine();
  const std::size_t n = fine.n();
  std::vector<std::int64_t> factors;
  for (const auto& cb : layered.layers()) {
    const Rational f = cb.lattice().unit() / fine.unit();
    if (!f.is_integer()) throw Error(ErrorCode::LayerNotNested, "layer grid is not on the fine grid");
    factors.push_back(f.num());
  }
  const std::uint64_t count = tuple_count(layered);
  if (count > budget) throw Error(ErrorCode::BudgetExceeded, "layer tuples exceed budget");
  std::vector<IntVec> out;
  out.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto digits = tuple_digits(t, layered);
    IntVec pt(n, 0);
    for (std::size_t l = 0; l < digits.size(); ++l) {
      const IntVec& v = layered.layers()[l].numerators(digits[l]);
      for (std::size_t i = 0; i < n; ++i) pt[i] += factors[l] * v[i];
    }
    out.push_back(std::move(pt));
  }
  return out;
}

bool LayeredReport::pass() const noexcept { return status == RunStatus::Ok && entropy_pass; }

LayeredReport run_layered_check(const LayeredCodebook& layered, std::string label,
                                std::uint64_t budget) {
  LayeredReport r;
  r.label = std::move(label);
  r.n = layered.fine().n();
  r.layer_count = layered.layer_count();
  try {
    const auto points = layer_tuple_points(layered, budget);
    const Rational unit = layered.fine().unit();
    const PointSet sum_codebook = layered.sum_set(budget);
    r.tuple_count = points.size();
    r.sum_codebook_size = sum_codebook.size();
    r.sums_unique = r.tuple_count == r.sum_codebook_size;

    const PointMassDist law = counting_dist(points, unit, r.n);
    const PointMassDist pair_sum = convolve(law, law, budget);
    r.h_sum = entropy_exact(pair_sum);
    r.entropy_bound = std::log2(static_cast<double>(r.sum_codebook_size)) + static_cast<double>(r.n);
    r.entropy_pass = r.h_sum.value() <= r.entropy_bound + kOneBitTolerance;

    r.double_sum_size = minkowski_sum(sum_codebook, sum_codebook, budget).size();
    r.count_pass = r.double_sum_size <= (std::uint64_t{1} << r.n) * r.sum_codebook_size;
    r.tv = tv_to_uniform(law, sum_codebook);
    r.mutual_info = r.h_sum - entropy_exact(law);
    r.mutual_info_per_dim = per_dim(r.mutual_info, r.n);
    r.leakage_pass = within_one_bit(r.mutual_info_per_dim);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    r.status = RunStatus::BudgetExceeded;
    r.message = e.what();
  }
  return r;
}

std::vector<LayeredReport> run_layered_suite(std::span<const LayeredConfig> configs,
                                             std::uint64_t budget) {
  std::vector<LayeredReport> out;
  for (const auto& c : configs) {
    try {
      out.push_back(run_layered_check(realize(c, budget), c.label(), budget));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      LayeredReport r;
      r.label = c.label();
      r.n = c.fine.n;
      r.layer_count = c.layers.size();
      r.status = RunStatus::BudgetExceeded;
      r.message = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ----------------------------------------------------------------- baseline

bool BaselineComparison::pass(double min_fraction) const noexcept {
  return lattice_within_one == seeds.size() && fraction_random_above_one >= min_fraction;
}

LayeredCodebook matched_lattice_codebook(std::uint64_t size, std::size_t n,
                                         std::uint64_t matrix_seed, std::uint64_t budget) {
  if (size < 2 || n == 0) throw Error(ErrorCode::InvalidArgument, "need size >= 2 and n >= 1");
  std::int64_t p = 2;
  while (size % static_cast<std::uint64_t>(p) != 0) ++p;
  std::size_t total_k = 0;
  std::uint64_t rest = size;
  while (rest % static_cast<std::uint64_t>(p) == 0) {
    rest /= static_cast<std::uint64_t>(p);
    ++total_k;
  }
  if (rest != 1) {
    throw Error(ErrorCode::InvalidArgument, std::to_string(size) + " is not a prime power");
  }
  const std::size_t layer_count = (total_k + n - 1) / n;
  LatticeConfig fine;
  fine.p = p;
  fine.k = std::min(total_k, n);
  fine.n = n;
  fine.matrix_seed = matrix_seed;
  const auto lat = realize(fine);

  std::vector<LayerSpec> specs;
  Rational scale = 1;
  for (std::size_t l = 1; l < layer_count; ++l) scale *= Rational(p);
  std::size_t remaining = total_k;
  for (std::size_t l = 0; l < layer_count; ++l) {
    const std::size_t k = l + 1 < layer_count ? n : remaining;
    specs.push_back({k, scale});
    remaining -= k;
    if (l + 1 < layer_count) scale /= Rational(p);
  }
  const std::vector<double> powers(specs.size(), 1.0);
  return build_layered(lat, specs, powers, std::numeric_limits<double>::infinity(), budget);
}

BaselineComparison random_codebook_baseline(std::uint64_t size, std::size_t n, double power,
                                            std::span<const std::uint64_t> seeds, double b,
                                            double eve_noise, std::uint64_t budget) {
  if (size == 0 || n == 0) throw Error(ErrorCode::InvalidArgument, "need size >= 1 and n >= 1");
  if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "power must be positive");
  if (static_cast<uint128>(size) * size > budget) {
    throw Error(ErrorCode::BudgetExceeded, "size^2 exceeds budget");
  }
  constexpr std::int64_t kGridPerRootPower = 1024;
  // Half-width sqrt(3P) in steps of sqrt(P)/1024.
  const auto half = static_cast<std::int64_t>(std::floor(std::sqrt(3.0) * kGridPerRootPower));
  const Rational unit(1, kGridPerRootPower);
  const double cells = std::pow(static_cast<double>(2 * half + 1), static_cast<double>(n));
  if (static_cast<double>(size) > cells) {
    throw Error(ErrorCode::InvalidArgument, "more codewords than grid points");
  }

  BaselineComparison out;
  out.codebook_size = size;
  out.n = n;
  out.power = power;
  out.mac_sum_rate = mac_sum_rate_bound(b, power, power, eve_noise);
  for (const auto seed : seeds) {
    BaselineSeed s;
    s.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> coord(-half, half);
    std::set<IntVec> drawn;
    while (drawn.size() < size) {
      IntVec v(n);
      for (auto& c : v) c = coord(rng);
      drawn.insert(std::move(v));
    }
    const PointSet random_set =
        PointSet::make(unit, n, std::vector<IntVec>(drawn.begin(), drawn.end()));
    s.distinct_sums = minkowski_sum(random_set, random_set, budget).size();
    s.random_leak = self_sum_leak(uniform_dist(random_set), budget);
    s.random_leak_per_dim = per_dim(s.random_leak, n).value();

    if (size == 1) {
      out.lattice_label = "single-point";
    } else {
      const LayeredCodebook lattice = matched_lattice_codebook(size, n, seed, budget);
      const auto points = layer_tuple_points(lattice, budget);
      s.lattice_leak = self_sum_leak(counting_dist(points, lattice.fine().unit(), n), budget);
      std::ostringstream label;
      label << "p=" << lattice.fine().p() << ";n=" << n << ";layers=" << lattice.layer_count();
      out.lattice_label = label.str();
    }
    s.lattice_leak_per_dim = per_dim(s.lattice_leak, n).value();
    if (s.random_leak_per_dim > 1.0 + kOneBitTolerance) ++out.random_above_one;
    if (s.lattice_leak_per_dim <= 1.0 + kOneBitTolerance) ++out.lattice_within_one;
    out.seeds.push_back(std::move(s));
  }
  out.fraction_random_above_one =
      seeds.empty() ? 0.0
                    : static_cast<double>(out.random_above_one) / static_cast<double>(seeds.size());
  return out;
}

// ----------------------------------------------------------------- loopback

bool LoopbackReport::pass() const noexcept {
  return status == RunStatus::Ok && weak_failures == 0 && very_strong_failures == 0 &&
         layered_failures == 0;
}

double noiseless_cross_gain(const Codebook& codebook) {
  const auto [r, d] = radius_and_spacing(codebook);
  const double rho = std::isinf(d) ? 0.0 : 2.0 * r / d;
  const double power = codebook.average_power().to_double();
  return std::max(rho + 2.0, std::sqrt(power + 1.0));
}

LayeredPlan plan_noiseless_layered(const LayeredCodebook& layered) {
  const std::size_t count = layered.layer_count();
  std::vector<double> radius(count), spacing(count), avg(count);
  double rho_max = 0.0;
  for (std::size_t l = 0; l < count; ++l) {
    const auto [r, d] = radius_and_spacing(layered.layers()[l]);
    radius[l] = r;
    spacing[l] = d;
    avg[l] = layered.layers()[l].average_power().to_double();
    if (!std::isinf(d)) rho_max = std::max(rho_max, 2.0 * r / d);
  }
  double a = rho_max + 2.0;
  for (int attempt = 0; attempt < 64; ++attempt, a *= 2.0) {
    std::vector<double> gain(count, 1.0);
    bool ok = true;
    for (std::size_t l = count; l-- > 0;) {
      double lower = 0.0;
      for (std::size_t j = l + 1; j < count; ++j) lower += (1.0 + a) * gain[j] * radius[j];
      if (!std::isinf(spacing[l])) {
        gain[l] = std::max(1.0, 3.0 * lower / spacing[l]);
        const double half = gain[l] * spacing[l] / 2.0;
        if (!(half > lower) || !(a * half > gain[l] * radius[l] + lower)) ok = false;
      }
    }
    if (!ok) continue;
    LayeredPlan plan;
    plan.a = a;
    for (std::size_t l = 0; l < count; ++l) plan.powers.push_back(gain[l] * gain[l] * avg[l]);
    try {
      check_stage_conditions(LayeredCodebook(layered.fine(), layered.layers(), plan.powers), a);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StageConditionViolated) throw;
      continue;
    }
    return plan;
  }
  throw Error(ErrorCode::InvalidArgument, "no noiseless layered plan found");
}

namespace {

LayeredCodebook split_layers_impl(const ConstructionALattice& lat, bool force_two,
                                  std::uint64_t budget) {
  const std::size_t k = lat.k();
  const Rational outer = lat.scale() * Rational(lat.p());
  std::vector<LayerSpec> specs;
  if (k == 1) {
    if (force_two) specs = {{1, outer}, {1, lat.scale()}};
    else specs = {{1, lat.scale()}};
  } else {
    specs = {{(k + 1) / 2, outer}, {k / 2, lat.scale()}};
  }
  const std::vector<double> powers(specs.size(), 1.0);
  return build_layered(lat, specs, powers, std::numeric_limits<double>::infinity(), budget);
}

}  // namespace

LayeredCodebook split_layers(const ConstructionALattice& lat, std::uint64_t budget) {
  return split_layers_impl(lat, false, budget);
}

LoopbackReport run_loopback(const LatticeConfig& config, std::uint64_t budget) {
  LoopbackReport r;
  r.label = config.label();
  try {
    const auto lat = realize(config);
    const Codebook cb = enumerate_codebook(lat, budget);
    const std::size_t size = cb.size();
    r.codebook_size = size;
    r.combinations = static_cast<std::uint64_t>(size) * size;
    if (r.combinations > budget) throw Error(ErrorCode::BudgetExceeded, "loopback pairs exceed budget");

    // Weak receiver: a = 0, no noise, alpha = 1.
    const WeakDecoder weak(cb, 1.0);
    for (std::size_t m1 = 0; m1 < size; ++m1) {
      for (std::size_t m2 = 0; m2 < size; ++m2) {
        RandomStream rng = trial_stream(config.matrix_seed, m1 * size + m2);
        const RealVec u1 = dither_sample(lat, rng);
        const RealVec x1 = encode_dithered(cb.point(m1), u1, lat);
        if (weak.decode(x1, u1) != m1) ++r.weak_failures;
      }
    }

    ChannelParams quiet;
    quiet.noise1 = quiet.noise2 = quiet.eve_noise = 0.0;
    quiet.a = noiseless_cross_gain(cb);
    r.very_strong_gain = quiet.a;
    const auto points = codebook_points(cb);
    for (std::size_t m1 = 0; m1 < size; ++m1) {
      for (std::size_t m2 = 0; m2 < size; ++m2) {
        RealVec y(points[m1]);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += quiet.a * points[m2][i];
        const auto est = decode_very_strong(y, cb, quiet);
        if (est.own != m1 || est.interference != m2) ++r.very_strong_failures;
      }
    }

    const LayeredCodebook base = split_layers(lat, budget);
    const LayeredPlan plan = plan_noiseless_layered(base);
    const LayeredCodebook layered(base.fine(), base.layers(), plan.powers);
    quiet.a = plan.a;
    r.layered_gain = plan.a;
    r.layer_count = layered.layer_count();
    const std::uint64_t tuples = tuple_count(layered);
    for (std::uint64_t t1 = 0; t1 < tuples; ++t1) {
      const auto d1 = tuple_digits(t1, layered);
      const RealVec s1 = layered_signal(layered, d1);
      for (std::uint64_t t2 = 0; t2 < tuples; ++t2) {
        const auto d2 = tuple_digits(t2, layered);
        RealVec y(s1);
        const RealVec s2 = layered_signal(layered, d2);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += quiet.a * s2[i];
        const auto est = decode_layered(y, layered, quiet);
        if (est.own != d1 || est.interference != d2) ++r.layered_failures;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    r.status = RunStatus::BudgetExceeded;
    r.message = e.what();
  }
  return r;
}

std::vector<LoopbackReport> run_loopback_suite(std::span<const LatticeConfig> grid,
                                               std::uint64_t max_size, std::uint64_t budget) {
  std::vector<LoopbackReport> out;
  for (const auto& c : grid) {
    if (ipow(c.p, c.k) > max_size) continue;
    out.push_back(run_loopback(c, budget));
  }
  return out;
}

// ----------------------------------------------------------------- pipeline

std::vector<double> general_layer_powers(double a, double power) {
  const double a2 = a * a;
  if (!(a2 > 1.0)) throw Error(ErrorCode::InvalidArgument, "layering needs |a| > 1", 0, "a");
  if (a2 - 1.0 >= power) return {power};
  const double inner = a2 - 1.0;
  const double outer = std::min(power - inner, (a2 - 1.0) * ((1.0 + a2) * inner + 1.0));
  return {outer, inner};
}

PipelineReport run_regime_pipeline(const PipelineConfig& config) {
  const ChannelParams& ch = config.channel;
  ch.validate();
  PipelineReport r;
  r.regime = classify_regime(ch.a, ch.power);
  r.mac_sum_rate = mac_sum_rate_bound(ch.b, ch.power, ch.power, ch.eve_noise);
  const auto lat = realize(config.lattice);
  const std::string label = config.lattice.label() + ";bins=" + std::to_string(config.num_bins);
  const std::size_t n = lat.n();

  const bool layered_scheme = r.regime.kind == RegimeKind::General && std::abs(ch.a) > 1.0;
  if (!layered_scheme) {
    const Codebook shaped = fit_to_power(enumerate_codebook(lat, config.budget), ch.power);
    r.secrecy = run_secrecy_check(shaped, config.num_bins, config.bin_seed, label, config.budget);
    const auto bin_of = bin_assignment(shaped.size(), config.num_bins, config.bin_seed);
    r.rate = shaped.size_log2() / static_cast<double>(n);
    if (r.regime.kind == RegimeKind::VeryStrong) {
      r.scheme = "very-strong";
      r.reliability = simulate_very_strong(shaped, ch, config.trials, config.seed,
                                           DecodeOrder::InterferenceFirst, bin_of);
      r.rate_limit = ch.noise1 > 0.0 ? 0.5 * std::log2(1.0 + ch.power / ch.noise1)
                                     : std::numeric_limits<double>::infinity();
      r.transmit_power = shaped.average_power().to_double();
    } else {
      r.scheme = r.regime.kind == RegimeKind::Weak ? "weak" : "weak-tin";
      r.reliability = simulate_weak(shaped, ch, config.trials, config.seed, bin_of);
      r.rate_limit = achievable_rate_weak(ch.power, ch.a, ch.noise1);
      r.transmit_power = voronoi_second_moment(shaped.lattice(), kPowerSamples, kPowerSeed);
    }
    return r;
  }

  r.scheme = "layered";
  r.layer_powers = general_layer_powers(ch.a, ch.power);
  const LayeredCodebook base = split_layers_impl(lat, r.layer_powers.size() > 1, config.budget);
  const LayeredCodebook layered(base.fine(), base.layers(), r.layer_powers);
  const auto points = layer_tuple_points(layered, config.budget);
  const auto bin_of = bin_assignment(points.size(), config.num_bins, config.bin_seed);
  const Rational unit = layered.fine().unit();
  r.secrecy = make_secrecy_report(
      label, joint_bin_sum(points, unit, bin_of, config.num_bins, points, unit, config.budget), n,
      points.size());
  r.rate = std::log2(static_cast<double>(points.size())) / static_cast<double>(n);
  r.reliability = simulate_layered(layered, ch, config.trials, config.seed);
  const double a2 = ch.a * ch.a;
  for (std::size_t l = 0; l < r.layer_powers.size(); ++l) {
    double below = ch.noise1;
    for (std::size_t j = l + 1; j < r.layer_powers.size(); ++j) below += (1.0 + a2) * r.layer_powers[j];
    r.rate_limit += below > 0.0 ? 0.5 * std::log2(1.0 + r.layer_powers[l] / below)
                                : std::numeric_limits<double>::infinity();
    r.transmit_power += r.layer_powers[l];
  }
  return r;
}

}  // namespace latsec
