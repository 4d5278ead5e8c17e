#include "latsec/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "latsec/error.hpp"

namespace latsec {

namespace {

using J = nlohmann::ordered_json;

constexpr const char* kExact = "exact-rational";
constexpr const char* kMonteCarlo = "monte-carlo±stderr";
constexpr const char* kFormula = "formula";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

J exact(const ExactLog& v) { return {{"value", v.value()}, {"exact", v.str()}, {"provenance", kExact}}; }
J exact(const Rational& v) { return {{"value", v.to_double()}, {"exact", v.str()}, {"provenance", kExact}}; }
J count(std::uint64_t v) {
  return {{"value", v}, {"exact", std::to_string(v)}, {"provenance", kExact}};
}
J formula(double v) { return {{"value", v}, {"provenance", kFormula}}; }
J monte_carlo(double v, double se) {
  return {{"value", v}, {"stderr", se}, {"provenance", kMonteCarlo}};
}
J monte_carlo(double v) { return {{"value", v}, {"stderr", nullptr}, {"provenance", kMonteCarlo}}; }

struct Builder {
  ResultEnvelope& env;
  bool failed = false;
  bool over_budget = false;

  void row(J item, std::vector<std::string> cells) {
    env.items.push_back(std::move(item));
    env.rows.push_back(std::move(cells));
  }
  void note(RunStatus status, bool pass) {
    if (status == RunStatus::BudgetExceeded) over_budget = true;
    else if (!pass) failed = true;
  }
  void finish() {
    env.verdict = failed ? Verdict::Fail : over_budget ? Verdict::BudgetExceeded : Verdict::Pass;
  }
};

std::vector<LatticeConfig> grid_of(const ExperimentConfig& c) {
  if (c.lattice) return {*c.lattice};
  return standard_grid(c.grid);
}

std::string join_exact(const LatticePoint& pt) {
  std::string out;
  for (std::size_t i = 0; i < pt.dim(); ++i) {
    if (i) out += ';';
    out += pt.coordinate(i).str();
  }
  return out;
}

std::string join_real(const RealVec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------- per kind

void run_lattice(const ExperimentConfig& c, Builder& b) {
  const LatticeConfig lc = c.lattice.value_or(LatticeConfig{});
  const auto lat = realize(lc);
  const Codebook cb = enumerate_codebook(lat, c.budget);
  const auto bound = verify_sum_bound(cb, c.budget);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const LatticePoint pt = cb.point(i);
    Rational norm = 0;
    for (std::size_t d = 0; d < pt.dim(); ++d) norm += pt.coordinate(d) * pt.coordinate(d);
    J item;
    item["index"] = i;
    J coords = J::array();
    for (std::size_t d = 0; d < pt.dim(); ++d) coords.push_back(exact(pt.coordinate(d)));
    item["coordinates"] = coords;
    item["norm_sq"] = exact(norm);
    b.row(item, {fmt(std::uint64_t{i}), join_exact(pt), join_real(pt.coordinates()), norm.str(),
                 fmt(norm.to_double())});
  }
  J& s = b.env.summary;
  s["label"] = lc.label();
  s["G"] = lat.generator().entries();
  s["Gprime"] = lat.transform().entries();
  s["fine_basis_units"] = lat.fine_basis();
  s["coarse_basis_units"] = lat.coarse_basis();
  s["unit"] = exact(lat.unit());
  s["codebook_size"] = count(cb.size());
  s["average_power"] = exact(cb.average_power());
  s["sum_size"] = count(bound.sum_size);
  s["sum_bound"] = count(bound.bound);
  s["sum_bound_pass"] = bound.pass;
  b.note(RunStatus::Ok, bound.pass);
}

void run_sumset(const ExperimentConfig& c, Builder& b) {
  const auto grid = grid_of(c);
  const auto reports = run_sumset_suite(grid, c.budget);
  std::uint64_t passed = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const auto& g = grid[i];
    J item;
    item["label"] = r.label;
    item["status"] = to_string(r.status);
    if (r.status == RunStatus::Ok) {
      item["codebook_size"] = count(r.sum_bound.codebook_size);
      item["sum_size"] = count(r.sum_bound.sum_size);
      item["sum_bound"] = count(r.sum_bound.bound);
      item["sum_bound_pass"] = r.sum_bound.pass;
      item["h_sum"] = exact(r.h_sum);
      item["entropy_bound"] = formula(r.entropy_bound);
      item["entropy_pass"] = r.entropy_pass;
      item["mutual_info"] = exact(r.mutual_info);
      item["mutual_info_per_dim"] = exact(r.mutual_info_per_dim);
      item["leakage_pass"] = r.leakage_pass;
    } else {
      item["message"] = r.message;
    }
    const bool ok = r.status == RunStatus::Ok;
    b.row(item, {r.label, std::to_string(g.p), std::to_string(g.k), std::to_string(g.n),
                 std::to_string(g.matrix_seed), to_string(r.status),
                 ok ? fmt(r.sum_bound.codebook_size) : "", ok ? fmt(r.sum_bound.sum_size) : "",
                 ok ? fmt(r.sum_bound.bound) : "", ok ? fmt(r.sum_bound.pass) : "",
                 ok ? r.h_sum.str() : "", ok ? fmt(r.h_sum.value()) : "",
                 ok ? fmt(r.entropy_bound) : "", ok ? fmt(r.entropy_pass) : "",
                 ok ? r.mutual_info.str() : "", ok ? fmt(r.mutual_info.value()) : "",
                 ok ? r.mutual_info_per_dim.str() : "", ok ? fmt(r.mutual_info_per_dim.value()) : "",
                 ok ? fmt(r.leakage_pass) : ""});
    b.note(r.status, r.pass());
    if (r.pass()) ++passed;
  }
  b.env.summary["configs"] = reports.size();
  b.env.summary["passed"] = passed;
}

std::vector<std::string> secrecy_cells(const SecrecyReport& r) {
  const bool ok = r.status == RunStatus::Ok;
  if (!ok) return std::vector<std::string>(14, "");
  return {fmt(r.codebook_size), fmt(r.num_bins), fmt(r.rate), fmt(r.bin_rate),
          r.leakage.str(), fmt(r.leakage.value()), r.leakage_per_dim.str(),
          fmt(r.leakage_per_dim.value()), r.equivocation_per_dim.str(),
          fmt(r.equivocation_per_dim.value()), fmt(r.identity_holds), fmt(r.chain_rule_holds),
          fmt(r.onebit_pass), fmt(r.sum_gap_bits)};
}

J secrecy_json(const SecrecyReport& r) {
  J item;
  item["label"] = r.label;
  item["status"] = to_string(r.status);
  if (r.status != RunStatus::Ok) {
    item["message"] = r.message;
    return item;
  }
  item["codebook_size"] = count(r.codebook_size);
  item["bins"] = count(r.num_bins);
  item["rate"] = formula(r.rate);
  item["bin_rate"] = formula(r.bin_rate);
  item["leakage"] = exact(r.leakage);
  item["leakage_per_dim"] = exact(r.leakage_per_dim);
  item["equivocation"] = exact(r.equivocation);
  item["equivocation_per_dim"] = exact(r.equivocation_per_dim);
  item["identity_holds"] = r.identity_holds;
  item["chain_rule_holds"] = r.chain_rule_holds;
  item["onebit_pass"] = r.onebit_pass;
  item["sum_gap_bits"] = exact(r.leakage_per_dim * Rational(2));
  return item;
}

void run_binned(const ExperimentConfig& c, Builder& b) {
  const auto grid = grid_of(c);
  std::vector<SecrecyReport> reports;
  if (c.num_bins_set) {
    for (const auto& g : grid) {
      try {
        const Codebook cb = enumerate_codebook(realize(g), c.budget);
        reports.push_back(run_secrecy_check(cb, c.num_bins, c.bin_seed,
                                            g.label() + ";bins=" + std::to_string(c.num_bins), c.budget));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) throw;
        SecrecyReport r;
        r.label = g.label();
        r.n = g.n;
        r.status = RunStatus::BudgetExceeded;
        r.message = e.what();
        reports.push_back(std::move(r));
      }
    }
  } else {
    reports = run_binned_suite(grid, c.bin_seed, c.budget);
  }
  std::uint64_t passed = 0;
  for (const auto& r : reports) {
    std::vector<std::string> cells{r.label, std::to_string(r.n), to_string(r.status)};
    for (auto& s : secrecy_cells(r)) cells.push_back(std::move(s));
    b.row(secrecy_json(r), std::move(cells));
    b.note(r.status, r.pass());
    if (r.pass()) ++passed;
  }
  b.env.summary["reports"] = reports.size();
  b.env.summary["passed"] = passed;
}

void run_layered(const ExperimentConfig& c, Builder& b) {
  std::vector<LayeredConfig> configs;
  if (!c.layers.empty()) {
    LayeredConfig lc;
    lc.fine = c.lattice.value_or(LatticeConfig{});
    lc.layers = c.layers;
    lc.powers = c.layer_powers;
    configs.push_back(std::move(lc));
  } else {
    configs = standard_layered_configs();
  }
  std::uint64_t passed = 0;
  for (const auto& lc : configs) {
    LayeredReport r;
    std::string stage = "not-run";
    std::optional<Reliability> rel;
    try {
      const LayeredCodebook layered = realize(lc, c.budget);
      r = run_layered_check(layered, lc.label(), c.budget);
      if (c.channel_gain_set) {
        try {
          check_stage_conditions(layered, c.channel.a);
          rel = simulate_layered(layered, c.channel, c.trials, c.seed);
          stage = "ok";
        } catch (const Error& e) {
          if (e.code() != ErrorCode::StageConditionViolated) throw;
          stage = "violated(stage=" + std::to_string(e.detail()) + ")";
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      r.label = lc.label();
      r.n = lc.fine.n;
      r.layer_count = lc.layers.size();
      r.status = RunStatus::BudgetExceeded;
      r.message = e.what();
    }
    const bool ok = r.status == RunStatus::Ok;
    J item;
    item["label"] = r.label;
    item["status"] = to_string(r.status);
    item["layers"] = r.layer_count;
    if (ok) {
      item["tuple_count"] = count(r.tuple_count);
      item["sum_codebook_size"] = count(r.sum_codebook_size);
      item["sums_unique"] = r.sums_unique;
      item["h_sum"] = exact(r.h_sum);
      item["entropy_bound"] = formula(r.entropy_bound);
      item["entropy_pass"] = r.entropy_pass;
      item["double_sum_size"] = count(r.double_sum_size);
      item["count_pass"] = r.count_pass;
      item["tv_to_uniform"] = exact(r.tv);
      item["mutual_info_per_dim"] = exact(r.mutual_info_per_dim);
      item["leakage_pass"] = r.leakage_pass;
    } else {
      item["message"] = r.message;
    }
    item["stage_conditions"] = stage;
    if (rel) {
      item["error_rate"] = monte_carlo(rel->codeword.rate(), rel->codeword.standard_error());
      item["trials"] = count(rel->codeword.trials);
    }
    b.row(item, {r.label, std::to_string(r.n), std::to_string(r.layer_count), to_string(r.status),
                 ok ? fmt(r.tuple_count) : "", ok ? fmt(r.sum_codebook_size) : "",
                 ok ? fmt(r.sums_unique) : "", ok ? r.h_sum.str() : "",
                 ok ? fmt(r.h_sum.value()) : "", ok ? fmt(r.entropy_bound) : "",
                 ok ? fmt(r.entropy_pass) : "", ok ? fmt(r.double_sum_size) : "",
                 ok ? fmt(r.count_pass) : "", ok ? r.tv.str() : "", ok ? fmt(r.tv.to_double()) : "",
                 ok ? r.mutual_info_per_dim.str() : "", ok ? fmt(r.mutual_info_per_dim.value()) : "",
                 ok ? fmt(r.leakage_pass) : "", stage, rel ? fmt(rel->codeword.rate()) : "",
                 rel ? fmt(rel->codeword.standard_error()) : ""});
    const bool pass = r.pass() && stage.rfind("violated", 0) != 0;
    b.note(r.status, pass);
    if (pass) ++passed;
  }
  b.env.summary["configs"] = configs.size();
  b.env.summary["passed"] = passed;
}

void run_baseline(const ExperimentConfig& c, Builder& b) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < c.baseline_seeds; ++i) seeds.push_back(c.seed + i);
  const auto cmp = random_codebook_baseline(c.baseline_size, c.baseline_n, c.channel.power, seeds,
                                            c.channel.b, c.channel.eve_noise, c.budget);
  for (const auto& s : cmp.seeds) {
    const bool above = s.random_leak_per_dim > 1.0 + kOneBitTolerance;
    const bool within = s.lattice_leak_per_dim <= 1.0 + kOneBitTolerance;
    J item;
    item["seed"] = s.seed;
    item["distinct_sums"] = count(s.distinct_sums);
    item["random_leak"] = exact(s.random_leak);
    item["random_leak_per_dim"] = exact(s.random_leak / Rational(static_cast<std::int64_t>(cmp.n)));
    item["lattice_leak"] = exact(s.lattice_leak);
    item["lattice_leak_per_dim"] = exact(s.lattice_leak / Rational(static_cast<std::int64_t>(cmp.n)));
    item["random_above_one"] = above;
    item["lattice_within_one"] = within;
    b.row(item, {fmt(s.seed), fmt(s.distinct_sums), s.random_leak.str(), fmt(s.random_leak.value()),
                 fmt(s.random_leak_per_dim), s.lattice_leak.str(), fmt(s.lattice_leak.value()),
                 fmt(s.lattice_leak_per_dim), fmt(above), fmt(within)});
  }
  J& s = b.env.summary;
  s["codebook_size"] = cmp.codebook_size;
  s["n"] = cmp.n;
  s["lattice"] = cmp.lattice_label;
  s["seeds"] = cmp.seeds.size();
  s["random_above_one"] = cmp.random_above_one;
  s["lattice_within_one"] = cmp.lattice_within_one;
  s["fraction_random_above_one"] = exact(Rational(static_cast<std::int64_t>(cmp.random_above_one),
                                                  static_cast<std::int64_t>(std::max<std::size_t>(1, cmp.seeds.size()))));
  s["mac_sum_rate"] = formula(cmp.mac_sum_rate);
  s["pass"] = cmp.pass();
  b.note(RunStatus::Ok, cmp.pass());
}

void pipeline_row(const PipelineConfig& pc, const PipelineReport& r, Builder& b) {
  const auto& ch = pc.channel;
  J item;
  item["channel"] = {{"a", ch.a}, {"b", ch.b}, {"P", ch.power}, {"N1", ch.noise1}, {"Ne", ch.eve_noise}};
  item["regime"] = to_string(r.regime.kind);
  item["witness"] = {{"a_squared", formula(r.regime.a_squared)},
                     {"very_strong_threshold", formula(r.regime.very_strong_threshold)},
                     {"weak_statistic", formula(r.regime.weak_statistic)},
                     {"multiuser_threshold", formula(r.regime.multiuser_threshold)}};
  item["scheme"] = r.scheme;
  item["rate"] = formula(r.rate);
  item["rate_limit"] = formula(r.rate_limit);
  item["transmit_power"] =
      r.scheme == "very-strong" || r.scheme == "layered" ? formula(r.transmit_power) : monte_carlo(r.transmit_power);
  J powers = J::array();
  for (const double p : r.layer_powers) powers.push_back(formula(p));
  item["layer_powers"] = powers;
  item["secrecy"] = secrecy_json(r.secrecy);
  item["codeword_error_rate"] = monte_carlo(r.reliability.codeword.rate(), r.reliability.codeword.standard_error());
  item["message_error_rate"] = monte_carlo(r.reliability.message.rate(), r.reliability.message.standard_error());
  item["trials"] = count(r.reliability.codeword.trials);
  item["mac_sum_rate"] = formula(r.mac_sum_rate);
  std::vector<std::string> cells{fmt(ch.a), fmt(ch.b), fmt(ch.power), fmt(ch.noise1), fmt(ch.eve_noise),
                                 to_string(r.regime.kind), fmt(r.regime.a_squared),
                                 fmt(r.regime.very_strong_threshold), fmt(r.regime.weak_statistic),
                                 fmt(r.regime.multiuser_threshold), r.scheme, fmt(r.rate),
                                 fmt(r.rate_limit), fmt(r.transmit_power)};
  for (auto& s : secrecy_cells(r.secrecy)) cells.push_back(std::move(s));
  for (const auto& e : {r.reliability.codeword, r.reliability.message}) {
    cells.push_back(fmt(e.rate()));
    cells.push_back(fmt(e.standard_error()));
  }
  cells.push_back(fmt(r.reliability.codeword.trials));
  cells.push_back(fmt(r.mac_sum_rate));
  b.row(item, std::move(cells));
  b.note(r.secrecy.status, r.secrecy.pass());
}

PipelineConfig pipeline_config(const ExperimentConfig& c) {
  PipelineConfig pc;
  pc.channel = c.channel;
  pc.lattice = c.lattice.value_or(LatticeConfig{});
  pc.num_bins = c.num_bins;
  pc.bin_seed = c.bin_seed;
  pc.trials = c.trials;
  pc.seed = c.seed;
  pc.budget = c.budget;
  return pc;
}

void run_pipeline(const ExperimentConfig& c, Builder& b) {
  const PipelineConfig pc = pipeline_config(c);
  pipeline_row(pc, run_regime_pipeline(pc), b);
}

void run_sweep(const ExperimentConfig& c, Builder& b) {
  for (const double a : c.sweep_a) {
    PipelineConfig pc = pipeline_config(c);
    pc.channel.a = a;
    pipeline_row(pc, run_regime_pipeline(pc), b);
  }
  b.env.summary["points"] = c.sweep_a.size();
}

const std::vector<std::string> kSecrecyColumns{
    "codebook_size", "bins", "rate", "bin_rate", "leakage_exact", "leakage",
    "leakage_per_dim_exact", "leakage_per_dim", "equivocation_per_dim_exact",
    "equivocation_per_dim", "identity_holds", "chain_rule_holds", "onebit_pass", "sum_gap_bits"};

std::vector<std::string> with_secrecy(std::vector<std::string> head, std::vector<std::string> tail = {}) {
  head.insert(head.end(), kSecrecyColumns.begin(), kSecrecyColumns.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::BudgetExceeded: return "budget-exceeded";
  }
  return "unknown";
}

const std::vector<std::string>& csv_columns(ExperimentKind kind) {
  static const std::vector<std::string> lattice{"index", "coordinates_exact", "coordinates",
                                                "norm_sq_exact", "norm_sq"};
  static const std::vector<std::string> sumset{
      "label", "p", "k", "n", "matrix_seed", "status", "codebook_size", "sum_size", "sum_bound",
      "sum_bound_pass", "h_sum_exact", "h_sum", "entropy_bound", "entropy_pass", "mutual_info_exact",
      "mutual_info", "mutual_info_per_dim_exact", "mutual_info_per_dim", "leakage_pass"};
  static const std::vector<std::string> binned = with_secrecy({"label", "n", "status"});
  static const std::vector<std::string> layered{
      "label", "n", "layers", "status", "tuple_count", "sum_codebook_size", "sums_unique",
      "h_sum_exact", "h_sum", "entropy_bound", "entropy_pass", "double_sum_size", "count_pass",
      "tv_exact", "tv", "mutual_info_per_dim_exact", "mutual_info_per_dim", "leakage_pass",
      "stage_conditions", "error_rate", "error_stderr"};
  static const std::vector<std::string> baseline{
      "seed", "distinct_sums", "random_leak_exact", "random_leak", "random_leak_per_dim",
      "lattice_leak_exact", "lattice_leak", "lattice_leak_per_dim", "random_above_one",
      "lattice_within_one"};
  static const std::vector<std::string> pipeline = with_secrecy(
      {"a", "b", "P", "N1", "Ne", "regime", "a_squared", "very_strong_threshold", "weak_statistic",
       "multiuser_threshold", "scheme", "rate", "rate_limit", "transmit_power"},
      {"codeword_error_rate", "codeword_error_stderr", "message_error_rate", "message_error_stderr",
       "trials", "mac_sum_rate"});
  switch (kind) {
    case ExperimentKind::Lattice: return lattice;
    case ExperimentKind::SumSet: return sumset;
    case ExperimentKind::Binned: return binned;
    case ExperimentKind::Layered: return layered;
    case ExperimentKind::Baseline: return baseline;
    case ExperimentKind::Pipeline:
    case ExperimentKind::Sweep: return pipeline;
  }
  return sumset;
}

ResultEnvelope run(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ResultEnvelope env;
  env.kind = config.kind;
  env.config = to_json(config);
  env.columns = csv_columns(config.kind);
  Builder b{env};
  try {
    switch (config.kind) {
      case ExperimentKind::Lattice: run_lattice(config, b); break;
      case ExperimentKind::SumSet: run_sumset(config, b); break;
      case ExperimentKind::Binned: run_binned(config, b); break;
      case ExperimentKind::Layered: run_layered(config, b); break;
      case ExperimentKind::Baseline: run_baseline(config, b); break;
      case ExperimentKind::Pipeline: run_pipeline(config, b); break;
      case ExperimentKind::Sweep: run_sweep(config, b); break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    b.over_budget = true;
    env.summary["error"] = e.what();
  }
  b.finish();
  env.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return env;
}

nlohmann::ordered_json ResultEnvelope::to_json(bool include_wall_clock) const {
  J doc;
  doc["schema_version"] = kSchemaVersion;
  doc["versions"] = {{"latsec", LATSEC_VERSION}, {"schema", kSchemaVersion}};
  doc["kind"] = latsec::to_string(kind);
  doc["config"] = config;
  doc["results"] = items;
  doc["summary"] = summary;
  doc["verdict"] = latsec::to_string(verdict);
  if (include_wall_clock) doc["wall_clock_seconds"] = wall_clock_seconds;
  return doc;
}

std::string ResultEnvelope::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render(const ResultEnvelope& envelope, OutputFormat format) {
  if (format == OutputFormat::Csv) return envelope.to_csv();
  return envelope.to_json().dump(2) + "\n";
}

void emit(const ResultEnvelope& envelope, OutputFormat format, const std::filesystem::path& path) {
  const std::string text = render(envelope, format);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace latsec
