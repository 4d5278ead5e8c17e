// latsec command-line front end.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "latsec/config.hpp"
#include "latsec/error.hpp"
#include "latsec/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct CommonOptions {
  std::string config;
  std::string out = "-";
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> budget;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Config file (key = value lines or a JSON object)");
  cmd->add_option("--out", opts.out, "Output path, - for stdout")->capture_default_str();
  cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "Root seed override");
  cmd->add_option("--trials", opts.trials, "Monte Carlo trial count override");
  cmd->add_option("--budget", opts.budget, "Enumeration budget override");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw latsec::Error(latsec::ErrorCode::IoError, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int execute(latsec::ExperimentKind kind, const CommonOptions& opts) {
  try {
    latsec::ExperimentConfig config =
        opts.config.empty() ? latsec::ExperimentConfig{} : latsec::parse_config(read_file(opts.config));
    config.kind = kind;
    if (opts.seed) config.seed = *opts.seed;
    if (opts.trials) config.trials = *opts.trials;
    if (opts.budget) config.budget = *opts.budget;
    latsec::validate(config);

    const auto envelope = latsec::run(config);
    std::string format = opts.format;
    if (format.empty()) format = kind == latsec::ExperimentKind::Sweep ? "csv" : "json";
    latsec::emit(envelope, format == "csv" ? latsec::OutputFormat::Csv : latsec::OutputFormat::Json,
                 opts.out);
    std::cerr << latsec::to_string(kind) << ": " << latsec::to_string(envelope.verdict) << " ("
              << envelope.rows.size() << " rows, " << envelope.wall_clock_seconds << " s)\n";
    switch (envelope.verdict) {
      case latsec::Verdict::Pass: return kExitPass;
      case latsec::Verdict::Fail: return kExitFail;
      case latsec::Verdict::BudgetExceeded: return kExitBudget;
    }
    return kExitFail;
  } catch (const latsec::Error& e) {
    std::cerr << "error [" << latsec::to_string(e.code()) << "]";
    if (!e.field().empty()) std::cerr << " field '" << e.field() << "'";
    std::cerr << ": " << e.what() << '\n';
    return e.code() == latsec::ErrorCode::BudgetExceeded ? kExitBudget : kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice-coded secrecy workbench for the Gaussian interference channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("latsec ") + "0.1.0");

  struct Leaf {
    CLI::App* cmd;
    latsec::ExperimentKind kind;
    CommonOptions opts;
  };
  std::vector<std::unique_ptr<Leaf>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  latsec::ExperimentKind kind) {
    auto l = std::make_unique<Leaf>();
    l->cmd = parent->add_subcommand(name, help);
    l->kind = kind;
    add_common(l->cmd, l->opts);
    leaves.push_back(std::move(l));
  };

  auto* lattice = app.add_subcommand("lattice", "Lattice construction");
  lattice->require_subcommand(1);
  leaf(lattice, "build", "Build a nested lattice pair and list its codebook",
       latsec::ExperimentKind::Lattice);
  auto* verify = app.add_subcommand("verify", "Exact verification suites");
  verify->require_subcommand(1);
  leaf(verify, "lemmas", "Sum-set bound, entropy bound and per-dimension leakage over a grid",
       latsec::ExperimentKind::SumSet);
  leaf(verify, "theorem1", "Binned leakage for every divisor bin count over a grid",
       latsec::ExperimentKind::Binned);
  auto* simulate = app.add_subcommand("simulate", "Channel simulation");
  simulate->require_subcommand(1);
  leaf(simulate, "pipeline", "Regime classification, decoding and exact leakage",
       latsec::ExperimentKind::Pipeline);
  leaf(simulate, "layered", "Layered codebooks: entropy bound, TV diagnostic, reliability",
       latsec::ExperimentKind::Layered);
  auto* compare = app.add_subcommand("compare", "Structured versus random codebooks");
  compare->require_subcommand(1);
  leaf(compare, "random", "Random-codebook leakage against a matched lattice codebook",
       latsec::ExperimentKind::Baseline);
  {
    auto l = std::make_unique<Leaf>();
    l->cmd = app.add_subcommand("sweep", "Pipeline over a list of cross gains (CSV by default)");
    l->kind = latsec::ExperimentKind::Sweep;
    add_common(l->cmd, l->opts);
    leaves.push_back(std::move(l));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const auto& l : leaves) {
    if (l->cmd->parsed()) return execute(l->kind, l->opts);
  }
  return kExitConfig;
}
