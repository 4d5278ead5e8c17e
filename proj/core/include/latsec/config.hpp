#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "latsec/channel.hpp"
#include "latsec/codebook.hpp"
#include "latsec/experiments.hpp"

namespace latsec {

enum class ExperimentKind { Lattice, SumSet, Binned, Layered, Baseline, Pipeline, Sweep };

const char* to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_kind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SumSet;

  // Single lattice; when absent, grid-based kinds use `grid`.
  std::optional<LatticeConfig> lattice;
  GridSpec grid;

  ChannelParams channel;
  bool channel_gain_set = false;  // `a` given explicitly

  std::size_t num_bins = 1;
  bool num_bins_set = false;  // binned kind sweeps every divisor otherwise
  std::uint64_t bin_seed = 0;

  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultBudget;

  std::vector<LayerSpec> layers;
  std::vector<double> layer_powers;

  std::uint64_t baseline_size = 16;
  std::size_t baseline_n = 2;
  std::uint64_t baseline_seeds = 100;

  std::vector<double> sweep_a{0.3, 0.8, 1.5, 3.0, 10.0};
};

/// Parses a flat `key = value` document (`#` starts a comment) or a JSON
/// object (first non-blank character `{`). List values are comma
/// separated in the flat form and arrays in JSON. Missing keys take their
/// defaults. Errors: ParseError (detail = 1-based line, field = key) for
/// malformed lines, unknown keys and unreadable values; ValidationError
/// (field = key) for values out of range, including a = 1.
ExperimentConfig parse_config(std::string_view text);

/// Re-checks cross-field constraints after overrides; ValidationError.
void validate(const ExperimentConfig& config);

/// Canonical echo with every effective setting.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace latsec
