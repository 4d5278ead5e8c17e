#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latsec/config.hpp"

namespace latsec {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { Csv, Json };

enum class Verdict { Pass, Fail, BudgetExceeded };
const char* to_string(Verdict verdict) noexcept;

/// Outcome of one run. `items` holds one JSON object per result row;
/// every numeric field is an object {value, provenance[, exact][, stderr]}
/// with provenance "exact-rational", "monte-carlo±stderr" or "formula".
/// `columns`/`rows` are the CSV view; the column set depends only on the
/// experiment kind.
struct ResultEnvelope {
  ExperimentKind kind = ExperimentKind::SumSet;
  nlohmann::ordered_json config;
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Verdict verdict = Verdict::Pass;
  double wall_clock_seconds = 0.0;

  /// Full document; the wall-clock field is omitted when
  /// `include_wall_clock` is false, which makes the output a pure
  /// function of the configuration.
  nlohmann::ordered_json to_json(bool include_wall_clock = true) const;
  std::string to_csv() const;
};

/// CSV header for a kind.
const std::vector<std::string>& csv_columns(ExperimentKind kind);

/// Runs the experiment. Suite-level budget overruns become
/// Verdict::BudgetExceeded; invalid settings surface as Error.
ResultEnvelope run(const ExperimentConfig& config);

/// Writes the envelope; "-" means stdout. Errors: IoError.
void emit(const ResultEnvelope& envelope, OutputFormat format, const std::filesystem::path& path);
std::string render(const ResultEnvelope& envelope, OutputFormat format);

}  // namespace latsec
