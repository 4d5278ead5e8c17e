#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "latsec/config.hpp"
#include "latsec/error.hpp"
#include "latsec/report.hpp"

using namespace latsec;

namespace {

Error parse_error(const std::string& text) {
  try {
    auto c = parse_config(text);
    validate(c);
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorCode::Overflow, "no error");
}

}  // namespace

TEST(ParseConfig, MinimalSumSetConfig) {
  const auto c = parse_config("kind = lemmas\np = 2\nk = 1\nn = 1\n");
  EXPECT_EQ(c.kind, ExperimentKind::SumSet);
  ASSERT_TRUE(c.lattice.has_value());
  EXPECT_EQ(c.lattice->p, 2);
  EXPECT_EQ(c.budget, kDefaultBudget);
  EXPECT_EQ(c.trials, 10'000u);
  EXPECT_NO_THROW(validate(c));
}

TEST(ParseConfig, Errors) {
  const auto unity = parse_error("a = 1\n");
  EXPECT_EQ(unity.code(), ErrorCode::ValidationError);
  EXPECT_EQ(unity.field(), "a");

  const auto unknown = parse_error("p = 2\n# comment\nfrobnicate = 3\n");
  EXPECT_EQ(unknown.code(), ErrorCode::ParseError);
  EXPECT_EQ(unknown.field(), "frobnicate");
  EXPECT_EQ(unknown.detail(), 3);
  EXPECT_NE(std::string(unknown.what()).find("frobnicate"), std::string::npos);

  EXPECT_EQ(parse_error("p = two\n").code(), ErrorCode::ParseError);
  EXPECT_EQ(parse_error("p = 2\np = 3\n").code(), ErrorCode::ParseError);
  EXPECT_EQ(parse_error("no equals sign\n").code(), ErrorCode::ParseError);
  EXPECT_EQ(parse_error("p = 4\n").field(), "p");
  EXPECT_EQ(parse_error("p = 2\nk = 1\nn = 1\nG = 0\n").field(), "G");
  EXPECT_EQ(parse_error("P = -1\n").code(), ErrorCode::ValidationError);
}

TEST(ParseConfig, JsonForm) {
  const auto c = parse_config(R"({"kind": "pipeline", "a": 1.5, "p": 3, "k": 1, "n": 2,
                                  "G": [1, 2], "bins": 3, "sweep_a": [0.3, 3]})");
  EXPECT_EQ(c.kind, ExperimentKind::Pipeline);
  EXPECT_DOUBLE_EQ(c.channel.a, 1.5);
  EXPECT_TRUE(c.channel_gain_set);
  EXPECT_EQ(c.num_bins, 3u);
  EXPECT_EQ(c.sweep_a, (std::vector<double>{0.3, 3.0}));
  EXPECT_EQ(parse_error(R"({"bogus": 1})").code(), ErrorCode::ParseError);
}

TEST(ParseConfig, EchoCarriesEffectiveSettings) {
  const auto c = parse_config("kind = layered\np = 2\nk = 2\nn = 2\nlayers = 1:2,2:1\nlayer_powers = 0.5,0.5\n");
  const auto echo = to_json(c);
  EXPECT_EQ(echo["kind"], "layered");
  EXPECT_EQ(echo["lattice"]["p"], 2);
  EXPECT_EQ(echo["lattice"]["scale"], "1");
  EXPECT_EQ(echo["layers"][0]["scale"], "2");
  EXPECT_EQ(echo["layer_powers"], nlohmann::ordered_json::array({0.5, 0.5}));
  EXPECT_EQ(echo["budget"], kDefaultBudget);
  EXPECT_EQ(echo["bins"], "all-divisors");
}

TEST(Run, SumSetOnScalarLattice) {
  auto c = parse_config("kind = lemmas\np = 2\nk = 1\nn = 1\n");
  const auto env = run(c);
  EXPECT_EQ(env.verdict, Verdict::Pass);
  ASSERT_EQ(env.items.size(), 1u);
  EXPECT_EQ(env.items[0]["sum_size"]["value"], 3);
  EXPECT_EQ(env.items[0]["sum_bound_pass"], true);
  EXPECT_EQ(env.items[0]["mutual_info"]["exact"], "1/2");
  EXPECT_EQ(env.items[0]["mutual_info"]["provenance"], "exact-rational");
}

TEST(Run, SameConfigTwiceIsByteIdentical) {
  for (const char* text : {"kind = lemmas\ngrid_primes = 2,3\ngrid_max_n = 2\ngrid_max_size = 9\n",
                           "kind = pipeline\na = 0.3\np = 3\nk = 1\nn = 2\ntrials = 300\n",
                           "kind = sweep\np = 2\nk = 1\nn = 2\ntrials = 200\n"}) {
    const auto c = parse_config(text);
    const auto a = run(c), b = run(c);
    EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump());
    EXPECT_EQ(a.to_csv(), b.to_csv());
  }
}

TEST(Run, PipelineRegime) {
  const auto env = run(parse_config("kind = pipeline\na = 1.5\np = 2\nk = 1\nn = 1\ntrials = 200\n"));
  ASSERT_EQ(env.items.size(), 1u);
  EXPECT_EQ(env.items[0]["regime"], "very-strong");
  EXPECT_EQ(env.items[0]["codeword_error_rate"]["provenance"], "monte-carlo±stderr");
  EXPECT_EQ(env.items[0]["rate_limit"]["provenance"], "formula");
}

TEST(Run, BudgetBecomesVerdict) {
  const auto env = run(parse_config("kind = lemmas\np = 7\nk = 3\nn = 3\nbudget = 100\n"));
  EXPECT_EQ(env.verdict, Verdict::BudgetExceeded);
}

TEST(Emit, CsvHeaderAndRows) {
  const auto env = run(parse_config("kind = lemmas\ngrid_primes = 2\ngrid_max_n = 2\ngrid_max_size = 4\ngrid_draws = 1\n"));
  const auto csv = render(env, OutputFormat::Csv);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 4u);
  EXPECT_EQ(csv.rfind("label,p,k,n,", 0), 0u);
  EXPECT_EQ(env.columns, csv_columns(ExperimentKind::SumSet));
}

TEST(Emit, ColumnSetDependsOnlyOnKind) {
  const auto a = run(parse_config("kind = pipeline\na = 0.3\np = 2\nk = 1\nn = 1\ntrials = 100\n"));
  const auto b = run(parse_config("kind = pipeline\na = 3\np = 3\nk = 2\nn = 2\ntrials = 100\n"));
  EXPECT_EQ(a.columns, b.columns);
  for (const auto& row : b.rows) EXPECT_EQ(row.size(), b.columns.size());
}

TEST(Emit, JsonRoundTrip) {
  const auto env = run(parse_config("kind = theorem1\np = 3\nk = 1\nn = 1\n"));
  const auto text = render(env, OutputFormat::Json);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["schema_version"], kSchemaVersion);
  EXPECT_EQ(doc["kind"], "theorem1");
  EXPECT_EQ(doc["verdict"], "pass");
  EXPECT_TRUE(doc.contains("wall_clock_seconds"));
  EXPECT_FALSE(env.to_json(false).contains("wall_clock_seconds"));
}

TEST(Emit, FileAndUnwritablePath) {
  const auto env = run(parse_config("kind = lattice\np = 2\nk = 1\nn = 1\n"));
  const auto path = std::filesystem::temp_directory_path() / "latsec_emit_test.json";
  emit(env, OutputFormat::Json, path);
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
  try {
    emit(env, OutputFormat::Json, "/nonexistent-dir/for/sure/out.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
