#include "latsec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "latsec/error.hpp"

namespace latsec {

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Lattice: return "lattice";
    case ExperimentKind::SumSet: return "lemmas";
    case ExperimentKind::Binned: return "theorem1";
    case ExperimentKind::Layered: return "layered";
    case ExperimentKind::Baseline: return "baseline";
    case ExperimentKind::Pipeline: return "pipeline";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (const auto k : {ExperimentKind::Lattice, ExperimentKind::SumSet, ExperimentKind::Binned,
                       ExperimentKind::Layered, ExperimentKind::Baseline, ExperimentKind::Pipeline,
                       ExperimentKind::Sweep}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

struct RawValue {
  std::string text;
  std::int64_t line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const RawValue& v, const std::string& why) {
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(v.line) + ": cannot read '" + key + "': " + why, v.line, key);
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ValidationError, field + ": " + why, 0, field);
}

std::uint64_t to_u64(const std::string& key, const RawValue& v, const std::string& text) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) bad_value(key, v, "expected a non-negative integer");
  return out;
}

std::int64_t to_i64(const std::string& key, const RawValue& v, const std::string& text) {
  std::int64_t out = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) bad_value(key, v, "expected an integer");
  return out;
}

double to_double(const std::string& key, const RawValue& v, const std::string& text) {
  double out = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) bad_value(key, v, "expected a number");
  return out;
}

Rational to_rational(const std::string& key, const RawValue& v, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const Error&) {
    bad_value(key, v, "expected a rational such as 3, 1/2 or 0.25");
  }
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const RawValue& v, F convert) {
  std::vector<T> out;
  for (const auto& item : split_list(v.text)) out.push_back(convert(key, v, item));
  return out;
}

std::int64_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
}

std::string json_scalar(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  return j.dump();
}

std::vector<std::pair<std::string, RawValue>> read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object", 1);
  std::vector<std::pair<std::string, RawValue>> out;
  for (const auto& [key, value] : doc.items()) {
    RawValue v;
    const auto pos = text.find("\"" + key + "\"");
    v.line = pos == std::string_view::npos ? 0 : line_of(text, pos);
    if (value.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) joined += ',';
        if (value[i].is_array() || value[i].is_object()) bad_value(key, v, "nested values are not supported");
        joined += json_scalar(value[i]);
      }
      v.text = joined;
    } else if (value.is_object() || value.is_null()) {
      bad_value(key, v, "expected a scalar or a list");
    } else {
      v.text = json_scalar(value);
    }
    out.emplace_back(key, std::move(v));
  }
  return out;
}

std::vector<std::pair<std::string, RawValue>> read_flat(std::string_view text) {
  std::vector<std::pair<std::string, RawValue>> out;
  std::istringstream is{std::string(text)};
  std::string line;
  std::int64_t number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(number) + ": expected key = value", number);
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ": missing key", number);
    }
    out.emplace_back(key, RawValue{trim(std::string_view(body).substr(eq + 1)), number});
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const RawValue&)>;

LatticeConfig& lattice_of(ExperimentConfig& c) {
  if (!c.lattice) c.lattice = LatticeConfig{};
  return *c.lattice;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"kind",
       [](ExperimentConfig& c, const std::string& key, const RawValue& v) {
         const auto kind = parse_kind(v.text);
         if (!kind) bad_value(key, v, "unknown experiment kind '" + v.text + "'");
         c.kind = *kind;
       }},
      {"p", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { lattice_of(c).p = to_i64(key, v, v.text); }},
      {"k", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { lattice_of(c).k = to_u64(key, v, v.text); }},
      {"n", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { lattice_of(c).n = to_u64(key, v, v.text); }},
      {"G", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { lattice_of(c).g = to_list<std::int64_t>(key, v, to_i64); }},
      {"Gprime",
       [](ExperimentConfig& c, const std::string& key, const RawValue& v) {
         lattice_of(c).gprime = to_list<std::int64_t>(key, v, to_i64);
       }},
      {"matrix_seed", [](ExperimentConfig& c, const std::string& key,
                         const RawValue& v) { lattice_of(c).matrix_seed = to_u64(key, v, v.text); }},
      {"scale", [](ExperimentConfig& c, const std::string& key,
                   const RawValue& v) { lattice_of(c).scale = to_rational(key, v, v.text); }},
      {"a",
       [](ExperimentConfig& c, const std::string& key, const RawValue& v) {
         c.channel.a = to_double(key, v, v.text);
         c.channel_gain_set = true;
       }},
      {"b", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { c.channel.b = to_double(key, v, v.text); }},
      {"P", [](ExperimentConfig& c, const std::string& key,
               const RawValue& v) { c.channel.power = to_double(key, v, v.text); }},
      {"N1", [](ExperimentConfig& c, const std::string& key,
                const RawValue& v) { c.channel.noise1 = to_double(key, v, v.text); }},
      {"N2", [](ExperimentConfig& c, const std::string& key,
                const RawValue& v) { c.channel.noise2 = to_double(key, v, v.text); }},
      {"Ne", [](ExperimentConfig& c, const std::string& key,
                const RawValue& v) { c.channel.eve_noise = to_double(key, v, v.text); }},
      {"bins",
       [](ExperimentConfig& c, const std::string& key, const RawValue& v) {
         c.num_bins = to_u64(key, v, v.text);
         c.num_bins_set = true;
       }},
      {"bin_seed", [](ExperimentConfig& c, const std::string& key,
                      const RawValue& v) { c.bin_seed = to_u64(key, v, v.text); }},
      {"trials", [](ExperimentConfig& c, const std::string& key,
                    const RawValue& v) { c.trials = to_u64(key, v, v.text); }},
      {"seed", [](ExperimentConfig& c, const std::string& key,
                  const RawValue& v) { c.seed = to_u64(key, v, v.text); }},
      {"budget", [](ExperimentConfig& c, const std::string& key,
                    const RawValue& v) { c.budget = to_u64(key, v, v.text); }},
      {"grid_primes", [](ExperimentConfig& c, const std::string& key,
                         const RawValue& v) { c.grid.primes = to_list<std::int64_t>(key, v, to_i64); }},
      {"grid_max_n", [](ExperimentConfig& c, const std::string& key,
                        const RawValue& v) { c.grid.max_n = to_u64(key, v, v.text); }},
      {"grid_max_size", [](ExperimentConfig& c, const std::string& key,
                           const RawValue& v) { c.grid.max_size = to_u64(key, v, v.text); }},
      {"grid_draws", [](ExperimentConfig& c, const std::string& key,
                        const RawValue& v) { c.grid.draws = to_u64(key, v, v.text); }},
      {"grid_seed", [](ExperimentConfig& c, const std::string& key,
                       const RawValue& v) { c.grid.seed = to_u64(key, v, v.text); }},
      {"layers",
       [](ExperimentConfig& c, const std::string& key, const RawValue& v) {
         c.layers.clear();
         for (const auto& item : split_list(v.text)) {
           const auto colon = item.find(':');
           if (colon == std::string::npos) bad_value(key, v, "expected k:scale entries");
           c.layers.push_back({to_u64(key, v, trim(item.substr(0, colon))),
                               to_rational(key, v, trim(item.substr(colon + 1)))});
         }
       }},
      {"layer_powers", [](ExperimentConfig& c, const std::string& key,
                          const RawValue& v) { c.layer_powers = to_list<double>(key, v, to_double); }},
      {"baseline_size", [](ExperimentConfig& c, const std::string& key,
                           const RawValue& v) { c.baseline_size = to_u64(key, v, v.text); }},
      {"baseline_n", [](ExperimentConfig& c, const std::string& key,
                        const RawValue& v) { c.baseline_n = to_u64(key, v, v.text); }},
      {"baseline_seeds", [](ExperimentConfig& c, const std::string& key,
                            const RawValue& v) { c.baseline_seeds = to_u64(key, v, v.text); }},
      {"sweep_a", [](ExperimentConfig& c, const std::string& key,
                     const RawValue& v) { c.sweep_a = to_list<double>(key, v, to_double); }},
  };
  return table;
}

bool is_prime_power(std::uint64_t v) {
  if (v < 2) return false;
  std::uint64_t p = 2;
  while (v % p != 0) ++p;
  while (v % p == 0) v /= p;
  return v == 1;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = first != std::string_view::npos && text[first] == '{';
  const auto entries = json ? read_json(text) : read_flat(text);

  ExperimentConfig config;
  std::map<std::string, std::int64_t> seen;
  for (const auto& [key, value] : entries) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(value.line) + ": unknown key '" + key + "'", value.line, key);
    }
    if (const auto [pos, fresh] = seen.emplace(key, value.line); !fresh) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(value.line) + ": duplicate key '" + key + "'", value.line, key);
    }
    it->second(config, key, value);
  }
  validate(config);
  return config;
}

void validate(const ExperimentConfig& c) {
  if (c.lattice) {
    const auto& l = *c.lattice;
    if (!is_prime(l.p)) invalid("p", std::to_string(l.p) + " is not prime");
    if (l.n < 1 || l.n > 12) invalid("n", "need 1 <= n <= 12");
    if (l.k < 1 || l.k > l.n) invalid("k", "need 1 <= k <= n");
    if (l.scale.sign() <= 0) invalid("scale", "must be positive");
    if (l.g) {
      if (l.g->size() != l.n * l.k) invalid("G", "need n*k entries");
      for (const auto v : *l.g) {
        if (v < 0 || v >= l.p) invalid("G", "entries must lie in [0, p)");
      }
    }
    if (l.gprime && l.gprime->size() != l.n * l.n) invalid("Gprime", "need n*n entries");
    try {
      (void)realize(l);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::RankDeficientG: invalid("G", e.what());
        case ErrorCode::NotUnimodular: invalid("Gprime", e.what());
        default: invalid("p", e.what());
      }
    }
  }
  const auto& ch = c.channel;
  if (ch.a == 1.0) invalid("a", "a = 1 is excluded");
  if (!std::isfinite(ch.a)) invalid("a", "must be finite");
  if (!std::isfinite(ch.b)) invalid("b", "must be finite");
  if (!(ch.power > 0.0) || !std::isfinite(ch.power)) invalid("P", "must be positive");
  if (!(ch.noise1 >= 0.0)) invalid("N1", "must be non-negative");
  if (!(ch.noise2 >= 0.0)) invalid("N2", "must be non-negative");
  if (!(ch.eve_noise >= 0.0)) invalid("Ne", "must be non-negative");
  if (c.num_bins < 1) invalid("bins", "need at least one bin");
  if (c.budget < 1) invalid("budget", "must be positive");
  for (const auto p : c.grid.primes) {
    if (!is_prime(p)) invalid("grid_primes", std::to_string(p) + " is not prime");
  }
  if (c.grid.max_n < 1 || c.grid.max_n > 12) invalid("grid_max_n", "need 1 <= grid_max_n <= 12");
  for (const auto& layer : c.layers) {
    if (layer.k < 1) invalid("layers", "layer k must be positive");
    if (layer.scale.sign() <= 0) invalid("layers", "layer scale must be positive");
  }
  if (!c.layer_powers.empty()) {
    if (c.layer_powers.size() != c.layers.size()) invalid("layer_powers", "need one power per layer");
    for (const auto p : c.layer_powers) {
      if (!(p > 0.0)) invalid("layer_powers", "must be positive");
    }
  }
  if (c.baseline_size < 1) invalid("baseline_size", "must be positive");
  if (c.baseline_size > 1 && !is_prime_power(c.baseline_size)) {
    invalid("baseline_size", "must be 1 or a prime power");
  }
  if (c.baseline_n < 1) invalid("baseline_n", "must be positive");
  for (const auto a : c.sweep_a) {
    if (a == 1.0) invalid("sweep_a", "a = 1 is excluded");
    if (!std::isfinite(a)) invalid("sweep_a", "must be finite");
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  if (c.lattice) {
    const auto& l = *c.lattice;
    nlohmann::ordered_json lat;
    lat["p"] = l.p;
    lat["k"] = l.k;
    lat["n"] = l.n;
    lat["G"] = l.g ? nlohmann::ordered_json(*l.g) : nlohmann::ordered_json();
    lat["Gprime"] = l.gprime ? nlohmann::ordered_json(*l.gprime) : nlohmann::ordered_json();
    lat["matrix_seed"] = l.matrix_seed;
    lat["scale"] = l.scale.str();
    j["lattice"] = lat;
  } else {
    nlohmann::ordered_json grid;
    grid["primes"] = c.grid.primes;
    grid["max_n"] = c.grid.max_n;
    grid["max_size"] = c.grid.max_size;
    grid["draws"] = c.grid.draws;
    grid["seed"] = c.grid.seed;
    j["grid"] = grid;
  }
  nlohmann::ordered_json ch;
  ch["a"] = c.channel.a;
  ch["b"] = c.channel.b;
  ch["P"] = c.channel.power;
  ch["N1"] = c.channel.noise1;
  ch["N2"] = c.channel.noise2;
  ch["Ne"] = c.channel.eve_noise;
  j["channel"] = ch;
  j["bins"] = c.num_bins_set ? nlohmann::ordered_json(c.num_bins) : nlohmann::ordered_json("all-divisors");
  j["bin_seed"] = c.bin_seed;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& l : c.layers) layers.push_back({{"k", l.k}, {"scale", l.scale.str()}});
  j["layers"] = layers;
  j["layer_powers"] = c.layer_powers;
  j["baseline"] = {{"size", c.baseline_size}, {"n", c.baseline_n}, {"seeds", c.baseline_seeds}};
  j["sweep_a"] = c.sweep_a;
  return j;
}

}  // namespace latsec
