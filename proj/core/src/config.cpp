#include "cpbtls/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <regex>
#include <sstream>
#include <vector>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Entries = std::map<std::string, Entry, std::less<>>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::regex& decimal_pattern() {
  static const std::regex pattern(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  return pattern;
}

double to_real(const std::string& key, const Entry& e) {
  double value = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  if (!std::regex_match(e.value, decimal_pattern())) {
    throw ParseError("line " + std::to_string(e.line) + ": key " + key + ": malformed number '" +
                         e.value + "'",
                     e.line, key);
  }
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("line " + std::to_string(e.line) + ": key " + key + ": malformed number '" +
                         e.value + "'",
                     e.line, key);
  }
  return value;
}

template <typename Int>
Int to_integer(const std::string& key, const Entry& e) {
  Int value{};
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw ParseError("line " + std::to_string(e.line) + ": key " + key + ": malformed integer '" +
                         e.value + "'",
                     e.line, key);
  }
  return value;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string tls_key(int i, std::string_view field) {
  return "tls" + std::to_string(i + 1) + "." + std::string(field);
}

constexpr std::string_view kTlsFields[] = {"e_r_ghz", "t_lr_ghz", "e_int_ghz", "delta_e_j_ghz"};

// Every fixed key; fit.bound.* keys are matched separately.
const std::vector<std::string>& fixed_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {
        "model.tls_count",       "cpb.e_c_ghz",          "cpb.e_j_max_ghz",
        "cpb.n_charge_states",   "cpb.flux_ratio",
    };
    for (int i = 0; i < 2; ++i) {
      for (auto f : kTlsFields) k.push_back(tls_key(i, f));
    }
    const char* rest[] = {"tls.t12_ghz",
                          "grid.start",
                          "grid.stop",
                          "grid.step",
                          "spectrum.max_states",
                          "resonator.omega_r_ghz",
                          "resonator.g_ghz",
                          "geometry.area_nm2",
                          "geometry.barrier_nm",
                          "geometry.tls_charge_e",
                          "geometry.junction_count",
                          "analysis.alpha_inv",
                          "analysis.temperature_mk",
                          "analysis.n_g",
                          "fit.policy",
                          "fit.seeds",
                          "fit.rng_seed",
                          "fit.max_iterations",
                          "output.spectrum_csv",
                          "output.spectrum_svg",
                          "output.fit_report",
                          "output.residual_csv",
                          "output.report"};
    k.insert(k.end(), std::begin(rest), std::end(rest));
    return k;
  }();
  return keys;
}

bool is_bound_key(std::string_view key) {
  constexpr std::string_view prefix = "fit.bound.";
  if (key.substr(0, prefix.size()) != prefix) return false;
  std::string_view rest = key.substr(prefix.size());
  const auto dot = rest.rfind('.');
  if (dot == std::string_view::npos) return false;
  const std::string_view side = rest.substr(dot + 1);
  return parse_kind(rest.substr(0, dot)).has_value() && (side == "min" || side == "max");
}

bool is_known_key(std::string_view key) {
  const auto& keys = fixed_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end() || is_bound_key(key);
}

Entries tokenize(std::string_view text) {
  Entries entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                           std::string(line) + "'",
                       line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no);
    }
    if (!is_known_key(key)) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key " + key, line_no, key);
    }
    if (value.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": key " + key + " has no value",
                       line_no, key);
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key " + key +
                           " (first set on line " + std::to_string(it->second.line) + ")",
                       line_no, key);
    }
    entries.emplace(key, Entry{value, line_no});
  }
  return entries;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  return serialize_config(*this) == serialize_config(other);
}

RunConfig parse_config(std::string_view text) {
  const Entries entries = tokenize(text);

  std::vector<std::string> missing;
  auto require = [&](const std::string& key) {
    if (!entries.contains(key)) missing.push_back(key);
  };
  require("model.tls_count");
  require("cpb.e_c_ghz");
  require("cpb.e_j_max_ghz");

  int tls_count = 0;
  if (const auto it = entries.find("model.tls_count"); it != entries.end()) {
    tls_count = to_integer<int>(it->first, it->second);
    if (tls_count < 0 || tls_count > kMaxTls) {
      throw ParseError("line " + std::to_string(it->second.line) +
                           ": key model.tls_count must be 0, 1 or 2",
                       it->second.line, it->first);
    }
  }
  for (int i = 0; i < tls_count; ++i) {
    for (auto f : kTlsFields) require(tls_key(i, f));
  }
  if (tls_count == 2) require("tls.t12_ghz");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw ParseError(msg, 0, missing.front());
  }

  for (const auto& [key, entry] : entries) {
    bool unused = false;
    for (int i = tls_count; i < 2; ++i) {
      if (key.rfind("tls" + std::to_string(i + 1) + ".", 0) == 0) unused = true;
    }
    if (key == "tls.t12_ghz" && tls_count != 2) unused = true;
    if (unused) {
      throw ParseError("line " + std::to_string(entry.line) + ": key " + key +
                           " is not used with model.tls_count = " + std::to_string(tls_count),
                       entry.line, key);
    }
  }

  auto real = [&](const std::string& key, double fallback) {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : to_real(key, it->second);
  };
  auto integer = [&](const std::string& key, int fallback) {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : to_integer<int>(key, it->second);
  };
  auto text_value = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? std::string{} : it->second.value;
  };
  auto fail = [&](const std::string& key, const std::string& why) {
    const auto it = entries.find(key);
    const int line = it == entries.end() ? 0 : it->second.line;
    throw ParseError("line " + std::to_string(line) + ": key " + key + ": " + why, line, key);
  };

  RunConfig cfg;
  cfg.model.cpb.e_c = real("cpb.e_c_ghz", 0.0);
  cfg.model.cpb.e_j_max = real("cpb.e_j_max_ghz", 0.0);
  cfg.model.cpb.n_charge_states = integer("cpb.n_charge_states", 4);
  cfg.model.flux_ratio = real("cpb.flux_ratio", 0.0);
  cfg.model.tls.resize(static_cast<std::size_t>(tls_count));
  for (int i = 0; i < tls_count; ++i) {
    TlsParams& t = cfg.model.tls[static_cast<std::size_t>(i)];
    t.e_r = real(tls_key(i, "e_r_ghz"), 0.0);
    t.t_lr = real(tls_key(i, "t_lr_ghz"), 0.0);
    t.e_int = real(tls_key(i, "e_int_ghz"), 0.0);
    t.delta_e_j = real(tls_key(i, "delta_e_j_ghz"), 0.0);
    if (t.t_lr < 0.0) fail(tls_key(i, "t_lr_ghz"), "tunneling must be >= 0");
  }
  cfg.model.t_12 = real("tls.t12_ghz", 0.0);

  if (!(cfg.model.cpb.e_c > 0.0)) fail("cpb.e_c_ghz", "must be > 0");
  if (!(cfg.model.cpb.e_j_max > 0.0)) fail("cpb.e_j_max_ghz", "must be > 0");
  if (cfg.model.cpb.n_charge_states < kMinChargeStates ||
      cfg.model.cpb.n_charge_states > kMaxChargeStates) {
    fail("cpb.n_charge_states", "must be in [2, 8]");
  }

  cfg.grid.start = real("grid.start", cfg.grid.start);
  cfg.grid.stop = real("grid.stop", cfg.grid.stop);
  cfg.grid.step = real("grid.step", cfg.grid.step);
  if (!(cfg.grid.step > 0.0)) fail("grid.step", "must be > 0");
  if (!(cfg.grid.start < cfg.grid.stop)) fail("grid.stop", "must exceed grid.start");
  if (cfg.grid.start < 0.0) fail("grid.start", "must be >= 0");
  if (cfg.grid.stop > 2.0) fail("grid.stop", "must be <= 2");

  // Default shrinks for a bare box whose basis is smaller than four excited states.
  cfg.max_states = integer("spectrum.max_states",
                           std::min(cfg.max_states, static_cast<int>(cfg.model.dimension()) - 1));
  if (cfg.max_states < 1 || static_cast<std::size_t>(cfg.max_states) >= cfg.model.dimension()) {
    fail("spectrum.max_states",
         "must be in [1, " + std::to_string(cfg.model.dimension() - 1) + "]");
  }

  const bool has_omega = entries.contains("resonator.omega_r_ghz");
  const bool has_g = entries.contains("resonator.g_ghz");
  if (has_omega != has_g) {
    fail(has_omega ? "resonator.omega_r_ghz" : "resonator.g_ghz",
         "resonator.omega_r_ghz and resonator.g_ghz must be given together");
  }
  if (has_omega) {
    ResonatorParams res{real("resonator.omega_r_ghz", 0.0), real("resonator.g_ghz", 0.0)};
    if (!(res.omega_r > 0.0)) fail("resonator.omega_r_ghz", "must be > 0");
    if (res.g < 0.0) fail("resonator.g_ghz", "must be >= 0");
    cfg.resonator = res;
  }

  const bool any_geometry =
      std::any_of(entries.begin(), entries.end(), [](const auto& kv) { return kv.first.rfind("geometry.", 0) == 0; });
  if (any_geometry) {
    JunctionGeometry g;
    g.area_nm2 = real("geometry.area_nm2", g.area_nm2);
    g.barrier_nm = real("geometry.barrier_nm", g.barrier_nm);
    g.tls_charge_e = real("geometry.tls_charge_e", g.tls_charge_e);
    g.junction_count = integer("geometry.junction_count", g.junction_count);
    if (!(g.area_nm2 > 0.0)) fail("geometry.area_nm2", "must be > 0");
    if (!(g.barrier_nm > 0.0)) fail("geometry.barrier_nm", "must be > 0");
    if (!(g.tls_charge_e > 0.0)) fail("geometry.tls_charge_e", "must be > 0");
    if (g.junction_count < 1) fail("geometry.junction_count", "must be >= 1");
    cfg.geometry = g;
  }

  cfg.alpha_inv = real("analysis.alpha_inv", cfg.alpha_inv);
  cfg.temperature_mk = real("analysis.temperature_mk", cfg.temperature_mk);
  cfg.analysis_n_g = real("analysis.n_g", cfg.analysis_n_g);
  if (!(cfg.alpha_inv > 0.0)) fail("analysis.alpha_inv", "must be > 0");
  if (!(cfg.temperature_mk > 0.0)) fail("analysis.temperature_mk", "must be > 0");

  if (const std::string policy = text_value("fit.policy"); !policy.empty()) {
    if (policy == "nearest") {
      cfg.fit.policy = AssignmentPolicy::nearest_branch;
    } else if (policy == "hinted") {
      cfg.fit.policy = AssignmentPolicy::hinted;
    } else {
      fail("fit.policy", "expected 'nearest' or 'hinted', got '" + policy + "'");
    }
  }
  cfg.fit.seeds = integer("fit.seeds", cfg.fit.seeds);
  if (cfg.fit.seeds < 0) fail("fit.seeds", "must be >= 0");
  if (const auto it = entries.find("fit.rng_seed"); it != entries.end()) {
    cfg.fit.rng_seed = to_integer<std::uint64_t>(it->first, it->second);
  }
  cfg.fit.max_iterations = integer("fit.max_iterations", cfg.fit.max_iterations);
  if (cfg.fit.max_iterations < 1) fail("fit.max_iterations", "must be >= 1");
  for (const auto& [key, entry] : entries) {
    if (is_bound_key(key)) {
      cfg.fit.bounds[key.substr(std::string_view("fit.bound.").size())] = to_real(key, entry);
    }
  }
  for (const auto& [name, lower] : cfg.fit.bounds) {
    if (!name.ends_with(".min")) continue;
    const std::string kind = name.substr(0, name.size() - 4);
    const auto hi = cfg.fit.bounds.find(kind + ".max");
    if (hi != cfg.fit.bounds.end() && lower > hi->second) {
      fail("fit.bound." + kind + ".max", "upper bound below lower bound");
    }
  }

  cfg.outputs.spectrum_csv = text_value("output.spectrum_csv");
  cfg.outputs.spectrum_svg = text_value("output.spectrum_svg");
  cfg.outputs.fit_report = text_value("output.fit_report");
  cfg.outputs.residual_csv = text_value("output.residual_csv");
  cfg.outputs.report = text_value("output.report");

  validate(cfg.model);
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto put = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  put("model.tls_count", std::to_string(cfg.model.tls_count()));
  put("cpb.e_c_ghz", format_real(cfg.model.cpb.e_c));
  put("cpb.e_j_max_ghz", format_real(cfg.model.cpb.e_j_max));
  put("cpb.n_charge_states", std::to_string(cfg.model.cpb.n_charge_states));
  put("cpb.flux_ratio", format_real(cfg.model.flux_ratio));
  for (int i = 0; i < cfg.model.tls_count(); ++i) {
    const TlsParams& t = cfg.model.tls[static_cast<std::size_t>(i)];
    put(tls_key(i, "e_r_ghz"), format_real(t.e_r));
    put(tls_key(i, "t_lr_ghz"), format_real(t.t_lr));
    put(tls_key(i, "e_int_ghz"), format_real(t.e_int));
    put(tls_key(i, "delta_e_j_ghz"), format_real(t.delta_e_j));
  }
  if (cfg.model.tls_count() == 2) put("tls.t12_ghz", format_real(cfg.model.t_12));
  put("grid.start", format_real(cfg.grid.start));
  put("grid.stop", format_real(cfg.grid.stop));
  put("grid.step", format_real(cfg.grid.step));
  put("spectrum.max_states", std::to_string(cfg.max_states));
  if (cfg.resonator) {
    put("resonator.omega_r_ghz", format_real(cfg.resonator->omega_r));
    put("resonator.g_ghz", format_real(cfg.resonator->g));
  }
  if (cfg.geometry) {
    put("geometry.area_nm2", format_real(cfg.geometry->area_nm2));
    put("geometry.barrier_nm", format_real(cfg.geometry->barrier_nm));
    put("geometry.tls_charge_e", format_real(cfg.geometry->tls_charge_e));
    put("geometry.junction_count", std::to_string(cfg.geometry->junction_count));
  }
  put("analysis.alpha_inv", format_real(cfg.alpha_inv));
  put("analysis.temperature_mk", format_real(cfg.temperature_mk));
  put("analysis.n_g", format_real(cfg.analysis_n_g));
  put("fit.policy", cfg.fit.policy == AssignmentPolicy::hinted ? "hinted" : "nearest");
  put("fit.seeds", std::to_string(cfg.fit.seeds));
  put("fit.rng_seed", std::to_string(cfg.fit.rng_seed));
  put("fit.max_iterations", std::to_string(cfg.fit.max_iterations));
  for (const auto& [name, value] : cfg.fit.bounds) {
    put("fit.bound." + name, format_real(value));
  }
  if (!cfg.outputs.spectrum_csv.empty()) put("output.spectrum_csv", cfg.outputs.spectrum_csv);
  if (!cfg.outputs.spectrum_svg.empty()) put("output.spectrum_svg", cfg.outputs.spectrum_svg);
  if (!cfg.outputs.fit_report.empty()) put("output.fit_report", cfg.outputs.fit_report);
  if (!cfg.outputs.residual_csv.empty()) put("output.residual_csv", cfg.outputs.residual_csv);
  if (!cfg.outputs.report.empty()) put("output.report", cfg.outputs.report);
  return out.str();
}

void apply_bounds(const FitSettings& settings, FitProblem& problem) {
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const FitParameter& p = problem.parameters()[i];
    const std::string kind(kind_name(p.kind));
    double lo = p.lower;
    double hi = p.upper;
    if (const auto it = settings.bounds.find(kind + ".min"); it != settings.bounds.end()) lo = it->second;
    if (const auto it = settings.bounds.find(kind + ".max"); it != settings.bounds.end()) hi = it->second;
    problem.set_bounds(i, lo, hi);
  }
}

}  // namespace cpbtls
