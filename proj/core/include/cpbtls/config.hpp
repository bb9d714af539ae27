#pragma once

// Line-based `key = value` run configuration. `#` starts a comment, keys are
// dot-scoped, unknown or repeated keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cpbtls/analysis.hpp"
#include "cpbtls/fitting.hpp"
#include "cpbtls/hamiltonian.hpp"
#include "cpbtls/spectra.hpp"

namespace cpbtls {

struct GridSpec {
  double start = 0.5;
  double stop = 1.5;
  double step = 0.005;
};

struct FitSettings {
  AssignmentPolicy policy = AssignmentPolicy::nearest_branch;
  int seeds = 0;  // 0: single fit from the configured model; >= 1: multistart
  std::uint64_t rng_seed = 0;
  int max_iterations = 5000;  // Nelder-Mead cap per fit
  // "<kind>.min" / "<kind>.max" overrides, kind as in parse_kind().
  std::map<std::string, double> bounds;
};

struct OutputPaths {
  std::string spectrum_csv;
  std::string spectrum_svg;
  std::string fit_report;
  std::string residual_csv;
  std::string report;
};

struct RunConfig {
  ModelConfig model;
  GridSpec grid;
  int max_states = 4;  // parse default is min(4, dimension - 1)
  OutputPaths outputs;
  std::optional<ResonatorParams> resonator;
  std::optional<JunctionGeometry> geometry;
  double alpha_inv = 100.0;
  double temperature_mk = 25.0;
  double analysis_n_g = 1.0;
  FitSettings fit;

  bool operator==(const RunConfig& other) const;
};

// Throws ParseError naming the offending line and key.
RunConfig parse_config(std::string_view text);

// Canonical form: fixed key order, shortest round-trip numbers.
std::string serialize_config(const RunConfig& config);

// Applies fit.bound overrides to a problem.
void apply_bounds(const FitSettings& settings, FitProblem& problem);

}  // namespace cpbtls
