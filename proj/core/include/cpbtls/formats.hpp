#pragma once

// Text formats: ridge CSV (input), spectrum CSV and SVG, fit and analysis
// reports as `key = value` text, residual CSV. Every writer is byte-deterministic.

#include <string>
#include <string_view>
#include <vector>

#include "cpbtls/analysis.hpp"
#include "cpbtls/fitting.hpp"
#include "cpbtls/spectra.hpp"

namespace cpbtls {

inline constexpr std::string_view kRidgeHeader = "dataset,n_g,freq_ghz,weight,branch_hint";
inline constexpr std::string_view kSpectrumHeader =
    "n_g,state_index,freq_ghz,cpb_fraction,tls1_flip,tls2_flip,visibility";
inline constexpr std::string_view kResidualHeader =
    "dataset,n_g,freq_ghz,model_freq_ghz,residual_ghz,weight,flagged";

// 9 significant digits ("%.9g").
std::string format_number(double value);

// Rows grouped by dataset label in order of first appearance. Empty weight
// means 1, empty branch_hint means none. Throws ParseError naming the line.
std::vector<RidgeDataset> read_ridge_csv(std::string_view text);
std::string write_ridge_csv(const std::vector<RidgeDataset>& datasets);

std::string write_spectrum_csv(const SpectrumTable& table);
// Inverse of write_spectrum_csv (block weights are not stored).
SpectrumTable read_spectrum_csv(std::string_view text);

struct SvgStyle {
  std::string title = "transition spectrum";
  double point_radius = 2.5;
};

// 800 x 600 scatter of frequency against n_g; opacity follows visibility
// normalised to the brightest line, colour follows state_index.
std::string emit_spectrum_svg(const SpectrumTable& table, const SvgStyle& style = {});

std::string write_fit_report(const FitResult& result);
std::string write_multistart_report(const MultistartResult& result);
std::string write_residual_csv(const FitProblem& problem, const FitResult& result);
std::string write_derived_report(const DerivedReport& report);

}  // namespace cpbtls
