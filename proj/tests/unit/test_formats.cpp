#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cpbtls/errors.hpp"
#include "cpbtls/formats.hpp"
#include "support/fixtures.hpp"

namespace cpbtls {
namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

int parse_error_line(const std::string& text) {
  try {
    read_ridge_csv(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected ParseError for:\n" << text;
  return -1;
}

const std::string kHeader = std::string(kRidgeHeader) + "\n";

TEST(FormatNumber, NineSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(6.33), "6.33");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-2.5e-7), "-2.5e-07");
  EXPECT_EQ(format_number(123456789012.0), "1.23456789e+11");
}

TEST(RidgeCsv, SinglePoint) {
  const auto data = read_ridge_csv(kHeader + "1,1.00,6.33,1,\n");
  ASSERT_EQ(data.size(), 1U);
  EXPECT_EQ(data[0].label, "1");
  ASSERT_EQ(data[0].points.size(), 1U);
  EXPECT_EQ(data[0].points[0].n_g, 1.0);
  EXPECT_EQ(data[0].points[0].freq, 6.33);
  EXPECT_EQ(data[0].points[0].weight, 1.0);
  EXPECT_FALSE(data[0].points[0].branch_hint.has_value());
}

TEST(RidgeCsv, DefaultsAndHints) {
  const auto data = read_ridge_csv(kHeader + "a,0.9,4.1,,2\r\na,1.1,4.2,0.5,\n\n");
  ASSERT_EQ(data[0].points.size(), 2U);
  EXPECT_EQ(data[0].points[0].weight, 1.0);
  EXPECT_EQ(data[0].points[0].branch_hint, 2);
  EXPECT_EQ(data[0].points[1].weight, 0.5);
}

TEST(RidgeCsv, ErrorsNameTheLine) {
  EXPECT_EQ(parse_error_line(kHeader + "1,2.5,6.33,1,\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,6.33,1,\n1,1.0,abc,1,\n"), 3);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,0,1,\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,-3,1,\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,3,-1,\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,3,1\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + ",1.0,3,1,\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,1.0,3,1,x\n"), 2);
  EXPECT_EQ(parse_error_line(kHeader + "1,nan,3,1,\n"), 2);
  EXPECT_EQ(parse_error_line("dataset,n_g,freq,weight,branch_hint\n1,1,1,1,\n"), 1);
  EXPECT_EQ(parse_error_line(""), 1);
  try {
    read_ridge_csv(kHeader + "1,2.5,6.33,1,\n");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_EQ(e.key(), "n_g");
  }
}

TEST(RidgeCsv, GroupsByFirstAppearance) {
  const auto data = read_ridge_csv(kHeader + "b,1,1,1,\na,1,2,1,\nb,1.1,3,1,\nc,1,4,1,\na,1.2,5,1,\n");
  ASSERT_EQ(data.size(), 3U);
  EXPECT_EQ(data[0].label, "b");
  EXPECT_EQ(data[1].label, "a");
  EXPECT_EQ(data[2].label, "c");
  EXPECT_EQ(data[0].points[1].freq, 3.0);
  EXPECT_EQ(data[1].points[1].freq, 5.0);
}

TEST(RidgeCsv, RoundTrip) {
  const RidgeDataset d4 =
      synthesize_ridge(testing::table_one(4), make_grid(0.9, 1.1, 0.01), "4", {0.01, 12});
  const RidgeDataset d3 =
      synthesize_ridge(testing::table_one(3), make_grid(0.9, 1.1, 0.01), "3", {0.01, 13});
  const std::string text = write_ridge_csv({d4, d3});
  const auto back = read_ridge_csv(text);
  EXPECT_EQ(write_ridge_csv(back), text);
  ASSERT_EQ(back.size(), 2U);
  ASSERT_EQ(back[0].points.size(), d4.points.size());
  for (std::size_t i = 0; i < d4.points.size(); ++i) {
    EXPECT_NEAR(back[0].points[i].freq, d4.points[i].freq, 1e-8 * d4.points[i].freq);
    EXPECT_EQ(back[0].points[i].branch_hint, d4.points[i].branch_hint);
  }
}

TEST(SpectrumCsv, LineCounts) {
  const std::vector<double> one{1.0};
  const std::string bare = write_spectrum_csv(spectrum(testing::bare_cpb(4.5, 6.33, 4), one, 2));
  EXPECT_EQ(count_lines(bare), 3U);
  EXPECT_EQ(bare.substr(0, bare.find('\n')), kSpectrumHeader);

  const std::vector<double> three{0.95, 1.0, 1.05};
  const std::string tls = write_spectrum_csv(spectrum(testing::table_one(4), three, 4));
  EXPECT_EQ(count_lines(tls), 13U);
}

TEST(SpectrumCsv, ReadBackIsByteIdentical) {
  const SpectrumTable table = spectrum(testing::table_one(4), make_grid(0.9, 1.1, 0.01), 4);
  const std::string text = write_spectrum_csv(table);
  const SpectrumTable back = read_spectrum_csv(text);
  EXPECT_EQ(back.grid.size(), table.grid.size());
  EXPECT_EQ(back.lines.size(), table.lines.size());
  EXPECT_EQ(write_spectrum_csv(back), text);
}

TEST(Svg, EmptyTableThrows) { EXPECT_THROW(emit_spectrum_svg(SpectrumTable{}), std::invalid_argument); }

TEST(Svg, CanvasAndMarkers) {
  const SpectrumTable table = spectrum(testing::table_one(4), make_grid(0.9, 1.1, 0.02), 4);
  const std::string svg = emit_spectrum_svg(table, {"set 4", 3.0});
  EXPECT_NE(svg.find("width=\"800\" height=\"600\""), std::string::npos);
  EXPECT_NE(svg.find(">set 4</text>"), std::string::npos);
  EXPECT_EQ(count_of(svg, "<circle "), table.lines.size());
  std::set<std::string> colours;
  for (std::size_t pos = svg.find("fill=\"#"); pos != std::string::npos; pos = svg.find("fill=\"#", pos + 1)) {
    colours.insert(svg.substr(pos + 6, 7));
  }
  EXPECT_EQ(colours.size(), 4U);
  EXPECT_EQ(emit_spectrum_svg(table, {"set 4", 3.0}), svg);
}

TEST(Svg, SinglePointTable) {
  const std::vector<double> one{1.0};
  const std::string svg = emit_spectrum_svg(spectrum(testing::bare_cpb(4.5, 6.33, 4), one, 1));
  EXPECT_EQ(count_of(svg, "<circle "), 1U);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Reports, FitAndResidualOutputs) {
  const ModelConfig truth = testing::table_one(4);
  const RidgeDataset d = synthesize_ridge(truth, make_grid(0.9, 1.1, 0.02), "4", {0.0, 1, kBrightFloor, 2});
  FitProblem problem({d}, 1, 4, AssignmentPolicy::hinted);
  const std::vector<double> start = problem.pack(truth);
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (problem.parameters()[i].kind != ParameterKind::e_j) problem.set_bounds(i, start[i], start[i]);
  }
  const FitResult r = fit(problem, start);
  const std::string report = write_fit_report(r);
  for (const char* key : {"objective_ghz2 = ", "iterations = ", "evaluations = ", "converged = true",
                          "points = ", "flagged_points = 0", "param.e_c = 4.5", "param.4.e_j = "}) {
    EXPECT_NE(report.find(key), std::string::npos) << key;
  }
  const std::string residuals = write_residual_csv(problem, r);
  EXPECT_EQ(residuals.substr(0, residuals.find('\n')), kResidualHeader);
  EXPECT_EQ(count_lines(residuals), d.points.size() + 1);
}

TEST(Reports, DerivedReportKeysAndInfiniteT1) {
  ModelConfig m = testing::table_two(1);
  const std::string text = write_derived_report(derive_report(m, {}));
  for (const char* key : {"e_j_ghz = 2.79", "i0_na = ", "i0_max_na = ", "c_sigma_ff = ",
                          "current_density_a_per_cm2 = ", "tls1.t1_bound_us = inf", "tls2.t1_bound_us = ",
                          "tls2.island_potential_shift_uv = "}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(count_of(text, "= inf"), 1U);
  EXPECT_EQ(count_lines(text), 5U + 2U * 7U);
}

}  // namespace
}  // namespace cpbtls
