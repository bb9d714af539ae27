#include "cpbtls/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

constexpr double kCanvasWidth = 800.0;
constexpr double kCanvasHeight = 600.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string_view::npos ? line.size() - pos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

double parse_field(std::string_view field, int line, const char* column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": column " + column + ": non-numeric value '" +
                         std::string(field) + "'",
                     line, column);
  }
  return value;
}

int parse_int_field(std::string_view field, int line, const char* column) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line) + ": column " + column + ": non-integer value '" +
                         std::string(field) + "'",
                     line, column);
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::vector<RidgeDataset> read_ridge_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kRidgeHeader) {
    throw ParseError("line 1: bad header, expected '" + std::string(kRidgeHeader) + "'", 1);
  }
  std::vector<RidgeDataset> datasets;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    if (fields[0].empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty dataset label", line_no, "dataset");
    }
    RidgePoint pt;
    pt.n_g = parse_field(fields[1], line_no, "n_g");
    pt.freq = parse_field(fields[2], line_no, "freq_ghz");
    pt.weight = fields[3].empty() ? 1.0 : parse_field(fields[3], line_no, "weight");
    if (!fields[4].empty()) pt.branch_hint = parse_int_field(fields[4], line_no, "branch_hint");
    if (pt.n_g < 0.0 || pt.n_g > 2.0) {
      throw ParseError("line " + std::to_string(line_no) + ": n_g " + std::string(fields[1]) +
                           " outside [0, 2]",
                       line_no, "n_g");
    }
    if (!(pt.freq > 0.0)) {
      throw ParseError("line " + std::to_string(line_no) + ": freq_ghz must be > 0", line_no, "freq_ghz");
    }
    if (pt.weight < 0.0) {
      throw ParseError("line " + std::to_string(line_no) + ": weight must be >= 0", line_no, "weight");
    }
    const std::string label(fields[0]);
    auto it = std::find_if(datasets.begin(), datasets.end(),
                           [&](const RidgeDataset& d) { return d.label == label; });
    if (it == datasets.end()) {
      datasets.push_back({label, {}});
      it = std::prev(datasets.end());
    }
    it->points.push_back(pt);
  }
  return datasets;
}

std::string write_ridge_csv(const std::vector<RidgeDataset>& datasets) {
  std::string out(kRidgeHeader);
  out += '\n';
  for (const auto& d : datasets) {
    for (const auto& pt : d.points) {
      out += d.label + ',' + format_number(pt.n_g) + ',' + format_number(pt.freq) + ',' +
             format_number(pt.weight) + ',' +
             (pt.branch_hint ? std::to_string(*pt.branch_hint) : std::string{}) + '\n';
    }
  }
  return out;
}

std::string write_spectrum_csv(const SpectrumTable& table) {
  std::string out(kSpectrumHeader);
  out += '\n';
  for (const auto& line : table.lines) {
    out += format_number(line.n_g) + ',' + std::to_string(line.state_index) + ',' +
           format_number(line.freq) + ',' + format_number(line.cpb_fraction) + ',' +
           format_number(line.tls_flip[0]) + ',' + format_number(line.tls_flip[1]) + ',' +
           format_number(line.visibility) + '\n';
  }
  return out;
}

SpectrumTable read_spectrum_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kSpectrumHeader) {
    throw ParseError("line 1: bad header, expected '" + std::string(kSpectrumHeader) + "'", 1);
  }
  SpectrumTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() != 7) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 7 fields", line_no);
    }
    TransitionLine line;
    line.n_g = parse_field(f[0], line_no, "n_g");
    line.state_index = parse_int_field(f[1], line_no, "state_index");
    line.freq = parse_field(f[2], line_no, "freq_ghz");
    line.cpb_fraction = parse_field(f[3], line_no, "cpb_fraction");
    line.tls_flip[0] = parse_field(f[4], line_no, "tls1_flip");
    line.tls_flip[1] = parse_field(f[5], line_no, "tls2_flip");
    line.visibility = parse_field(f[6], line_no, "visibility");
    if (table.grid.empty() || table.grid.back() != line.n_g) {
      table.grid.push_back(line.n_g);
    }
    table.lines.push_back(std::move(line));
  }
  return table;
}

std::string emit_spectrum_svg(const SpectrumTable& table, const SvgStyle& style) {
  if (table.grid.empty() || table.lines.empty()) {
    throw std::invalid_argument("emit_spectrum_svg: empty spectrum table");
  }
  double x_lo = table.grid.front();
  double x_hi = table.grid.back();
  if (x_hi <= x_lo) {
    x_lo -= 0.05;
    x_hi += 0.05;
  }
  double y_lo = table.lines.front().freq;
  double y_hi = y_lo;
  double peak = 0.0;
  for (const auto& line : table.lines) {
    y_lo = std::min(y_lo, line.freq);
    y_hi = std::max(y_hi, line.freq);
    peak = std::max(peak, line.visibility);
  }
  const double pad = y_hi > y_lo ? 0.05 * (y_hi - y_lo) : 0.5;
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kCanvasWidth - kMarginLeft - kMarginRight;
  const double plot_h = kCanvasHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << style.title << "</text>\n"
      << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "<rect x=\"" << fixed(kMarginLeft, 2) << "\" y=\"" << fixed(kMarginTop, 2) << "\" width=\""
      << fixed(plot_w, 2) << "\" height=\"" << fixed(plot_h, 2) << "\"/>\n"
      << "</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  constexpr int kTicks = 5;
  for (int i = 0; i < kTicks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / (kTicks - 1);
    const double fy = y_lo + (y_hi - y_lo) * i / (kTicks - 1);
    svg << "<text x=\"" << fixed(px(fx), 2) << "\" y=\"" << fixed(kCanvasHeight - kMarginBottom + 16, 2)
        << "\" text-anchor=\"middle\">" << fixed(fx, 3) << "</text>\n";
    svg << "<text x=\"" << fixed(kMarginLeft - 6, 2) << "\" y=\"" << fixed(py(fy) + 4, 2)
        << "\" text-anchor=\"end\">" << fixed(fy, 3) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kMarginLeft + plot_w / 2, 2) << "\" y=\"" << fixed(kCanvasHeight - 10, 2)
      << "\" text-anchor=\"middle\">gate charge n_g</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed(kMarginTop + plot_h / 2, 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fixed(kMarginTop + plot_h / 2, 2)
      << ")\">frequency (GHz)</text>\n";
  svg << "</g>\n";

  svg << "<g stroke=\"none\">\n";
  for (const auto& line : table.lines) {
    const double opacity = peak > 0.0 ? line.visibility / peak : 0.0;
    const char* colour = kPalette[static_cast<std::size_t>(std::max(line.state_index - 1, 0)) %
                                  std::size(kPalette)];
    svg << "<circle cx=\"" << fixed(px(line.n_g), 2) << "\" cy=\"" << fixed(py(line.freq), 2)
        << "\" r=\"" << fixed(style.point_radius, 2) << "\" fill=\"" << colour
        << "\" fill-opacity=\"" << fixed(opacity, 4) << "\" data-state=\"" << line.state_index
        << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string write_fit_report(const FitResult& result) {
  std::ostringstream out;
  std::size_t flagged = 0;
  for (const auto& r : result.residuals) flagged += r.flagged ? 1 : 0;
  out << "objective_ghz2 = " << format_number(result.objective) << '\n'
      << "iterations = " << result.iterations << '\n'
      << "evaluations = " << result.evaluations << '\n'
      << "converged = " << (result.converged ? "true" : "false") << '\n'
      << "points = " << result.residuals.size() << '\n'
      << "flagged_points = " << flagged << '\n';
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    out << "param." << result.labels[i] << " = " << format_number(result.parameters[i]) << '\n';
  }
  return out.str();
}

std::string write_multistart_report(const MultistartResult& result) {
  std::ostringstream out;
  out << write_fit_report(result.best);
  out << "multistart.starts = " << result.objectives.size() << '\n'
      << "multistart.best_start = " << result.best_seed << '\n'
      << "multistart.near_best = " << result.near_best << '\n';
  for (const auto& s : result.spread) {
    out << "spread." << s.label << " = " << format_number(s.relative) << '\n';
  }
  return out.str();
}

std::string write_residual_csv(const FitProblem& problem, const FitResult& result) {
  std::string out(kResidualHeader);
  out += '\n';
  for (const auto& r : result.residuals) {
    const RidgeDataset& d = problem.datasets()[r.dataset];
    const RidgePoint& pt = d.points[r.point];
    out += d.label + ',' + format_number(pt.n_g) + ',' + format_number(pt.freq) + ',' +
           (r.flagged ? std::string{} : format_number(r.model_freq)) + ',' +
           (r.flagged ? std::string{} : format_number(r.residual)) + ',' + format_number(pt.weight) +
           ',' + (r.flagged ? "1" : "0") + '\n';
  }
  return out;
}

std::string write_derived_report(const DerivedReport& report) {
  std::ostringstream out;
  out << "e_j_ghz = " << format_number(report.e_j_ghz) << '\n'
      << "i0_na = " << format_number(report.i0_na) << '\n'
      << "i0_max_na = " << format_number(report.i0_max_na) << '\n'
      << "c_sigma_ff = " << format_number(report.c_sigma_ff) << '\n'
      << "current_density_a_per_cm2 = " << format_number(report.current_density_a_per_cm2) << '\n';
  for (std::size_t i = 0; i < report.tls.size(); ++i) {
    const TlsReport& t = report.tls[i];
    const std::string p = "tls" + std::to_string(i + 1) + ".";
    out << p << "delta_i0_na = " << format_number(t.delta_i0_na) << '\n'
        << p << "fractional_delta_ej = " << format_number(t.fractional_delta_ej) << '\n'
        << p << "a_eff_nm2 = " << format_number(t.a_eff_nm2) << '\n'
        << p << "hop_distance_angstrom = " << format_number(t.hop_distance_angstrom) << '\n'
        << p << "tls_freq_ghz = " << format_number(t.tls_freq_ghz) << '\n'
        << p << "t1_bound_us = " << (t.t1_bound_us ? format_number(*t.t1_bound_us) : "inf") << '\n'
        << p << "island_potential_shift_uv = " << format_number(t.island_potential_shift_uv) << '\n';
  }
  return out.str();
}

}  // namespace cpbtls
