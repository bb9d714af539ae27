#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "cpbtls/analysis.hpp"
#include "cpbtls/config.hpp"
#include "cpbtls/eigensolver.hpp"
#include "cpbtls/errors.hpp"
#include "cpbtls/fitting.hpp"
#include "cpbtls/formats.hpp"
#include "cpbtls/spectra.hpp"

namespace cpbtls::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot write " + path);
  }
  file << contents;
  if (!file) {
    throw std::runtime_error("write failed for " + path);
  }
}

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file(path, contents);
  }
}

void print_warnings(const ModelConfig& model, std::ostream& err) {
  for (const auto& w : model_warnings(model)) {
    err << "warning: " << w << '\n';
  }
}

int simulate(const std::string& config_path, const std::string& csv_path,
             const std::string& svg_path, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = parse_config(read_file(config_path));
  print_warnings(cfg.model, err);
  const auto grid = make_grid(cfg.grid.start, cfg.grid.stop, cfg.grid.step);
  const SpectrumTable table = spectrum(cfg.model, grid, cfg.max_states);
  emit(csv_path.empty() ? cfg.outputs.spectrum_csv : csv_path, write_spectrum_csv(table), out);
  const std::string svg = svg_path.empty() ? cfg.outputs.spectrum_svg : svg_path;
  if (!svg.empty()) {
    write_file(svg, emit_spectrum_svg(table));
  }
  return kExitOk;
}

int run_fit(const std::string& config_path, const std::string& data_path,
            const std::string& report_path, const std::string& residual_path, unsigned threads,
            std::ostream& out, std::ostream& err) {
  const RunConfig cfg = parse_config(read_file(config_path));
  auto datasets = read_ridge_csv(read_file(data_path));
  FitProblem problem(std::move(datasets), cfg.model.tls_count(), cfg.model.cpb.n_charge_states,
                     cfg.fit.policy);
  apply_bounds(cfg.fit, problem);

  NelderMeadOptions options;
  options.max_iterations = cfg.fit.max_iterations;

  FitResult result;
  std::string report;
  if (cfg.fit.seeds == 0) {
    const std::vector<double> initial = problem.pack(cfg.model);
    if (!problem.within_bounds(initial)) {
      throw FitError("configured model lies outside the fit bounds");
    }
    result = fit(problem, initial, options);
    report = write_fit_report(result);
  } else {
    MultistartResult ms = multistart(problem, static_cast<std::size_t>(cfg.fit.seeds),
                                     cfg.fit.rng_seed, options, threads);
    report = write_multistart_report(ms);
    result = std::move(ms.best);
  }

  const std::string report_target = report_path.empty() ? cfg.outputs.fit_report : report_path;
  std::string residual_target = residual_path.empty() ? cfg.outputs.residual_csv : residual_path;
  if (residual_target.empty() && !report_target.empty()) {
    residual_target = report_target + ".residuals.csv";
  }
  emit(report_target, report, out);
  if (residual_target.empty()) {
    out << '\n';
  }
  emit(residual_target, write_residual_csv(problem, result), out);

  if (!result.converged) {
    err << "fit did not converge within the iteration cap\n";
    return kExitData;
  }
  return kExitOk;
}

int analyze(const std::string& config_path, const std::string& report_path, std::ostream& out,
            std::ostream& err) {
  const RunConfig cfg = parse_config(read_file(config_path));
  print_warnings(cfg.model, err);
  AnalysisInputs inputs;
  inputs.geometry = cfg.geometry.value_or(JunctionGeometry{});
  inputs.alpha_inv = cfg.alpha_inv;
  inputs.temperature_mk = cfg.temperature_mk;
  std::string report = write_derived_report(derive_report(cfg.model, inputs));
  if (cfg.resonator) {
    for (int k = 0; k <= cfg.max_states; ++k) {
      report += "chi_eff.state" + std::to_string(k) + "_ghz = " +
                format_number(chi_eff_multilevel(cfg.model, *cfg.resonator, cfg.analysis_n_g, k)) +
                '\n';
    }
  }
  emit(report_path.empty() ? cfg.outputs.report : report_path, report, out);
  return kExitOk;
}

int sweep(const std::string& config_path, const std::vector<double>& fluxes,
          const std::string& out_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = parse_config(read_file(config_path));
  const auto grid = make_grid(cfg.grid.start, cfg.grid.stop, cfg.grid.step);
  std::filesystem::create_directories(out_dir);
  for (double flux : fluxes) {
    cfg.model.flux_ratio = flux;
    print_warnings(cfg.model, err);
    const SpectrumTable table = spectrum(cfg.model, grid, cfg.max_states);
    const std::string path =
        (std::filesystem::path(out_dir) / ("spectrum_flux_" + format_number(flux) + ".csv")).string();
    write_file(path, write_spectrum_csv(table));
    out << "flux_ratio = " << format_number(flux) << ", e_j_ghz = " << format_number(cfg.model.e_j())
        << ", path = " << path << '\n';
  }
  return kExitOk;
}

ModelConfig table_one_set_four() {
  ModelConfig m;
  m.cpb = {4.5, 6.33, 4, 0};
  m.tls = {TlsParams{0.62, 0.06, 0.35, 2.02}};
  return m;
}

int selftest(std::ostream& out) {
  int failures = 0;
  auto report = [&](bool ok, const std::string& name, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    failures += ok ? 0 : 1;
  };

  std::mt19937_64 rng(20120301);
  double worst_residual = 0.0, worst_ortho = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    SymMatrix h(16);
    for (std::size_t i = 0; i < 16; ++i) {
      for (std::size_t j = i; j < 16; ++j) {
        h.set(i, j, 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
      }
    }
    const EigenSystem sys = eigendecompose(h);
    worst_residual = std::max(worst_residual, residual_norm(sys, h));
    worst_ortho = std::max(worst_ortho, orthonormality_defect(sys));
    double trace = 0.0;
    for (std::size_t i = 0; i < 16; ++i) trace += h(i, i);
    const double sum = std::accumulate(sys.values.begin(), sys.values.end(), 0.0);
    worst_trace = std::max(worst_trace, std::abs(sum - trace) / std::max(1.0, std::abs(trace)));
  }
  report(worst_residual < 1e-10, "eigensolver residual", format_number(worst_residual));
  report(worst_ortho < 1e-10, "eigensolver orthonormality", format_number(worst_ortho));
  report(worst_trace < 1e-9, "eigensolver trace", format_number(worst_trace));

  const ModelConfig model = table_one_set_four();
  const std::vector<double> grid = make_grid(0.9, 1.1, 0.05);
  const std::string csv = write_spectrum_csv(spectrum(model, grid, 4));
  report(write_spectrum_csv(read_spectrum_csv(csv)) == csv, "spectrum csv round trip",
         std::to_string(csv.size()) + " bytes");

  RunConfig cfg;
  cfg.model = model;
  const std::string text = serialize_config(cfg);
  report(serialize_config(parse_config(text)) == text, "config round trip",
         std::to_string(text.size()) + " bytes");

  const auto ridge = synthesize_ridge(model, make_grid(0.9, 1.1, 0.01), "4", {0.01, 7});
  const std::string ridge_csv = write_ridge_csv({ridge});
  report(write_ridge_csv(read_ridge_csv(ridge_csv)) == ridge_csv, "ridge csv round trip",
         std::to_string(ridge.points.size()) + " points");

  return failures == 0 ? kExitOk : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooper-pair box + two-level-system spectrum toolkit", "cpbtls"};
  app.require_subcommand(1);
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);

  std::string config_path, data_path, svg_path, out_path, residual_path, out_dir = ".";
  std::vector<double> fluxes;

  auto* sim = app.add_subcommand("simulate", "Spectrum CSV (and optional SVG) over the configured grid");
  sim->add_option("--config", config_path, "Run configuration")->required();
  sim->add_option("--svg", svg_path, "SVG output path");
  sim->add_option("--out", out_path, "CSV output path (default: config or stdout)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to ridge data");
  fit_cmd->add_option("--config", config_path, "Run configuration")->required();
  fit_cmd->add_option("--data", data_path, "Ridge CSV")->required();
  fit_cmd->add_option("--out", out_path, "Fit report path");
  fit_cmd->add_option("--residuals", residual_path, "Residual CSV path");

  auto* analyze_cmd = app.add_subcommand("analyze", "Derived microscopic quantities");
  analyze_cmd->add_option("--config", config_path, "Run configuration")->required();
  analyze_cmd->add_option("--out", out_path, "Report path");

  auto* sweep_cmd = app.add_subcommand("sweep", "One spectrum per flux ratio");
  sweep_cmd->add_option("--config", config_path, "Run configuration")->required();
  sweep_cmd->add_option("--flux", fluxes, "Comma-separated flux ratios")->required()->delimiter(',');
  sweep_cmd->add_option("--out-dir", out_dir, "Directory for spectrum_flux_<value>.csv files");

  auto* selftest_cmd = app.add_subcommand("selftest", "Eigensolver and round-trip checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return simulate(config_path, out_path, svg_path, out, err);
    if (fit_cmd->parsed()) {
      return run_fit(config_path, data_path, out_path, residual_path, threads, out, err);
    }
    if (analyze_cmd->parsed()) return analyze(config_path, out_path, out, err);
    if (sweep_cmd->parsed()) return sweep(config_path, fluxes, out_dir, out, err);
    if (selftest_cmd->parsed()) return selftest(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace cpbtls::cli
