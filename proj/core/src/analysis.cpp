#include "cpbtls/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

constexpr double kGiga = 1e9;
constexpr double kNano = 1e-9;
constexpr double kFemto = 1e-15;
constexpr double kMicro = 1e-6;
constexpr double kAngstromPerNm = 10.0;
constexpr double kCm2PerNm2 = 1e-14;

void require_geometry(const JunctionGeometry& geom) {
  if (!(geom.area_nm2 > 0.0) || !(geom.barrier_nm > 0.0) || !(geom.tls_charge_e > 0.0) ||
      geom.junction_count < 1) {
    throw std::invalid_argument("junction geometry entries must all be positive");
  }
}

}  // namespace

double critical_current_na(double e_j_ghz) {
  const double amps =
      2.0 * std::numbers::pi * constants::planck * (e_j_ghz * kGiga) / constants::flux_quantum;
  return amps / kNano;
}

double josephson_energy_ghz(double i0_na) {
  const double hertz =
      i0_na * kNano * constants::flux_quantum / (2.0 * std::numbers::pi * constants::planck);
  return hertz / kGiga;
}

FractionAndArea fractional_and_area(double e_j_ghz, double delta_e_j_ghz,
                                    const JunctionGeometry& geom) {
  if (!(e_j_ghz > 0.0)) {
    throw std::invalid_argument("fractional_and_area: E_J must be positive");
  }
  FractionAndArea out;
  out.fraction = std::abs(delta_e_j_ghz) / e_j_ghz;
  out.a_eff_nm2 = out.fraction * geom.area_nm2;
  return out;
}

double hop_distance_angstrom(double e_int_ghz, double e_c_ghz, const JunctionGeometry& geom) {
  if (!(e_c_ghz > 0.0) || !(geom.tls_charge_e > 0.0)) {
    throw std::invalid_argument("hop_distance: E_c and TLS charge must be positive");
  }
  const double nm = std::abs(e_int_ghz) * geom.barrier_nm / (2.0 * e_c_ghz * geom.tls_charge_e);
  return nm * kAngstromPerNm;
}

double island_potential_shift_uv(const JunctionGeometry& geom, double c_sigma_ff,
                                 double displacement_cos_nm) {
  if (!(c_sigma_ff > 0.0)) {
    throw std::invalid_argument("island_potential_shift: C_sigma must be positive");
  }
  const double volts = geom.tls_charge_e * constants::elementary_charge / (c_sigma_ff * kFemto) *
                       (displacement_cos_nm / geom.barrier_nm);
  return volts / kMicro;
}

double island_capacitance_ff(double e_c_ghz) {
  if (!(e_c_ghz > 0.0)) {
    throw std::invalid_argument("island_capacitance: E_c must be positive");
  }
  const double e = constants::elementary_charge;
  return e * e / (2.0 * constants::planck * e_c_ghz * kGiga) / kFemto;
}

double tls_frequency_ghz(double e_r_ghz, double t_lr_ghz) {
  return std::sqrt(e_r_ghz * e_r_ghz + 4.0 * t_lr_ghz * t_lr_ghz);
}

std::optional<double> t1_bound_us(double alpha_inv, double omega_tls_ghz, double t_lr_ghz,
                                  double temperature_mk) {
  if (!(temperature_mk > 0.0) || !(omega_tls_ghz > 0.0) || t_lr_ghz < 0.0) {
    throw DomainError("t1_bound: need T > 0, omega_TLS > 0 and T_LR >= 0");
  }
  if (t_lr_ghz == 0.0) {
    return std::nullopt;
  }
  const double thermal_ghz = constants::boltzmann_over_h_ghz_per_k * temperature_mk * 1e-3;
  const double coth = 1.0 / std::tanh(omega_tls_ghz / (2.0 * thermal_ghz));
  return alpha_inv / (omega_tls_ghz * t_lr_ghz * t_lr_ghz * coth);
}

double current_density_a_per_cm2(double e_j_max_ghz, const JunctionGeometry& geom) {
  require_geometry(geom);
  return critical_current_na(e_j_max_ghz) * kNano / (geom.total_area_nm2() * kCm2PerNm2);
}

DerivedReport derive_report(const ModelConfig& config, const AnalysisInputs& inputs) {
  validate(config);
  require_geometry(inputs.geometry);
  DerivedReport report;
  report.e_j_ghz = config.e_j();
  report.i0_na = critical_current_na(report.e_j_ghz);
  report.i0_max_na = critical_current_na(config.cpb.e_j_max);
  report.c_sigma_ff = island_capacitance_ff(config.cpb.e_c);
  report.current_density_a_per_cm2 =
      current_density_a_per_cm2(config.cpb.e_j_max, inputs.geometry);

  for (const TlsParams& t : config.tls) {
    TlsReport r;
    r.delta_i0_na = critical_current_na(std::abs(t.delta_e_j));
    if (report.e_j_ghz > 0.0) {
      const FractionAndArea fa = fractional_and_area(report.e_j_ghz, t.delta_e_j, inputs.geometry);
      r.fractional_delta_ej = fa.fraction;
      r.a_eff_nm2 = fa.a_eff_nm2;
    }
    r.hop_distance_angstrom = hop_distance_angstrom(t.e_int, config.cpb.e_c, inputs.geometry);
    r.tls_freq_ghz = tls_frequency_ghz(t.e_r, t.t_lr);
    if (r.tls_freq_ghz > 0.0) {
      r.t1_bound_us = t1_bound_us(inputs.alpha_inv, r.tls_freq_ghz, t.t_lr, inputs.temperature_mk);
    }
    r.island_potential_shift_uv = island_potential_shift_uv(
        inputs.geometry, report.c_sigma_ff, r.hop_distance_angstrom / kAngstromPerNm);
    report.tls.push_back(r);
  }
  return report;
}

}  // namespace cpbtls
