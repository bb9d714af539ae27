#pragma once

// Microscopic quantities derived from fitted energies. Inputs in GHz
// (frequency equivalents), outputs in the units named by each function.

#include <optional>
#include <vector>

#include "cpbtls/hamiltonian.hpp"

namespace cpbtls {

namespace constants {
inline constexpr double planck = 6.62607015e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);  // Wb
inline constexpr double boltzmann_over_h_ghz_per_k = 20.836619;  // k_B/h in GHz/K
}  // namespace constants

struct JunctionGeometry {
  double area_nm2 = 350.0 * 150.0;  // one junction
  double barrier_nm = 1.0;
  double tls_charge_e = 1.0;
  int junction_count = 2;

  double total_area_nm2() const noexcept { return area_nm2 * junction_count; }
};

// I_0 = 2 pi E_J / Phi_0 = 4 pi e f, in nA. Linear, so it also maps Delta E_J to Delta I_0.
double critical_current_na(double e_j_ghz);
double josephson_energy_ghz(double i0_na);

struct FractionAndArea {
  double fraction = 0.0;  // |Delta E_J| / E_J
  double a_eff_nm2 = 0.0;
};
FractionAndArea fractional_and_area(double e_j_ghz, double delta_e_j_ghz,
                                    const JunctionGeometry& geom);

// (x_R - x_L) cos(eta) = |E_int| d / (2 E_c Q_TLS/e), in Angstrom.
double hop_distance_angstrom(double e_int_ghz, double e_c_ghz, const JunctionGeometry& geom);

// Q_TLS / C_sigma * displacement / d, in microvolt.
double island_potential_shift_uv(const JunctionGeometry& geom, double c_sigma_ff,
                                 double displacement_cos_nm);

// C_sigma = e^2 / (2 h E_c), in fF.
double island_capacitance_ff(double e_c_ghz);

// sqrt(E_R^2 + 4 T_LR^2), E_L = 0.
double tls_frequency_ghz(double e_r_ghz, double t_lr_ghz);

// T_1 = (1/alpha) / (w_TLS T_LR^2 coth(w_TLS / 2 k_B T)), every energy in GHz,
// 1/alpha in us GHz^3, temperature in mK. nullopt for T_LR = 0 (no relaxation
// channel, unbounded lifetime).
std::optional<double> t1_bound_us(double alpha_inv, double omega_tls_ghz, double t_lr_ghz,
                                  double temperature_mk);

// Critical current of e_j_max over the total junction area, in A/cm^2.
double current_density_a_per_cm2(double e_j_max_ghz, const JunctionGeometry& geom);

struct TlsReport {
  double delta_i0_na = 0.0;
  double fractional_delta_ej = 0.0;
  double a_eff_nm2 = 0.0;
  double hop_distance_angstrom = 0.0;
  double tls_freq_ghz = 0.0;
  std::optional<double> t1_bound_us;
  double island_potential_shift_uv = 0.0;
};

struct DerivedReport {
  double e_j_ghz = 0.0;
  double i0_na = 0.0;
  double i0_max_na = 0.0;
  double c_sigma_ff = 0.0;
  double current_density_a_per_cm2 = 0.0;
  std::vector<TlsReport> tls;
};

struct AnalysisInputs {
  JunctionGeometry geometry;
  double alpha_inv = 100.0;      // us GHz^3
  double temperature_mk = 25.0;
};

DerivedReport derive_report(const ModelConfig& config, const AnalysisInputs& inputs);

}  // namespace cpbtls
