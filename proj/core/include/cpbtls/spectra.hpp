#pragma once

// Transition spectra over gate charge: frequencies from the ground state,
// eigenvector composition by TLS well configuration, gate-drive visibility and
// dispersive-shift estimates.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cpbtls/eigensolver.hpp"
#include "cpbtls/hamiltonian.hpp"

namespace cpbtls {

// Relative visibility floor below which a transition counts as dark.
inline constexpr double kBrightFloor = 0.01;

struct TransitionLine {
  double n_g = 0.0;
  double freq = 0.0;  // (E_k - E_0)/h, GHz
  int state_index = 0;
  // Weight of the excited state in the ground state's dominant TLS block.
  double cpb_fraction = 1.0;
  // Weight in blocks where TLS 1 / TLS 2 sits in the other well than in the ground state.
  std::array<double, 2> tls_flip{};
  // |<k|Q|0>|^2 with Q = diag(2n - n_g) in every TLS block.
  double visibility = 0.0;
  // Weight of the state in each TLS block (block index as in hamiltonian.hpp).
  std::vector<double> block_weights;
};

struct SpectrumTable {
  std::vector<double> grid;
  std::vector<TransitionLine> lines;  // grid-major, then state_index
};

struct ResonatorParams {
  double omega_r = 0.0;  // omega_r / 2pi, GHz
  double g = 0.0;        // g / 2pi, GHz
};

// Diagonalized Hamiltonian plus what is needed to characterise its states.
struct LevelStructure {
  EigenSystem system;
  std::size_t block_size = 0;
  std::size_t block_count = 1;
  std::size_t ground_block = 0;
  std::vector<double> charge_diagonal;  // entries of Q

  double block_weight(std::size_t state, std::size_t block) const;
  // <k|Q|j>
  double charge_element(std::size_t k, std::size_t j) const;
};

LevelStructure solve_levels(const ModelConfig& config, double n_g);

// sqrt((4 E_c (1 - n_g))^2 + E_J^2)
double two_level_closed_form(double e_c, double e_j, double n_g);
// E_J + 8 E_c^2 (1 - n_g)^2 / E_J, valid near n_g = 1
double two_level_parabolic(double e_c, double e_j, double n_g);

// Lines for excited states k = 1..max_states. Requires max_states < dimension.
std::vector<TransitionLine> transitions_at(const ModelConfig& config, double n_g, int max_states);

// All excited states (k = 1..dim-1).
std::vector<TransitionLine> all_transitions_at(const ModelConfig& config, double n_g);

// Lines whose visibility is at least kBrightFloor times the largest one.
std::vector<TransitionLine> bright_lines(std::span<const TransitionLine> lines,
                                         double relative_floor = kBrightFloor);

// Grid must be ascending and inside [0, 2].
SpectrumTable spectrum(const ModelConfig& config, std::span<const double> n_g_grid, int max_states);

// start, start + step, ... up to stop (inclusive within 1e-9 step).
std::vector<double> make_grid(double start, double stop, double step);

// g^2 / (qubit_freq - omega_r); throws DomainError at zero detuning.
double dispersive_shift(const ResonatorParams& res, double qubit_freq);

// Qualitative multilevel shift of state j:
//   sum_{k != j} g^2 w_jk 2 w_kj / (w_kj^2 - w_r^2),
// w_jk = |<k|Q|j>|^2 normalised by |<1|Q|0>|^2 of the bare box at n_g = 1.
// Throws DomainError naming (j, k) when |w_kj| is within 1e-6 GHz of w_r.
double chi_eff_multilevel(const ModelConfig& config, const ResonatorParams& res, double n_g,
                          int state_index);

}  // namespace cpbtls
