#include "cpbtls/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

constexpr double kResonanceGuard = 1e-6;

TransitionLine make_line(const LevelStructure& levels, double n_g, std::size_t k) {
  TransitionLine line;
  line.n_g = n_g;
  line.state_index = static_cast<int>(k);
  line.freq = levels.system.values[k] - levels.system.values[0];
  line.block_weights.resize(levels.block_count);
  for (std::size_t b = 0; b < levels.block_count; ++b) {
    line.block_weights[b] = levels.block_weight(k, b);
  }
  line.cpb_fraction = line.block_weights[levels.ground_block];
  for (std::size_t b = 0; b < levels.block_count; ++b) {
    const std::size_t flipped = b ^ levels.ground_block;
    for (std::size_t i = 0; i < 2; ++i) {
      if ((flipped >> i) & 1U) {
        line.tls_flip[i] += line.block_weights[b];
      }
    }
  }
  const double q = levels.charge_element(k, 0);
  line.visibility = q * q;
  return line;
}

}  // namespace

double LevelStructure::block_weight(std::size_t state, std::size_t block) const {
  const auto v = system.vector(state);
  double w = 0.0;
  for (std::size_t i = block * block_size; i < (block + 1) * block_size; ++i) {
    w += v[i] * v[i];
  }
  return w;
}

double LevelStructure::charge_element(std::size_t k, std::size_t j) const {
  const auto vk = system.vector(k);
  const auto vj = system.vector(j);
  double sum = 0.0;
  for (std::size_t i = 0; i < system.dim; ++i) {
    sum += vk[i] * charge_diagonal[i] * vj[i];
  }
  return sum;
}

LevelStructure solve_levels(const ModelConfig& config, double n_g) {
  validate(config);
  LevelStructure levels;
  levels.system = eigendecompose(build_hamiltonian(config, n_g));
  levels.block_size = static_cast<std::size_t>(config.cpb.n_charge_states);
  levels.block_count = std::size_t{1} << config.tls.size();

  const std::vector<int> states = charge_states(config.cpb);
  levels.charge_diagonal.reserve(levels.system.dim);
  for (std::size_t b = 0; b < levels.block_count; ++b) {
    for (int n : states) {
      levels.charge_diagonal.push_back(2.0 * n - n_g);
    }
  }

  double best = -1.0;
  for (std::size_t b = 0; b < levels.block_count; ++b) {
    const double w = levels.block_weight(0, b);
    if (w > best) {
      best = w;
      levels.ground_block = b;
    }
  }
  return levels;
}

double two_level_closed_form(double e_c, double e_j, double n_g) {
  const double charge = 4.0 * e_c * (1.0 - n_g);
  return std::sqrt(charge * charge + e_j * e_j);
}

double two_level_parabolic(double e_c, double e_j, double n_g) {
  const double d = 1.0 - n_g;
  return e_j + 8.0 * e_c * e_c * d * d / e_j;
}

std::vector<TransitionLine> all_transitions_at(const ModelConfig& config, double n_g) {
  const LevelStructure levels = solve_levels(config, n_g);
  std::vector<TransitionLine> lines;
  lines.reserve(levels.system.dim - 1);
  for (std::size_t k = 1; k < levels.system.dim; ++k) {
    lines.push_back(make_line(levels, n_g, k));
  }
  return lines;
}

std::vector<TransitionLine> transitions_at(const ModelConfig& config, double n_g, int max_states) {
  const std::size_t dim = config.dimension();
  if (max_states < 1 || static_cast<std::size_t>(max_states) >= dim) {
    throw std::invalid_argument("transitions_at: max_states must be in [1, " +
                                std::to_string(dim - 1) + "], got " + std::to_string(max_states));
  }
  const LevelStructure levels = solve_levels(config, n_g);
  std::vector<TransitionLine> lines;
  lines.reserve(static_cast<std::size_t>(max_states));
  for (std::size_t k = 1; k <= static_cast<std::size_t>(max_states); ++k) {
    lines.push_back(make_line(levels, n_g, k));
  }
  return lines;
}

std::vector<TransitionLine> bright_lines(std::span<const TransitionLine> lines,
                                         double relative_floor) {
  double peak = 0.0;
  for (const auto& line : lines) {
    peak = std::max(peak, line.visibility);
  }
  std::vector<TransitionLine> bright;
  if (!(peak > 0.0)) {
    return bright;
  }
  for (const auto& line : lines) {
    if (line.visibility >= relative_floor * peak) {
      bright.push_back(line);
    }
  }
  return bright;
}

SpectrumTable spectrum(const ModelConfig& config, std::span<const double> n_g_grid, int max_states) {
  for (std::size_t i = 0; i < n_g_grid.size(); ++i) {
    const double n_g = n_g_grid[i];
    if (!(n_g >= 0.0 && n_g <= 2.0)) {
      throw std::invalid_argument("spectrum: grid value " + std::to_string(n_g) +
                                  " outside [0, 2]");
    }
    if (i > 0 && !(n_g > n_g_grid[i - 1])) {
      throw std::invalid_argument("spectrum: grid must be strictly ascending");
    }
  }
  SpectrumTable table;
  table.grid.assign(n_g_grid.begin(), n_g_grid.end());
  table.lines.reserve(n_g_grid.size() * static_cast<std::size_t>(std::max(max_states, 0)));
  for (double n_g : n_g_grid) {
    auto lines = transitions_at(config, n_g, max_states);
    table.lines.insert(table.lines.end(), std::make_move_iterator(lines.begin()),
                       std::make_move_iterator(lines.end()));
  }
  return table;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(start < stop)) {
    throw std::invalid_argument("make_grid: need step > 0 and start < stop");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = start + static_cast<double>(i) * step;
  }
  return grid;
}

double dispersive_shift(const ResonatorParams& res, double qubit_freq) {
  const double detuning = qubit_freq - res.omega_r;
  if (detuning == 0.0) {
    throw DomainError("dispersive shift undefined at zero qubit-resonator detuning");
  }
  return res.g * res.g / detuning;
}

double chi_eff_multilevel(const ModelConfig& config, const ResonatorParams& res, double n_g,
                          int state_index) {
  const LevelStructure levels = solve_levels(config, n_g);
  if (state_index < 0 || static_cast<std::size_t>(state_index) >= levels.system.dim) {
    throw std::invalid_argument("chi_eff_multilevel: state index out of range");
  }

  ModelConfig bare = config;
  bare.tls.clear();
  const LevelStructure reference = solve_levels(bare, 1.0);
  const double q10 = reference.charge_element(1, 0);
  const double norm = q10 * q10;
  if (!(norm > 0.0)) {
    throw DomainError("bare charge matrix element vanishes; cannot normalise chi_eff");
  }

  const auto j = static_cast<std::size_t>(state_index);
  const double g2 = res.g * res.g;
  const double wr2 = res.omega_r * res.omega_r;
  double chi = 0.0;
  for (std::size_t k = 0; k < levels.system.dim; ++k) {
    if (k == j) {
      continue;
    }
    const double omega_kj = levels.system.values[k] - levels.system.values[j];
    if (std::abs(std::abs(omega_kj) - res.omega_r) < kResonanceGuard) {
      std::ostringstream msg;
      msg << "chi_eff: transition (" << j << ", " << k << ") at " << omega_kj
          << " GHz is resonant with the resonator";
      throw DomainError(msg.str());
    }
    const double q = levels.charge_element(k, j);
    chi += g2 * (q * q / norm) * 2.0 * omega_kj / (omega_kj * omega_kj - wr2);
  }
  return chi;
}

}  // namespace cpbtls
