#include "cpbtls/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

bool in_right_well(std::size_t block, int tls_index) { return ((block >> tls_index) & 1U) != 0; }

// Shared builder for 2^T TLS blocks. Flipping TLS i couples block b to b ^ (1 << i);
// flipping both (T = 2) couples b to b ^ 3 through T_12.
SymMatrix build_coupled(const ModelConfig& config, double n_g) {
  const auto m = static_cast<std::size_t>(config.cpb.n_charge_states);
  const std::size_t blocks = std::size_t{1} << config.tls.size();
  SymMatrix h(m * blocks);

  for (std::size_t b = 0; b < blocks; ++b) {
    double e_int_sum = 0.0;
    double e_offset = 0.0;
    for (int i = 0; i < config.tls_count(); ++i) {
      if (in_right_well(b, i)) {
        e_int_sum += config.tls[i].e_int;
        e_offset += config.tls[i].e_r;
      }
    }
    if (config.tls_count() == 2 && b == 3) {
      e_offset += config.tls[0].e_int * config.tls[1].e_int / (2.0 * config.cpb.e_c);
    }
    const SymMatrix block =
        build_cpb_block(config.cpb, n_g, block_josephson_energy(config, b), e_int_sum, e_offset);
    const std::size_t base = b * m;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        h.set(base + i, base + j, block(i, j));
      }
    }
  }

  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t c = b + 1; c < blocks; ++c) {
      const std::size_t flipped = b ^ c;
      double t = 0.0;
      if (flipped == 1) {
        t = config.tls[0].t_lr;
      } else if (flipped == 2) {
        t = config.tls[1].t_lr;
      } else {
        t = config.t_12;
      }
      for (std::size_t i = 0; i < m; ++i) {
        h.set(b * m + i, c * m + i, t);
      }
    }
  }
  return h;
}

}  // namespace

std::size_t ModelConfig::dimension() const noexcept {
  return static_cast<std::size_t>(cpb.n_charge_states) << tls.size();
}

double ModelConfig::e_j() const noexcept { return ej_from_flux(cpb.e_j_max, flux_ratio); }

double ej_from_flux(double e_j_max, double flux_ratio) {
  return e_j_max * std::cos(std::numbers::pi * flux_ratio);
}

std::vector<int> charge_states(const CpbParams& cpb) {
  const int m = cpb.n_charge_states;
  const int lowest = 1 - (m + 1) / 2 + cpb.window_shift;
  std::vector<int> states(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    states[static_cast<std::size_t>(i)] = lowest + i;
  }
  return states;
}

SymMatrix build_cpb_block(const CpbParams& cpb, double n_g, double e_j_eff, double e_int_sum,
                          double e_offset) {
  const std::vector<int> states = charge_states(cpb);
  SymMatrix h(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double q = 2.0 * states[i] - n_g;
    h.set(i, i, cpb.e_c * q * q + e_int_sum * q + e_offset);
    if (i + 1 < states.size()) {
      h.set(i, i + 1, -e_j_eff / 2.0);
    }
  }
  return h;
}

double block_josephson_energy(const ModelConfig& config, std::size_t block) {
  double e_j = config.e_j();
  for (int i = 0; i < config.tls_count(); ++i) {
    const double half = config.tls[i].delta_e_j / 2.0;
    e_j += in_right_well(block, i) ? -half : half;
  }
  return e_j;
}

SymMatrix build_single_tls(const ModelConfig& config, double n_g) {
  if (config.tls_count() != 1) {
    throw ModelError("build_single_tls: expected exactly one TLS, got " +
                     std::to_string(config.tls_count()));
  }
  return build_coupled(config, n_g);
}

SymMatrix build_two_tls(const ModelConfig& config, double n_g) {
  if (config.tls_count() != 2) {
    throw ModelError("build_two_tls: expected exactly two TLS's, got " +
                     std::to_string(config.tls_count()));
  }
  return build_coupled(config, n_g);
}

SymMatrix build_hamiltonian(const ModelConfig& config, double n_g) {
  switch (config.tls_count()) {
    case 0:
      return build_cpb_block(config.cpb, n_g, config.e_j(), 0.0, 0.0);
    case 1:
      return build_single_tls(config, n_g);
    case 2:
      return build_two_tls(config, n_g);
    default:
      throw ModelError("at most two TLS's are supported, got " + std::to_string(config.tls_count()));
  }
}

void validate(const ModelConfig& config) {
  const auto& cpb = config.cpb;
  if (!(cpb.e_c > 0.0) || !std::isfinite(cpb.e_c)) {
    throw ModelError("charging energy must be positive and finite");
  }
  if (!(cpb.e_j_max > 0.0) || !std::isfinite(cpb.e_j_max)) {
    throw ModelError("maximum Josephson energy must be positive and finite");
  }
  if (cpb.n_charge_states < kMinChargeStates || cpb.n_charge_states > kMaxChargeStates) {
    throw ModelError("number of charge states must be in [2, 8], got " +
                     std::to_string(cpb.n_charge_states));
  }
  if (config.tls_count() > kMaxTls) {
    throw ModelError("at most two TLS's are supported, got " + std::to_string(config.tls_count()));
  }
  if (!std::isfinite(config.flux_ratio)) {
    throw ModelError("flux ratio must be finite");
  }
  for (int i = 0; i < config.tls_count(); ++i) {
    const TlsParams& t = config.tls[i];
    if (!std::isfinite(t.e_r) || !std::isfinite(t.t_lr) || !std::isfinite(t.e_int) ||
        !std::isfinite(t.delta_e_j)) {
      throw ModelError("TLS " + std::to_string(i + 1) + " has a non-finite parameter");
    }
    if (t.t_lr < 0.0) {
      throw ModelError("TLS " + std::to_string(i + 1) + " tunneling T_LR must be >= 0");
    }
  }
  if (!std::isfinite(config.t_12)) {
    throw ModelError("T_12 must be finite");
  }
}

std::vector<std::string> model_warnings(const ModelConfig& config) {
  std::vector<std::string> warnings;
  const std::size_t blocks = std::size_t{1} << config.tls.size();
  for (std::size_t b = 0; b < blocks; ++b) {
    const double e_j = block_josephson_energy(config, b);
    if (!(e_j > 0.0)) {
      std::ostringstream msg;
      msg << "effective Josephson energy " << e_j << " GHz is not positive in TLS block " << b
          << "; eigenvalues use |E_J|";
      warnings.push_back(msg.str());
    }
  }
  return warnings;
}

}  // namespace cpbtls
