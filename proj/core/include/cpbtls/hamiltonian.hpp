#pragma once

// Charge-basis Hamiltonians for a Cooper-pair box coupled to zero, one or two
// two-level fluctuators. All energies are frequency equivalents E/h in GHz.
//
// Basis ordering: the outermost index is the well of TLS 2 (L then R), then
// the well of TLS 1 (L then R), then the Cooper-pair number n ascending.
// Block b of size m therefore has TLS i in the right well iff bit i of b is
// set, and a single-TLS matrix is laid out as [L-block; R-block].

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpbtls {

inline constexpr int kMinChargeStates = 2;
inline constexpr int kMaxChargeStates = 8;
inline constexpr int kMaxTls = 2;

struct CpbParams {
  double e_c = 0.0;      // charging energy E_c/h
  double e_j_max = 0.0;  // zero-flux Josephson energy E_J^max/h
  int n_charge_states = 4;
  // Moves the whole charge window by this many Cooper pairs.
  int window_shift = 0;
};

struct TlsParams {
  double e_r = 0.0;  // well asymmetry; E_L is pinned to 0
  double t_lr = 0.0;
  double e_int = 0.0;
  double delta_e_j = 0.0;
};

struct ModelConfig {
  CpbParams cpb;
  double flux_ratio = 0.0;  // Phi / Phi_0
  std::vector<TlsParams> tls;
  double t_12 = 0.0;  // only used with two TLS's

  int tls_count() const noexcept { return static_cast<int>(tls.size()); }
  std::size_t dimension() const noexcept;
  // Signed effective Josephson energy at this flux bias.
  double e_j() const noexcept;
};

// Dense real symmetric matrix, row-major. set() writes both (i,j) and (j,i).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    entries_[i * dim_ + j] = value;
    entries_[j * dim_ + i] = value;
  }
  std::span<const double> entries() const noexcept { return entries_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

double ej_from_flux(double e_j_max, double flux_ratio);

// Cooper-pair numbers spanned by the charge window, ascending. For m states
// the window is {1 - ceil(m/2), ..., floor(m/2)} plus window_shift.
std::vector<int> charge_states(const CpbParams& cpb);

// m x m tridiagonal block: diagonal E_c(2n - n_g)^2 + e_int_sum (2n - n_g) + e_offset,
// -e_j_eff/2 between neighbouring charge states.
SymMatrix build_cpb_block(const CpbParams& cpb, double n_g, double e_j_eff, double e_int_sum,
                          double e_offset);

SymMatrix build_single_tls(const ModelConfig& config, double n_g);
SymMatrix build_two_tls(const ModelConfig& config, double n_g);

// Dispatches on the TLS count (bare CPB, one or two fluctuators).
SymMatrix build_hamiltonian(const ModelConfig& config, double n_g);

// Throws ModelError for hard violations (E_c <= 0, bad charge-state count,
// more than two TLS's, negative tunneling).
void validate(const ModelConfig& config);

// Soft problems: non-positive effective E_J in any well configuration.
std::vector<std::string> model_warnings(const ModelConfig& config);

// Effective Josephson energy of TLS-configuration block b.
double block_josephson_energy(const ModelConfig& config, std::size_t block);

}  // namespace cpbtls
