#pragma once

// Published parameter sets and small independent oracles shared by the unit
// and acceptance tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "cpbtls/hamiltonian.hpp"

namespace cpbtls::testing {

// Single-TLS fits, data sets #1..#4.
inline ModelConfig table_one(int set, int n_charge_states = 4) {
  static constexpr double e_j[] = {3.64, 4.16, 5.93, 6.33};
  static constexpr double delta_e_j[] = {1.50, 1.54, 1.84, 2.02};
  static constexpr double t_lr[] = {0.01, 0.01, 0.06, 0.06};
  const int i = set - 1;
  ModelConfig m;
  m.cpb = {4.5, e_j[i], n_charge_states, 0};
  m.tls = {TlsParams{0.62, t_lr[i], 0.35, delta_e_j[i]}};
  return m;
}

// Two-TLS fits, data sets #1..#2.
inline ModelConfig table_two(int set, int n_charge_states = 4) {
  ModelConfig m;
  m.cpb = {4.3, set == 1 ? 2.79 : 3.43, n_charge_states, 0};
  m.tls = {TlsParams{0.62, 0.0, -0.40, set == 1 ? 1.36 : 1.40},
           TlsParams{set == 1 ? -0.82 : -0.69, 0.04, set == 1 ? 0.13 : 0.15,
                     set == 1 ? -1.00 : -0.68}};
  m.t_12 = 0.04;
  return m;
}

inline ModelConfig bare_cpb(double e_c, double e_j, int n_charge_states) {
  ModelConfig m;
  m.cpb = {e_c, e_j, n_charge_states, 0};
  return m;
}

inline std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// Symmetric matrix with entries uniform in [-1, 1], reproducible across platforms.
inline SymMatrix random_symmetric(std::size_t dim, std::mt19937_64& rng) {
  SymMatrix h(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      h.set(i, j, 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
    }
  }
  return h;
}

// Determinant by Gaussian elimination with partial pivoting.
inline double lu_determinant(const SymMatrix& h) {
  const std::size_t n = h.dim();
  std::vector<double> a(h.entries().begin(), h.entries().end());
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[pivot * n + c])) pivot = r;
    }
    if (a[pivot * n + c] == 0.0) return 0.0;
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double factor = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= factor * a[c * n + k];
    }
  }
  return det;
}

// Eigenvalues of [[a, b], [b, d]] from the quadratic formula.
inline std::pair<double, double> quadratic_eigenvalues(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  return {mean - radius, mean + radius};
}

}  // namespace cpbtls::testing
