#pragma once

// Cyclic Jacobi eigendecomposition for the small dense symmetric matrices the
// Hamiltonian builders produce (dimension <= 64).

#include <cstddef>
#include <span>
#include <vector>

#include "cpbtls/hamiltonian.hpp"

namespace cpbtls {

inline constexpr std::size_t kMaxEigenDim = 64;
inline constexpr int kMaxJacobiSweeps = 100;
inline constexpr double kJacobiRelativeTolerance = 1e-12;

struct EigenSystem {
  std::size_t dim = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major: component i of vector k at [k * dim + i]
  int sweeps = 0;

  std::span<const double> vector(std::size_t k) const {
    return std::span<const double>(vectors).subspan(k * dim, dim);
  }
};

// Sweeps over (p, q) pairs in row-major order until the off-diagonal Frobenius
// norm drops below 1e-12 times the diagonal norm. Eigenvectors are sign
// normalised so their first component with magnitude above 1e-12 is positive.
// Throws EigenSolverError after 100 sweeps without convergence.
EigenSystem eigendecompose(const SymMatrix& matrix);

// max_k max_i |H v_k - lambda_k v_k|_i / (1 + |lambda_k|)
double residual_norm(const EigenSystem& system, const SymMatrix& matrix);

// max |V^T V - I| entry
double orthonormality_defect(const EigenSystem& system);

}  // namespace cpbtls
