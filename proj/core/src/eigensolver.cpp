#include "cpbtls/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

constexpr double kSignTolerance = 1e-12;
constexpr double kNegligibleFactor = 100.0;
constexpr int kNegligibleAfterSweeps = 3;

struct Norms {
  double off = 0.0;
  double diag = 0.0;
};

Norms frobenius_norms(const std::vector<double>& a, std::size_t n) {
  Norms norms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = a[i * n + j];
      if (i == j) {
        norms.diag += x * x;
      } else {
        norms.off += x * x;
      }
    }
  }
  norms.off = std::sqrt(norms.off);
  norms.diag = std::sqrt(norms.diag);
  return norms;
}

bool converged(const Norms& norms) {
  return norms.off == 0.0 || norms.off < kJacobiRelativeTolerance * norms.diag;
}

// Annihilates a(p, q) with the rotation J = [[c, s], [-s, c]] acting on rows and
// columns p, q. vt holds the eigenvectors as rows, so the accumulation touches
// two contiguous rows.
void rotate(std::vector<double>& a, std::vector<double>& vt, std::size_t n, std::size_t p,
            std::size_t q) {
  const double apq = a[p * n + q];
  const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
  // 1/(2 tau) is the limit once tau^2 would swamp the 1.
  const double t = std::abs(tau) > 1e150
                       ? 0.5 / tau
                       : std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a[k * n + p];
    const double akq = a[k * n + q];
    a[k * n + p] = c * akp - s * akq;
    a[k * n + q] = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a[p * n + k];
    const double aqk = a[q * n + k];
    a[p * n + k] = c * apk - s * aqk;
    a[q * n + k] = s * apk + c * aqk;
  }
  a[p * n + q] = 0.0;
  a[q * n + p] = 0.0;

  double* vp = &vt[p * n];
  double* vq = &vt[q * n];
  for (std::size_t k = 0; k < n; ++k) {
    const double x = vp[k];
    const double y = vq[k];
    vp[k] = c * x - s * y;
    vq[k] = s * x + c * y;
  }
}

}  // namespace

EigenSystem eigendecompose(const SymMatrix& matrix) {
  const std::size_t n = matrix.dim();
  if (n > kMaxEigenDim) {
    throw std::invalid_argument("eigendecompose: dimension " + std::to_string(n) +
                                " exceeds " + std::to_string(kMaxEigenDim));
  }

  std::vector<double> a(matrix.entries().begin(), matrix.entries().end());
  std::vector<double> vt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    vt[i * n + i] = 1.0;
  }

  int sweeps = 0;
  Norms norms = frobenius_norms(a, n);
  while (!converged(norms)) {
    if (sweeps == kMaxJacobiSweeps) {
      throw EigenSolverError("Jacobi iteration did not converge after " +
                                 std::to_string(kMaxJacobiSweeps) +
                                 " sweeps; off-diagonal norm " + std::to_string(norms.off),
                             norms.off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) {
          continue;
        }
        // Past the first sweeps, an element below the rounding of both
        // diagonal entries cannot move the eigenvalues; drop it instead of rotating.
        const double scaled = kNegligibleFactor * std::abs(apq);
        if (sweeps >= kNegligibleAfterSweeps &&
            std::abs(a[p * n + p]) + scaled == std::abs(a[p * n + p]) &&
            std::abs(a[q * n + q]) + scaled == std::abs(a[q * n + q])) {
          a[p * n + q] = 0.0;
          a[q * n + p] = 0.0;
          continue;
        }
        rotate(a, vt, n, p, q);
      }
    }
    ++sweeps;
    norms = frobenius_norms(a, n);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

  EigenSystem system;
  system.dim = n;
  system.sweeps = sweeps;
  system.values.resize(n);
  system.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    system.values[k] = a[src * n + src];
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = vt[src * n + i];
      if (std::abs(x) > kSignTolerance) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      system.vectors[k * n + i] = sign * vt[src * n + i];
    }
  }
  return system;
}

double residual_norm(const EigenSystem& system, const SymMatrix& matrix) {
  const std::size_t n = matrix.dim();
  if (system.dim != n) {
    throw std::invalid_argument("residual_norm: dimension mismatch");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto vk = system.vector(k);
    const double lambda = system.values[k];
    double max_entry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hv = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        hv += matrix(i, j) * vk[j];
      }
      max_entry = std::max(max_entry, std::abs(hv - lambda * vk[i]));
    }
    worst = std::max(worst, max_entry / (1.0 + std::abs(lambda)));
  }
  return worst;
}

double orthonormality_defect(const EigenSystem& system) {
  const std::size_t n = system.dim;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const auto vk = system.vector(k);
      const auto vl = system.vector(l);
      const double dot = std::inner_product(vk.begin(), vk.end(), vl.begin(), 0.0);
      worst = std::max(worst, std::abs(dot - (k == l ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace cpbtls
