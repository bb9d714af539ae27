#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cpbtls {

struct NelderMeadOptions {
  int max_iterations = 5000;
  // Stop once max f - min f over the simplex drops below this.
  double f_tolerance = 1e-6;
  // Initial simplex edge along coordinate i, as a fraction of (upper_i - lower_i).
  double step_fraction = 0.05;
};

struct NelderMeadResult {
  std::vector<double> x;  // clipped into the bounds
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Box-constrained Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2). Vertices may leave the box; every evaluation sees the vertex
// clipped coordinate-wise into [lower, upper]. Fully deterministic.
NelderMeadResult minimize_nelder_mead(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0, std::span<const double> lower,
                                      std::span<const double> upper,
                                      const NelderMeadOptions& options = {});

}  // namespace cpbtls
