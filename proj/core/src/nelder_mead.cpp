#include "cpbtls/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cpbtls {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult minimize_nelder_mead(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0, std::span<const double> lower,
                                      std::span<const double> upper,
                                      const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("minimize_nelder_mead: bound sizes do not match x0");
  }

  NelderMeadResult result;
  std::vector<double> scratch(n);
  auto evaluate = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
      scratch[i] = std::clamp(x[i], lower[i], upper[i]);
    }
    ++result.evaluations;
    return f(scratch);
  };

  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) {
    const double step = options.step_fraction * (upper[i] - lower[i]);
    simplex[i + 1][i] += (x0[i] + step <= upper[i]) ? step : -step;
  }
  std::vector<double> values(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    values[j] = evaluate(simplex[j]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), second(n);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> sorted(n + 1);
    std::vector<double> sorted_values(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      sorted[j] = std::move(simplex[order[j]]);
      sorted_values[j] = values[order[j]];
    }
    simplex = std::move(sorted);
    values = std::move(sorted_values);
  };
  auto along = [&](std::vector<double>& out, const std::vector<double>& from, double scale) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = centroid[i] + scale * (from[i] - centroid[i]);
    }
  };

  while (true) {
    sort_simplex();
    if (values[n] - values[0] < options.f_tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations) {
      break;
    }
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        centroid[i] += simplex[j][i];
      }
    }
    for (double& c : centroid) {
      c /= static_cast<double>(n);
    }

    along(trial, simplex[n], -kReflect);
    const double reflected = evaluate(trial);
    if (reflected < values[0]) {
      along(second, simplex[n], -kReflect * kExpand);
      const double expanded = evaluate(second);
      if (expanded < reflected) {
        simplex[n] = second;
        values[n] = expanded;
      } else {
        simplex[n] = trial;
        values[n] = reflected;
      }
      continue;
    }
    if (reflected < values[n - 1]) {
      simplex[n] = trial;
      values[n] = reflected;
      continue;
    }

    const bool outside = reflected < values[n];
    if (outside) {
      along(second, trial, kContract);
    } else {
      along(second, simplex[n], kContract);
    }
    const double contracted = evaluate(second);
    if (contracted < (outside ? reflected : values[n])) {
      simplex[n] = second;
      values[n] = contracted;
      continue;
    }

    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        simplex[j][i] = simplex[0][i] + kShrink * (simplex[j][i] - simplex[0][i]);
      }
      values[j] = evaluate(simplex[j]);
    }
  }

  result.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.x[i] = std::clamp(simplex[0][i], lower[i], upper[i]);
  }
  result.f = values[0];
  return result;
}

}  // namespace cpbtls
