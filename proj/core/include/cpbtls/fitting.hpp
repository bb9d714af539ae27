#pragma once

// Least-squares fitting of the CPB + TLS model to spectral ridge points taken
// at one or more flux biases. TLS parameters and E_c are shared by every
// dataset; E_J and each Delta E_J are fitted per dataset.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpbtls/hamiltonian.hpp"
#include "cpbtls/nelder_mead.hpp"
#include "cpbtls/spectra.hpp"

namespace cpbtls {

inline constexpr double kMissingBranchPenalty = 1e4;  // GHz^2
inline constexpr std::size_t kMinDatasetPoints = 8;

enum class AssignmentPolicy {
  nearest_branch,  // nearest bright line in frequency, hints ignored
  hinted,          // branch_hint-th bright line (ascending); nearest when no hint
};

struct RidgePoint {
  double n_g = 0.0;
  double freq = 0.0;
  double weight = 1.0;
  std::optional<int> branch_hint;
};

struct RidgeDataset {
  std::string label;  // flux label
  std::vector<RidgePoint> points;
};

enum class ParameterKind { e_c, e_r, e_int, t_lr, t_12, e_j, delta_e_j };

struct FitParameter {
  std::string label;
  ParameterKind kind;
  int tls = -1;      // 0-based TLS index for per-TLS kinds
  int dataset = -1;  // dataset index for per-dataset kinds
  double lower = 0.0;
  double upper = 0.0;
};

std::string_view kind_name(ParameterKind kind);
std::optional<ParameterKind> parse_kind(std::string_view name);

// Parameter vector layout:
//   e_c, then per TLS i: tls<i>.e_r, tls<i>.e_int, tls<i>.t_lr, then t12 (two TLS's),
//   then per dataset d: <label>.e_j, <label>.tls<i>.delta_e_j.
class FitProblem {
 public:
  FitProblem(std::vector<RidgeDataset> datasets, int tls_count, int n_charge_states = 4,
             AssignmentPolicy policy = AssignmentPolicy::nearest_branch);

  const std::vector<RidgeDataset>& datasets() const noexcept { return datasets_; }
  const std::vector<FitParameter>& parameters() const noexcept { return parameters_; }
  std::size_t size() const noexcept { return parameters_.size(); }
  int tls_count() const noexcept { return tls_count_; }
  int n_charge_states() const noexcept { return n_charge_states_; }
  AssignmentPolicy policy() const noexcept { return policy_; }

  // Equal bounds pin a parameter.
  void set_bounds(ParameterKind kind, double lower, double upper);
  void set_bounds(std::size_t index, double lower, double upper);
  std::optional<std::size_t> index_of(std::string_view label) const;

  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;
  bool within_bounds(std::span<const double> params) const;
  std::vector<double> clip(std::span<const double> params) const;

  // Model for one dataset; E_J enters as e_j_max at zero flux.
  ModelConfig model_for(std::span<const double> params, std::size_t dataset) const;
  // Same guess for every dataset.
  std::vector<double> pack(const ModelConfig& guess) const;

 private:
  std::vector<RidgeDataset> datasets_;
  int tls_count_;
  int n_charge_states_;
  AssignmentPolicy policy_;
  std::vector<FitParameter> parameters_;
};

struct PointResidual {
  std::size_t dataset = 0;
  std::size_t point = 0;
  double model_freq = 0.0;  // NaN when flagged
  double residual = 0.0;    // data - model
  double contribution = 0.0;
  bool flagged = false;     // no bright line could be assigned
};

struct ObjectiveBreakdown {
  double total = 0.0;
  std::vector<PointResidual> points;
  std::size_t flagged = 0;
};

// Sum of weight * (freq - assigned line)^2 over every ridge point, assigning
// only lines above the relative visibility floor. Unassignable points add
// weight * kMissingBranchPenalty.
ObjectiveBreakdown evaluate_objective(const FitProblem& problem, std::span<const double> params);
double objective(const FitProblem& problem, std::span<const double> params);

struct FitResult {
  std::vector<std::string> labels;
  std::vector<double> parameters;
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<PointResidual> residuals;
};

FitResult fit(const FitProblem& problem, std::span<const double> initial,
              const NelderMeadOptions& options = {});

struct ParameterSpread {
  std::string label;
  double min = 0.0;
  double max = 0.0;
  double relative = 0.0;  // (max - min) / |best value|
};

struct MultistartResult {
  FitResult best;
  std::size_t best_seed = 0;
  std::vector<double> objectives;  // per start, in start order
  std::size_t near_best = 0;       // starts within 2x the best objective
  std::vector<ParameterSpread> spread;
};

// Uniform starts inside the bounds, reproducible from rng_seed.
std::vector<std::vector<double>> sample_starts(const FitProblem& problem, std::size_t count,
                                               std::uint64_t rng_seed);

// Fits from each sampled start (up to `threads` at once) and keeps the lowest
// objective, ties broken by start index.
MultistartResult multistart(const FitProblem& problem, std::size_t seed_count,
                            std::uint64_t rng_seed, const NelderMeadOptions& options = {},
                            unsigned threads = 1);

struct SyntheticRidgeOptions {
  double noise_sigma = 0.0;  // GHz, additive Gaussian on frequency
  std::uint64_t seed = 0;
  double relative_floor = kBrightFloor;
  // Keep only the lowest max_lines bright lines per grid point; 0 keeps all.
  std::size_t max_lines = 0;
};

// Ridge points for every bright line at each grid point, hinted by bright rank.
RidgeDataset synthesize_ridge(const ModelConfig& config, std::span<const double> grid,
                              std::string label, const SyntheticRidgeOptions& options = {});

}  // namespace cpbtls
