#include "cpbtls/fitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "cpbtls/errors.hpp"

namespace cpbtls {

namespace {

struct DefaultBounds {
  ParameterKind kind;
  double lower;
  double upper;
};

constexpr DefaultBounds kDefaultBounds[] = {
    {ParameterKind::e_c, 1.0, 10.0},       {ParameterKind::e_r, -3.0, 3.0},
    {ParameterKind::e_int, -2.0, 2.0},     {ParameterKind::t_lr, 0.0, 0.2},
    {ParameterKind::t_12, 0.0, 0.2},       {ParameterKind::e_j, 0.5, 15.0},
    {ParameterKind::delta_e_j, -5.0, 5.0},
};

DefaultBounds default_bounds(ParameterKind kind) {
  for (const auto& b : kDefaultBounds) {
    if (b.kind == kind) {
      return b;
    }
  }
  return {kind, 0.0, 0.0};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on the portable uniform stream.
double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) {
    u1 = uniform01(rng);
  }
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string tls_prefix(int i) { return "tls" + std::to_string(i + 1); }

}  // namespace

std::string_view kind_name(ParameterKind kind) {
  switch (kind) {
    case ParameterKind::e_c: return "e_c";
    case ParameterKind::e_r: return "e_r";
    case ParameterKind::e_int: return "e_int";
    case ParameterKind::t_lr: return "t_lr";
    case ParameterKind::t_12: return "t12";
    case ParameterKind::e_j: return "e_j";
    case ParameterKind::delta_e_j: return "delta_e_j";
  }
  return "?";
}

std::optional<ParameterKind> parse_kind(std::string_view name) {
  for (const auto& b : kDefaultBounds) {
    if (kind_name(b.kind) == name) {
      return b.kind;
    }
  }
  return std::nullopt;
}

FitProblem::FitProblem(std::vector<RidgeDataset> datasets, int tls_count, int n_charge_states,
                       AssignmentPolicy policy)
    : datasets_(std::move(datasets)),
      tls_count_(tls_count),
      n_charge_states_(n_charge_states),
      policy_(policy) {
  if (tls_count_ < 0 || tls_count_ > kMaxTls) {
    throw FitError("fit model must have 0, 1 or 2 TLS's");
  }
  if (n_charge_states_ < kMinChargeStates || n_charge_states_ > kMaxChargeStates) {
    throw FitError("fit model charge-state count must be in [2, 8]");
  }
  const bool has_enough = std::any_of(datasets_.begin(), datasets_.end(), [](const auto& d) {
    return d.points.size() >= kMinDatasetPoints;
  });
  if (!has_enough) {
    throw FitError("fit needs at least one dataset with 8 or more ridge points");
  }

  auto add = [&](std::string label, ParameterKind kind, int tls, int dataset) {
    const DefaultBounds b = default_bounds(kind);
    parameters_.push_back({std::move(label), kind, tls, dataset, b.lower, b.upper});
  };
  add("e_c", ParameterKind::e_c, -1, -1);
  for (int i = 0; i < tls_count_; ++i) {
    add(tls_prefix(i) + ".e_r", ParameterKind::e_r, i, -1);
    add(tls_prefix(i) + ".e_int", ParameterKind::e_int, i, -1);
    add(tls_prefix(i) + ".t_lr", ParameterKind::t_lr, i, -1);
  }
  if (tls_count_ == 2) {
    add("t12", ParameterKind::t_12, -1, -1);
  }
  for (std::size_t d = 0; d < datasets_.size(); ++d) {
    const std::string& label = datasets_[d].label;
    add(label + ".e_j", ParameterKind::e_j, -1, static_cast<int>(d));
    for (int i = 0; i < tls_count_; ++i) {
      add(label + "." + tls_prefix(i) + ".delta_e_j", ParameterKind::delta_e_j, i,
          static_cast<int>(d));
    }
  }
}

void FitProblem::set_bounds(ParameterKind kind, double lower, double upper) {
  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    if (parameters_[i].kind == kind) {
      set_bounds(i, lower, upper);
    }
  }
}

void FitProblem::set_bounds(std::size_t index, double lower, double upper) {
  if (index >= parameters_.size()) {
    throw FitError("parameter index out of range");
  }
  if (!(lower <= upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw FitError("bounds for " + parameters_[index].label + " need finite lower <= upper");
  }
  if (parameters_[index].kind == ParameterKind::t_lr && lower < 0.0) {
    throw FitError("tunneling bounds must be non-negative");
  }
  parameters_[index].lower = lower;
  parameters_[index].upper = upper;
}

std::optional<std::size_t> FitProblem::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    if (parameters_[i].label == label) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<double> FitProblem::lower_bounds() const {
  std::vector<double> out;
  out.reserve(parameters_.size());
  for (const auto& p : parameters_) out.push_back(p.lower);
  return out;
}

std::vector<double> FitProblem::upper_bounds() const {
  std::vector<double> out;
  out.reserve(parameters_.size());
  for (const auto& p : parameters_) out.push_back(p.upper);
  return out;
}

bool FitProblem::within_bounds(std::span<const double> params) const {
  if (params.size() != parameters_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] >= parameters_[i].lower && params[i] <= parameters_[i].upper)) {
      return false;
    }
  }
  return true;
}

std::vector<double> FitProblem::clip(std::span<const double> params) const {
  std::vector<double> out(params.begin(), params.end());
  for (std::size_t i = 0; i < out.size() && i < parameters_.size(); ++i) {
    out[i] = std::clamp(out[i], parameters_[i].lower, parameters_[i].upper);
  }
  return out;
}

ModelConfig FitProblem::model_for(std::span<const double> params, std::size_t dataset) const {
  if (params.size() != parameters_.size()) {
    throw FitError("parameter vector has " + std::to_string(params.size()) + " entries, expected " +
                   std::to_string(parameters_.size()));
  }
  ModelConfig config;
  config.cpb.n_charge_states = n_charge_states_;
  config.flux_ratio = 0.0;
  config.tls.resize(static_cast<std::size_t>(tls_count_));
  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    const FitParameter& p = parameters_[i];
    if (p.dataset >= 0 && static_cast<std::size_t>(p.dataset) != dataset) {
      continue;
    }
    const double v = params[i];
    switch (p.kind) {
      case ParameterKind::e_c: config.cpb.e_c = v; break;
      case ParameterKind::e_r: config.tls[p.tls].e_r = v; break;
      case ParameterKind::e_int: config.tls[p.tls].e_int = v; break;
      case ParameterKind::t_lr: config.tls[p.tls].t_lr = v; break;
      case ParameterKind::t_12: config.t_12 = v; break;
      case ParameterKind::e_j: config.cpb.e_j_max = v; break;
      case ParameterKind::delta_e_j: config.tls[p.tls].delta_e_j = v; break;
    }
  }
  return config;
}

std::vector<double> FitProblem::pack(const ModelConfig& guess) const {
  if (guess.tls_count() != tls_count_) {
    throw FitError("initial guess has the wrong number of TLS's");
  }
  std::vector<double> params(parameters_.size());
  for (std::size_t i = 0; i < parameters_.size(); ++i) {
    const FitParameter& p = parameters_[i];
    switch (p.kind) {
      case ParameterKind::e_c: params[i] = guess.cpb.e_c; break;
      case ParameterKind::e_r: params[i] = guess.tls[p.tls].e_r; break;
      case ParameterKind::e_int: params[i] = guess.tls[p.tls].e_int; break;
      case ParameterKind::t_lr: params[i] = guess.tls[p.tls].t_lr; break;
      case ParameterKind::t_12: params[i] = guess.t_12; break;
      case ParameterKind::e_j: params[i] = guess.e_j(); break;
      case ParameterKind::delta_e_j: params[i] = guess.tls[p.tls].delta_e_j; break;
    }
  }
  return params;
}

ObjectiveBreakdown evaluate_objective(const FitProblem& problem, std::span<const double> params) {
  if (!problem.within_bounds(params)) {
    throw FitError("objective evaluated outside the parameter bounds");
  }
  ObjectiveBreakdown out;
  const auto& datasets = problem.datasets();
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const ModelConfig model = problem.model_for(params, d);
    const auto& points = datasets[d].points;

    // Diagonalize once per distinct gate charge.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].n_g < points[b].n_g; });

    std::vector<TransitionLine> bright;
    double current_n_g = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t idx : order) {
      const RidgePoint& pt = points[idx];
      if (!(pt.n_g == current_n_g)) {
        current_n_g = pt.n_g;
        bright = bright_lines(all_transitions_at(model, pt.n_g));
      }

      PointResidual r;
      r.dataset = d;
      r.point = idx;
      const TransitionLine* assigned = nullptr;
      if (problem.policy() == AssignmentPolicy::hinted && pt.branch_hint) {
        const int hint = *pt.branch_hint;
        if (hint >= 0 && static_cast<std::size_t>(hint) < bright.size()) {
          assigned = &bright[static_cast<std::size_t>(hint)];
        }
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& line : bright) {
          const double gap = std::abs(pt.freq - line.freq);
          if (gap < best) {
            best = gap;
            assigned = &line;
          }
        }
      }

      if (assigned == nullptr) {
        r.flagged = true;
        r.model_freq = std::numeric_limits<double>::quiet_NaN();
        r.residual = std::numeric_limits<double>::quiet_NaN();
        r.contribution = pt.weight * kMissingBranchPenalty;
        ++out.flagged;
      } else {
        r.model_freq = assigned->freq;
        r.residual = pt.freq - assigned->freq;
        r.contribution = pt.weight * r.residual * r.residual;
      }
      out.points.push_back(r);
    }
  }

  // Report points in file order; sum in that order as well.
  std::stable_sort(out.points.begin(), out.points.end(), [](const auto& a, const auto& b) {
    return a.dataset != b.dataset ? a.dataset < b.dataset : a.point < b.point;
  });
  for (const auto& r : out.points) {
    out.total += r.contribution;
  }
  return out;
}

double objective(const FitProblem& problem, std::span<const double> params) {
  return evaluate_objective(problem, params).total;
}

FitResult fit(const FitProblem& problem, std::span<const double> initial,
              const NelderMeadOptions& options) {
  if (!problem.within_bounds(initial)) {
    throw FitError("initial parameters are outside the bounds");
  }

  // Pinned parameters (lower == upper) are kept out of the simplex.
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (problem.parameters()[i].upper > problem.parameters()[i].lower) {
      free.push_back(i);
    }
  }
  std::vector<double> full(initial.begin(), initial.end());
  std::vector<double> x0, lower, upper;
  for (std::size_t i : free) {
    x0.push_back(full[i]);
    lower.push_back(problem.parameters()[i].lower);
    upper.push_back(problem.parameters()[i].upper);
  }

  auto reduced_objective = [&](std::span<const double> x) {
    std::vector<double> p = full;
    for (std::size_t j = 0; j < free.size(); ++j) {
      p[free[j]] = x[j];
    }
    return objective(problem, p);
  };
  const NelderMeadResult nm = minimize_nelder_mead(reduced_objective, x0, lower, upper, options);

  for (std::size_t j = 0; j < free.size(); ++j) {
    full[free[j]] = nm.x[j];
  }
  FitResult result;
  for (const auto& p : problem.parameters()) {
    result.labels.push_back(p.label);
  }
  result.parameters = problem.clip(full);
  ObjectiveBreakdown breakdown = evaluate_objective(problem, result.parameters);
  result.objective = breakdown.total;
  result.residuals = std::move(breakdown.points);
  result.iterations = nm.iterations;
  result.evaluations = nm.evaluations;
  result.converged = nm.converged;
  return result;
}

std::vector<std::vector<double>> sample_starts(const FitProblem& problem, std::size_t count,
                                               std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::vector<std::vector<double>> starts(count, std::vector<double>(problem.size()));
  for (auto& start : starts) {
    for (std::size_t i = 0; i < problem.size(); ++i) {
      const FitParameter& p = problem.parameters()[i];
      start[i] = p.lower + uniform01(rng) * (p.upper - p.lower);
      start[i] = std::clamp(start[i], p.lower, p.upper);
    }
  }
  return starts;
}

MultistartResult multistart(const FitProblem& problem, std::size_t seed_count,
                            std::uint64_t rng_seed, const NelderMeadOptions& options,
                            unsigned threads) {
  if (seed_count < 1) {
    throw FitError("multistart needs at least one start");
  }
  const auto starts = sample_starts(problem, seed_count, rng_seed);
  std::vector<FitResult> runs(seed_count);
  std::vector<std::exception_ptr> errors(seed_count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < seed_count; s = next++) {
      try {
        runs[s] = fit(problem, starts[s], options);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  const unsigned pool = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(seed_count)));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < pool; ++t) {
      workers.emplace_back(worker);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  MultistartResult out;
  out.objectives.reserve(seed_count);
  for (std::size_t s = 0; s < seed_count; ++s) {
    out.objectives.push_back(runs[s].objective);
    if (runs[s].objective < runs[out.best_seed].objective) {
      out.best_seed = s;
    }
  }
  out.best = runs[out.best_seed];

  const double cutoff = 2.0 * out.best.objective;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    ParameterSpread spread;
    spread.label = problem.parameters()[i].label;
    spread.min = std::numeric_limits<double>::infinity();
    spread.max = -std::numeric_limits<double>::infinity();
    for (const auto& run : runs) {
      if (run.objective <= cutoff) {
        spread.min = std::min(spread.min, run.parameters[i]);
        spread.max = std::max(spread.max, run.parameters[i]);
      }
    }
    const double scale = std::abs(out.best.parameters[i]);
    spread.relative = scale > 0.0 ? (spread.max - spread.min) / scale : 0.0;
    out.spread.push_back(spread);
  }
  out.near_best = static_cast<std::size_t>(std::count_if(
      runs.begin(), runs.end(), [&](const FitResult& r) { return r.objective <= cutoff; }));
  return out;
}

RidgeDataset synthesize_ridge(const ModelConfig& config, std::span<const double> grid,
                              std::string label, const SyntheticRidgeOptions& options) {
  std::mt19937_64 rng(options.seed);
  RidgeDataset dataset;
  dataset.label = std::move(label);
  for (double n_g : grid) {
    const auto bright = bright_lines(all_transitions_at(config, n_g), options.relative_floor);
    const std::size_t kept =
        options.max_lines == 0 ? bright.size() : std::min(bright.size(), options.max_lines);
    for (std::size_t rank = 0; rank < kept; ++rank) {
      RidgePoint pt;
      pt.n_g = n_g;
      pt.freq = bright[rank].freq;
      if (options.noise_sigma > 0.0) {
        pt.freq += options.noise_sigma * standard_normal(rng);
      }
      pt.branch_hint = static_cast<int>(rank);
      dataset.points.push_back(pt);
    }
  }
  return dataset;
}

}  // namespace cpbtls
