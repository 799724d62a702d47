#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "onebit/likelihood.hpp"
#include "onebit/observation.hpp"
#include "onebit/tensor.hpp"

namespace onebit {

struct SolverConfig {
  double r_max = 1.0;          // max-qnorm radius; per-factor row bound is r_max^(1/d)
  double alpha = 1.0;          // infinity bound, used when enforce_infinity is set
  int k_cap = 0;               // factor columns; 0 means 2 * max_j N_j
  int max_outer = 200;         // alternating sweeps
  int max_inner = 20;          // projected-gradient steps per factor visit
  double tol = 1e-6;           // relative objective decrease per sweep
  double armijo_c = 1e-4;
  double backtrack_shrink = 0.5;
  bool enforce_infinity = false;
  std::uint64_t seed = 0;
};

struct FitResult {
  CpFactorSet factors;
  std::vector<double> objective_trace;  // value before optimization, then per sweep
  double chosen_r = 0.0;
  int iterations = 0;
  bool converged = false;
  // diagnostics: worst row-norm overshoot (relative) and worst single-step
  // objective increase observed during the run
  double feasibility_gap = 0.0;
  double max_trace_increase = 0.0;
};

/// Rows with l2 norm above the bound are rescaled onto the bound; others are
/// left untouched.  Idempotent.
MatrixXd project_row_norm(const MatrixXd& v, double bound);

/// Approximate infinity-norm projection: when the expanded tensor exceeds
/// alpha in infinity norm, the designated factor is scaled by
/// alpha / ||expanded||_inf.  Returns the scale applied (1 if untouched).
double rescale_infinity(CpFactorSet& factors, double alpha, int designated_mode);

/// Max-qnorm constrained ML fit: alternating projected gradient over the CP
/// factors with backtracking line search; the objective never increases.
FitResult fit_max_qnorm(const ObservationSet& obs, const LinkFunction& link,
                        const SolverConfig& config);

struct CrossValidationResult {
  double best_r = 0.0;
  FitResult fit;                    // refit on all samples at best_r
  std::vector<double> grid;         // radii tried, in order
  std::vector<double> validation_nll;  // average per-sample validation loss
};

/// Splits samples into train/validation by a seeded draw, fits once per grid
/// radius on the train part, picks the radius with the smallest average
/// validation nll (first occurrence wins ties) and refits on all samples.
CrossValidationResult cross_validate_radius(const ObservationSet& obs,
                                            const LinkFunction& link,
                                            const SolverConfig& config,
                                            const std::vector<double>& grid,
                                            double holdout_fraction);

/// Default radius grid {alpha * 2^j : j = 0..7}.
std::vector<double> default_radius_grid(double alpha);

struct MatricizedFit {
  FitResult fit;       // factors in matrix coordinates (d = 2)
  ModeSplit split;     // bijection between tensor and matrix indices
};

/// Remaps observations through the unfolding bijection and solves the d = 2
/// (matrix max-norm) problem.
MatricizedFit fit_matricized(const ObservationSet& obs, const LinkFunction& link,
                             const SolverConfig& config,
                             const std::vector<int>& row_modes);

ObservationSet matricize_observations(const ObservationSet& obs, const ModeSplit& split);

/// As cross_validate_radius, on the matricized problem.
struct MatricizedCvResult {
  CrossValidationResult cv;
  ModeSplit split;
};
MatricizedCvResult cross_validate_matricized(const ObservationSet& obs,
                                             const LinkFunction& link,
                                             const SolverConfig& config,
                                             const std::vector<double>& grid,
                                             double holdout_fraction,
                                             const std::vector<int>& row_modes);

}  // namespace onebit
