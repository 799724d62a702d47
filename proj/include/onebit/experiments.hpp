#pragma once

#include <string>

#include "onebit/io.hpp"
#include "onebit/metrics.hpp"
#include "onebit/solver.hpp"

namespace onebit {

enum class ExperimentKind { sigma_sweep, sample_sweep, sigma_robustness, recipe };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::sigma_sweep;
  Shape shape = Shape({20, 20, 20});
  int rank = 5;
  std::vector<int> ranks = {3, 5, 10};             // sample sweep
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5,
                                   0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> sigmas = {0.001, 0.01, 0.1, 1.0, 10.0};  // fit sigmas
  double sigma_gen = 0.15;                         // robustness generation sigma
  int repetitions = 1;
  std::uint64_t seed = 0;
  bool run_tensor = true;
  bool run_matricized = true;
  std::vector<double> cv_grid;                     // empty -> default grid
  double holdout = 0.1;
  std::vector<int> row_modes = {0};                // baseline unfolding
  SolverConfig solver;
};

/// One result row of a sweep; self-describing and keyed.
struct SweepRow {
  std::string method;
  double sigma = 0.0;
  int rank = 0;
  double fraction = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  double rse = 0.0;
  double sign_acc = 0.0;
  double final_nll = 0.0;
  double chosen_r = 0.0;
  int iterations = 0;
  double max_trace_increase = 0.0;
  double feasibility_gap = 0.0;
};

/// Rank-r CP tensor with i.i.d. uniform [-1,1] factor entries, rescaled to
/// unit infinity norm.  Degenerate all-zero draws fall through to the next
/// substream of the generator.
DenseTensor gen_synthetic(const Shape& shape, int r, std::uint64_t seed);

std::vector<SweepRow> run_sigma_sweep(const ExperimentSpec& spec);
std::vector<SweepRow> run_sample_sweep(const ExperimentSpec& spec);
std::vector<SweepRow> run_sigma_robustness(const ExperimentSpec& spec);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

struct RecipeParams {
  double eta = std::numeric_limits<double>::quiet_NaN();  // NaN: empirical train mean
  double scale_max = 5.0;   // rating magnitude used for unit-infinity rescaling
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct LevelAccuracy {
  double rating;
  int count;
  double accuracy;
};

struct RecipeResult {
  double sign_acc = 0.0;
  double mae_value = 0.0;
  std::vector<LevelAccuracy> per_level;
  int n_train = 0;
  int n_val = 0;
  int n_test = 0;
  double chosen_r = 0.0;
  double eta_used = 0.0;
  bool degenerate_labels = false;
};

/// Five-step real-data recipe: rescale to unit infinity norm, threshold the
/// training ratings at eta into signs, fit with a cross-validated radius,
/// map back to the rating scale and score on the held-out test split.
RecipeResult run_recipe(const RatingsTable& table, const RecipeParams& params,
                        const ExperimentSpec& spec);

ExperimentSpec parse_experiment_spec(const std::map<std::string, std::string>& kv);

}  // namespace onebit
