#include "onebit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace onebit {

MatrixXd project_row_norm(const MatrixXd& v, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("project_row_norm: bound must be positive");
  MatrixXd out = v;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double n = out.row(i).norm();
    while (n > bound) {
      out.row(i) *= bound / n;
      n = out.row(i).norm();
    }
  }
  return out;
}

double rescale_infinity(CpFactorSet& factors, double alpha, int designated_mode) {
  const double inf = infinity_norm(cp_expand(factors));
  if (inf <= alpha || inf == 0.0) return 1.0;
  const double scale = alpha / inf;
  factors.factor(designated_mode) *= scale;
  return scale;
}

namespace {

struct SampleCache {
  Eigen::MatrixXd partner;  // m x k, product over modes != j
  Eigen::VectorXd x;        // m, current entry values

  void build(const CpFactorSet& factors, const ObservationSet& obs, int mode) {
    const int d = factors.order();
    const int k = factors.rank();
    const std::int64_t m = obs.count();
    partner.resize(m, k);
    partner.setOnes();
    for (int j = 0; j < d; ++j) {
      if (j == mode) continue;
      const MatrixXd& f = factors.factor(j);
      for (std::int64_t s = 0; s < m; ++s)
        partner.row(s) = partner.row(s).cwiseProduct(f.row(obs.indices(s, j)));
    }
    x.resize(m);
    eval(factors.factor(mode), obs, mode);
  }

  void eval(const MatrixXd& v, const ObservationSet& obs, int mode) {
    for (std::int64_t s = 0; s < obs.count(); ++s)
      x[s] = v.row(obs.indices(s, mode)).dot(partner.row(s));
  }
};

double loss_sum(const Eigen::VectorXd& x, const ObservationSet& obs,
                const LinkFunction& link) {
  double total = 0.0;
  for (std::int64_t s = 0; s < obs.count(); ++s)
    total += sample_loss(x[s], obs.signs[s], link);
  return total;
}

}  // namespace

FitResult fit_max_qnorm(const ObservationSet& obs, const LinkFunction& link,
                        const SolverConfig& config) {
  if (obs.count() < 1) throw std::invalid_argument("fit_max_qnorm: empty observations");
  if (!(config.r_max > 0.0)) throw std::invalid_argument("fit_max_qnorm: r_max must be positive");
  const Shape shape = obs.shape;
  const int d = shape.order();
  int k = config.k_cap;
  if (k <= 0) k = 2 * *std::max_element(shape.dims.begin(), shape.dims.end());
  const double bound = std::pow(config.r_max, 1.0 / d);

  // bounded random start, feasible from the first iterate
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<MatrixXd> init;
  init.reserve(d);
  for (int j = 0; j < d; ++j) {
    MatrixXd f(shape.dims[j], k);
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      for (Eigen::Index c = 0; c < f.cols(); ++c) f(r, c) = unif(rng);
    init.push_back(project_row_norm(f, bound));
  }
  CpFactorSet factors(std::move(init));
  if (config.enforce_infinity) rescale_infinity(factors, config.alpha, 0);

  FitResult res;
  res.chosen_r = config.r_max;

  SampleCache cache;
  double current = nll(factors, obs, link).value;
  res.objective_trace.push_back(current);

  for (int outer = 0; outer < config.max_outer; ++outer) {
    for (int mode = 0; mode < d; ++mode) {
      cache.build(factors, obs, mode);
      MatrixXd& v = factors.factor(mode);
      for (int inner = 0; inner < config.max_inner; ++inner) {
        // gradient of the sub-problem in the current factor
        MatrixXd grad = MatrixXd::Zero(v.rows(), k);
        for (std::int64_t s = 0; s < obs.count(); ++s)
          grad.row(obs.indices(s, mode)) +=
              nll_grad_entry(cache.x[s], obs.signs[s], link) * cache.partner.row(s);
        const double gnorm2 = grad.squaredNorm();
        if (gnorm2 < 1e-30) break;

        double gamma = 1.0;
        bool accepted = false;
        while (gamma > 1e-14) {
          MatrixXd cand = project_row_norm(v - gamma * grad, bound);
          double scale = 1.0;
          if (config.enforce_infinity) {
            CpFactorSet trial = factors;
            trial.factor(mode) = cand;
            scale = rescale_infinity(trial, config.alpha, mode);
            cand = trial.factor(mode);
          }
          cache.eval(cand, obs, mode);
          const double f_new = loss_sum(cache.x, obs, link);
          const double pred = config.armijo_c * grad.cwiseProduct(v - cand).sum();
          if (f_new <= current - std::max(pred, 0.0)) {
            v = cand;
            current = f_new;
            accepted = true;
            const double overshoot = v.rowwise().norm().maxCoeff() / bound - 1.0;
            res.feasibility_gap = std::max(res.feasibility_gap, overshoot);
            break;
          }
          gamma *= config.backtrack_shrink;
        }
        if (!accepted) {
          cache.eval(v, obs, mode);  // restore cached values for this factor
          break;
        }
      }
    }
    res.objective_trace.push_back(current);
    res.iterations = outer + 1;
    const double prev = res.objective_trace[res.objective_trace.size() - 2];
    res.max_trace_increase = std::max(res.max_trace_increase, current - prev);
    if (prev - current <= config.tol * std::max(1.0, std::abs(prev))) {
      res.converged = true;
      break;
    }
  }

  res.factors = std::move(factors);
  return res;
}

std::vector<double> default_radius_grid(double alpha) {
  std::vector<double> grid;
  for (int j = 0; j <= 7; ++j) grid.push_back(alpha * std::pow(2.0, j));
  return grid;
}

CrossValidationResult cross_validate_radius(const ObservationSet& obs,
                                            const LinkFunction& link,
                                            const SolverConfig& config,
                                            const std::vector<double>& grid,
                                            double holdout_fraction) {
  if (grid.empty()) throw std::invalid_argument("cross_validate_radius: empty grid");
  for (double r : grid)
    if (!(r > 0.0)) throw std::invalid_argument("cross_validate_radius: radii must be positive");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 0.5))
    throw std::invalid_argument("cross_validate_radius: holdout_fraction must be in (0, 0.5)");
  const std::int64_t m = obs.count();
  if (m < 2) throw std::invalid_argument("cross_validate_radius: need at least 2 samples");

  std::vector<std::int64_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::shuffle(order.begin(), order.end(), rng);
  std::int64_t n_val = std::max<std::int64_t>(1, static_cast<std::int64_t>(m * holdout_fraction));
  if (n_val >= m) n_val = m - 1;
  std::vector<std::int64_t> val_ids(order.begin(), order.begin() + n_val);
  std::vector<std::int64_t> train_ids(order.begin() + n_val, order.end());
  const ObservationSet val = obs.subset(val_ids);
  const ObservationSet train = obs.subset(train_ids);

  CrossValidationResult out;
  out.grid = grid;
  double best = std::numeric_limits<double>::infinity();
  for (double r : grid) {
    SolverConfig c = config;
    c.r_max = r;
    FitResult fit = fit_max_qnorm(train, link, c);
    const double v = nll(fit.factors, val, link).value / static_cast<double>(val.count());
    out.validation_nll.push_back(v);
    if (v < best) {  // strict: first occurrence wins ties
      best = v;
      out.best_r = r;
    }
  }
  SolverConfig c = config;
  c.r_max = out.best_r;
  out.fit = fit_max_qnorm(obs, link, c);
  return out;
}

ObservationSet matricize_observations(const ObservationSet& obs, const ModeSplit& split) {
  ObservationSet out;
  out.shape = Shape({static_cast<int>(split.row_count()), static_cast<int>(split.col_count())});
  out.indices.resize(obs.count(), 2);
  out.signs = obs.signs;
  TensorIndex idx(split.shape.order());
  for (std::int64_t s = 0; s < obs.count(); ++s) {
    for (int j = 0; j < split.shape.order(); ++j) idx[j] = obs.indices(s, j);
    auto [r, c] = split.to_matrix(idx);
    out.indices(s, 0) = static_cast<int>(r);
    out.indices(s, 1) = static_cast<int>(c);
  }
  return out;
}

MatricizedFit fit_matricized(const ObservationSet& obs, const LinkFunction& link,
                             const SolverConfig& config,
                             const std::vector<int>& row_modes) {
  ModeSplit split(obs.shape, row_modes);
  const ObservationSet mat_obs = matricize_observations(obs, split);
  return MatricizedFit{fit_max_qnorm(mat_obs, link, config), split};
}

MatricizedCvResult cross_validate_matricized(const ObservationSet& obs,
                                             const LinkFunction& link,
                                             const SolverConfig& config,
                                             const std::vector<double>& grid,
                                             double holdout_fraction,
                                             const std::vector<int>& row_modes) {
  ModeSplit split(obs.shape, row_modes);
  const ObservationSet mat_obs = matricize_observations(obs, split);
  return MatricizedCvResult{
      cross_validate_radius(mat_obs, link, config, grid, holdout_fraction), split};
}

}  // namespace onebit
