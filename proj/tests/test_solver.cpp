#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "onebit/solver.hpp"

using namespace onebit;

namespace {

MatrixXd random_matrix(int rows, int cols, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = unif(rng);
  return m;
}

ObservationSet repeated_signs(const Shape& shape, const DenseTensor& truth,
                              int reps) {
  ObservationSet obs;
  obs.shape = shape;
  const std::int64_t n = shape.size();
  obs.indices.resize(n * reps, shape.order());
  obs.signs.resize(n * reps);
  std::int64_t s = 0;
  for (int rep = 0; rep < reps; ++rep)
    for (std::int64_t off = 0; off < n; ++off, ++s) {
      const TensorIndex idx = shape.index(off);
      for (int j = 0; j < shape.order(); ++j) obs.indices(s, j) = idx[j];
      obs.signs[s] = truth.data()[off] >= 0.0 ? 1 : -1;
    }
  return obs;
}

}  // namespace

TEST_CASE("project_row_norm rescales the long row only") {
  MatrixXd v(2, 2);
  v << 3, 4, 0.3, 0.4;
  const MatrixXd p = project_row_norm(v, 1.0);
  CHECK(p(0, 0) == doctest::Approx(0.6));
  CHECK(p(0, 1) == doctest::Approx(0.8));
  CHECK(p(1, 0) == 0.3);
  CHECK(p(1, 1) == 0.4);
  CHECK_THROWS(project_row_norm(v, 0.0));
}

TEST_CASE("project_row_norm is exactly idempotent") {
  const MatrixXd v = random_matrix(30, 5, 21, -3.0, 3.0);
  const MatrixXd once = project_row_norm(v, 1.3);
  const MatrixXd twice = project_row_norm(once, 1.3);
  CHECK((once - twice).cwiseAbs().maxCoeff() == 0.0);
  CHECK(once.rowwise().norm().maxCoeff() <= 1.3);
}

TEST_CASE("project_row_norm is nonexpansive on 100 random pairs") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXd a(3, 2), b(3, 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = unif(rng);
      b.data()[i] = unif(rng);
    }
    const double before = (a - b).norm();
    const double after = (project_row_norm(a, 1.0) - project_row_norm(b, 1.0)).norm();
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("rescale_infinity shrinks onto the bound and reports the scale") {
  MatrixXd u(2, 1), v(2, 1);
  u << 2, 1;
  v << 2, 1;  // max entry of the product is 4
  CpFactorSet f({u, v});
  const double scale = rescale_infinity(f, 1.0, 0);
  CHECK(scale == doctest::Approx(0.25));
  CHECK(infinity_norm(cp_expand(f)) == doctest::Approx(1.0));
  // second call is a no-op
  CHECK(rescale_infinity(f, 1.0, 0) == 1.0);

  CpFactorSet small({0.1 * u, 0.1 * v});
  CHECK(rescale_infinity(small, 1.0, 1) == 1.0);
}

TEST_CASE("fit recovers the sign pattern of a rank-one 2x2x2 tensor") {
  MatrixXd a(2, 1), b(2, 1), c(2, 1);
  a << 1, -1;
  b << 1, 0.5;
  c << 1, 1;
  const CpFactorSet truth({a, b, c});
  const DenseTensor t = cp_expand(truth);

  const ObservationSet obs = repeated_signs(t.shape(), t, 50);
  SolverConfig config;
  config.r_max = 4.0;
  config.k_cap = 4;
  config.seed = 7;
  const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  const DenseTensor est = cp_expand(fit.factors);
  for (std::int64_t off = 0; off < 8; ++off)
    CHECK(est.data()[off] * t.data()[off] > 0.0);
  CHECK(fit.chosen_r == 4.0);
  CHECK(fit.iterations >= 1);
}

TEST_CASE("a single positive observation drives that entry positive") {
  ObservationSet obs;
  obs.shape = Shape({2, 2});
  obs.indices.resize(1, 2);
  obs.indices << 0, 1;
  obs.signs.resize(1);
  obs.signs[0] = 1;
  SolverConfig config;
  config.r_max = 2.0;
  config.k_cap = 2;
  config.seed = 11;
  const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  CHECK(cp_eval_entry(fit.factors, {0, 1}) > 0.0);
}

TEST_CASE("objective trace never increases") {
  MatrixXd a = random_matrix(4, 2, 1, -1.0, 1.0);
  MatrixXd b = random_matrix(4, 2, 2, -1.0, 1.0);
  MatrixXd c = random_matrix(4, 2, 3, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b, c}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 3);

  for (bool enforce : {false, true}) {
    SolverConfig config;
    config.r_max = 8.0;
    config.k_cap = 6;
    config.seed = 4;
    config.enforce_infinity = enforce;
    config.alpha = 1.0;
    const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-10);
    CHECK(fit.max_trace_increase <= 1e-10);
  }
}

TEST_CASE("iterates stay feasible for the factor row bound") {
  MatrixXd a = random_matrix(3, 2, 8, -1.0, 1.0);
  MatrixXd b = random_matrix(3, 2, 9, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 5);
  SolverConfig config;
  config.r_max = 3.0;
  config.k_cap = 4;
  config.seed = 2;
  const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  const double bound = std::sqrt(3.0);
  for (const auto& f : fit.factors.factors())
    CHECK(f.rowwise().norm().maxCoeff() <= bound * (1.0 + 1e-12));
  CHECK(fit.feasibility_gap <= 1e-12);
}

TEST_CASE("enforce_infinity keeps the expanded tensor inside the box") {
  MatrixXd a = random_matrix(3, 2, 18, -1.0, 1.0);
  MatrixXd b = random_matrix(3, 2, 19, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({3.0 * a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 5);
  SolverConfig config;
  config.r_max = 16.0;
  config.k_cap = 4;
  config.seed = 6;
  config.enforce_infinity = true;
  config.alpha = 0.8;
  const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  CHECK(infinity_norm(cp_expand(fit.factors)) <= 0.8 * (1.0 + 1e-12));
}

TEST_CASE("fit is deterministic bit for bit per seed") {
  MatrixXd a = random_matrix(3, 2, 41, -1.0, 1.0);
  MatrixXd b = random_matrix(3, 2, 42, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 4);
  SolverConfig config;
  config.r_max = 2.0;
  config.k_cap = 3;
  config.seed = 99;
  config.max_outer = 30;
  const FitResult f1 = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  const FitResult f2 = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  REQUIRE(f1.objective_trace.size() == f2.objective_trace.size());
  for (std::size_t i = 0; i < f1.objective_trace.size(); ++i)
    CHECK(f1.objective_trace[i] == f2.objective_trace[i]);
  for (int j = 0; j < 2; ++j)
    CHECK((f1.factors.factor(j) - f2.factors.factor(j)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k_cap default is twice the largest dimension") {
  ObservationSet obs;
  obs.shape = Shape({2, 5});
  obs.indices.resize(1, 2);
  obs.indices << 0, 0;
  obs.signs.resize(1);
  obs.signs[0] = 1;
  SolverConfig config;
  config.max_outer = 1;
  const FitResult fit = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  CHECK(fit.factors.rank() == 10);
}

TEST_CASE("fit rejects empty observations and bad radii") {
  ObservationSet empty;
  empty.shape = Shape({2, 2});
  empty.indices.resize(0, 2);
  empty.signs.resize(0);
  CHECK_THROWS(fit_max_qnorm(empty, LinkFunction::Logistic(), SolverConfig{}));

  ObservationSet one;
  one.shape = Shape({2, 2});
  one.indices.resize(1, 2);
  one.indices << 0, 0;
  one.signs.resize(1);
  one.signs[0] = 1;
  SolverConfig bad;
  bad.r_max = 0.0;
  CHECK_THROWS(fit_max_qnorm(one, LinkFunction::Logistic(), bad));
}

TEST_CASE("cross validation on a trivial grid returns that radius") {
  MatrixXd a = random_matrix(3, 2, 51, -1.0, 1.0);
  MatrixXd b = random_matrix(3, 2, 52, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 4);
  SolverConfig config;
  config.k_cap = 3;
  config.seed = 1;
  config.max_outer = 30;
  const auto cv =
      cross_validate_radius(obs, LinkFunction::Logistic(), config, {2.5}, 0.2);
  CHECK(cv.best_r == 2.5);
  CHECK(cv.grid == std::vector<double>{2.5});
  REQUIRE(cv.validation_nll.size() == 1);
  CHECK(cv.fit.chosen_r == 2.5);
}

TEST_CASE("cross validation ties resolve to the first grid entry") {
  MatrixXd a = random_matrix(3, 2, 61, -1.0, 1.0);
  MatrixXd b = random_matrix(3, 2, 62, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 4);
  SolverConfig config;
  config.k_cap = 3;
  config.seed = 5;
  config.max_outer = 30;
  const auto cv =
      cross_validate_radius(obs, LinkFunction::Logistic(), config, {3.0, 3.0}, 0.2);
  CHECK(cv.validation_nll[0] == cv.validation_nll[1]);
  CHECK(cv.best_r == 3.0);
}

TEST_CASE("cross validation picks the argmin of the validation table") {
  MatrixXd a = random_matrix(4, 3, 71, -1.0, 1.0);
  MatrixXd b = random_matrix(4, 3, 72, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 6);
  SolverConfig config;
  config.k_cap = 4;
  config.seed = 9;
  config.max_outer = 40;
  const std::vector<double> grid = {1.0, 5.0, 25.0, 125.0};
  const auto cv = cross_validate_radius(obs, LinkFunction::Logistic(), config, grid, 0.2);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < cv.validation_nll.size(); ++i)
    if (cv.validation_nll[i] < cv.validation_nll[arg]) arg = i;
  CHECK(cv.best_r == grid[arg]);
}

TEST_CASE("cross validation input checks") {
  ObservationSet one;
  one.shape = Shape({2, 2});
  one.indices.resize(1, 2);
  one.indices << 0, 0;
  one.signs.resize(1);
  one.signs[0] = 1;
  const LinkFunction link = LinkFunction::Logistic();
  CHECK_THROWS(cross_validate_radius(one, link, SolverConfig{}, {}, 0.2));
  CHECK_THROWS(cross_validate_radius(one, link, SolverConfig{}, {1.0}, 0.2));
  CHECK_THROWS(cross_validate_radius(one, link, SolverConfig{}, {-1.0, 1.0}, 0.2));
}

TEST_CASE("default radius grid doubles eight times from alpha") {
  const auto grid = default_radius_grid(3.0);
  REQUIRE(grid.size() == 8);
  CHECK(grid.front() == 3.0);
  CHECK(grid.back() == doctest::Approx(3.0 * 128.0));
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK(grid[i] == doctest::Approx(2.0 * grid[i - 1]));
}

TEST_CASE("matricized observations follow the unfolding bijection") {
  const Shape shape({2, 3, 2});
  ObservationSet obs;
  obs.shape = shape;
  obs.indices.resize(2, 3);
  obs.indices << 1, 2, 0, 0, 1, 1;
  obs.signs.resize(2);
  obs.signs << 1, -1;
  ModeSplit split(shape, {0, 2});
  const ObservationSet m = matricize_observations(obs, split);
  CHECK(m.shape.dims == std::vector<int>{4, 3});
  for (std::int64_t s = 0; s < 2; ++s) {
    TensorIndex idx = {obs.indices(s, 0), obs.indices(s, 1), obs.indices(s, 2)};
    auto [r, c] = split.to_matrix(idx);
    CHECK(m.indices(s, 0) == r);
    CHECK(m.indices(s, 1) == c);
    CHECK(m.signs[s] == obs.signs[s]);
  }
}

TEST_CASE("fit_matricized on d = 2 with identity remap matches fit_max_qnorm") {
  MatrixXd a = random_matrix(3, 2, 81, -1.0, 1.0);
  MatrixXd b = random_matrix(4, 2, 82, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 4);
  SolverConfig config;
  config.k_cap = 4;
  config.seed = 13;
  config.max_outer = 25;
  const MatricizedFit mat = fit_matricized(obs, LinkFunction::Logistic(), config, {0});
  const FitResult direct = fit_max_qnorm(obs, LinkFunction::Logistic(), config);
  REQUIRE(mat.fit.objective_trace.size() == direct.objective_trace.size());
  for (std::size_t i = 0; i < direct.objective_trace.size(); ++i)
    CHECK(mat.fit.objective_trace[i] == direct.objective_trace[i]);
  CHECK(mat.split.row_count() == 3);
  CHECK(mat.split.col_count() == 4);
}

TEST_CASE("cross_validate_matricized reports the split and a valid radius") {
  MatrixXd a = random_matrix(2, 2, 91, -1.0, 1.0);
  MatrixXd b = random_matrix(2, 2, 92, -1.0, 1.0);
  MatrixXd c = random_matrix(3, 2, 93, -1.0, 1.0);
  const DenseTensor t = cp_expand(CpFactorSet({a, b, c}));
  const ObservationSet obs = repeated_signs(t.shape(), t, 4);
  SolverConfig config;
  config.k_cap = 3;
  config.seed = 17;
  config.max_outer = 20;
  const auto res = cross_validate_matricized(obs, LinkFunction::Logistic(), config,
                                             {1.0, 4.0}, 0.2, {0, 1});
  CHECK(res.split.row_count() == 4);
  CHECK(res.split.col_count() == 3);
  CHECK((res.cv.best_r == 1.0 || res.cv.best_r == 4.0));
  CHECK(res.cv.fit.factors.shape().dims == std::vector<int>{4, 3});
}
