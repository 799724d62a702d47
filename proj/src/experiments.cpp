#include "onebit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace onebit {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<TruthSample> all_entries(const DenseTensor& t) {
  std::vector<TruthSample> out;
  out.reserve(t.shape().size());
  for (std::int64_t off = 0; off < t.shape().size(); ++off)
    out.push_back(TruthSample{t.shape().index(off), t.data()[off]});
  return out;
}

std::vector<double> grid_or_default(const ExperimentSpec& spec) {
  return spec.cv_grid.empty() ? default_radius_grid(1.0) : spec.cv_grid;
}

SweepRow tensor_cell(const ExperimentSpec& spec, const DenseTensor& truth,
                     const ObservationSet& obs, const LinkFunction& link,
                     double sigma, int rank, double fraction, int rep,
                     std::uint64_t seed) {
  SolverConfig config = spec.solver;
  config.seed = seed;
  const auto cv = cross_validate_radius(obs, link, config, grid_or_default(spec), spec.holdout);
  const DenseTensor est = cp_expand(cv.fit.factors);
  SweepRow row;
  row.method = "tensor";
  row.sigma = sigma;
  row.rank = rank;
  row.fraction = fraction;
  row.rep = rep;
  row.seed = seed;
  row.rse = rse(est, truth);
  row.sign_acc = sign_accuracy(est, all_entries(truth), 0.0);
  row.final_nll = cv.fit.objective_trace.back();
  row.chosen_r = cv.best_r;
  row.iterations = cv.fit.iterations;
  row.max_trace_increase = cv.fit.max_trace_increase;
  row.feasibility_gap = cv.fit.feasibility_gap;
  return row;
}

SweepRow matricized_cell(const ExperimentSpec& spec, const DenseTensor& truth,
                         const ObservationSet& obs, const LinkFunction& link,
                         double sigma, int rank, double fraction, int rep,
                         std::uint64_t seed) {
  SolverConfig config = spec.solver;
  config.seed = seed;
  const DenseTensor truth_mat = matricize(truth, spec.row_modes);
  if (config.k_cap <= 0)
    config.k_cap = 2 * std::min(truth_mat.shape().dims[0], truth_mat.shape().dims[1]);
  const auto mcv = cross_validate_matricized(obs, link, config, grid_or_default(spec),
                                             spec.holdout, spec.row_modes);
  const DenseTensor est = cp_expand(mcv.cv.fit.factors);
  SweepRow row;
  row.method = "matricized";
  row.sigma = sigma;
  row.rank = rank;
  row.fraction = fraction;
  row.rep = rep;
  row.seed = seed;
  row.rse = rse(est, truth_mat);
  row.sign_acc = sign_accuracy(est, all_entries(truth_mat), 0.0);
  row.final_nll = mcv.cv.fit.objective_trace.back();
  row.chosen_r = mcv.cv.best_r;
  row.iterations = mcv.cv.fit.iterations;
  row.max_trace_increase = mcv.cv.fit.max_trace_increase;
  row.feasibility_gap = mcv.cv.fit.feasibility_gap;
  return row;
}

}  // namespace

DenseTensor gen_synthetic(const Shape& shape, int r, std::uint64_t seed) {
  if (r < 1) throw std::invalid_argument("gen_synthetic: rank must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  while (true) {
    std::vector<MatrixXd> factors;
    factors.reserve(shape.order());
    for (int j = 0; j < shape.order(); ++j) {
      MatrixXd f(shape.dims[j], r);
      for (Eigen::Index a = 0; a < f.rows(); ++a)
        for (Eigen::Index b = 0; b < f.cols(); ++b) f(a, b) = unif(rng);
      factors.push_back(std::move(f));
    }
    DenseTensor t = cp_expand(CpFactorSet(std::move(factors)));
    const double inf = infinity_norm(t);
    if (inf < 1e-12) continue;  // degenerate draw, take the next substream
    t.data() /= inf;
    return t;
  }
}

std::vector<SweepRow> run_sigma_sweep(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
  const double fraction = spec.fractions.empty() ? 0.5 : spec.fractions.front();
  std::vector<SweepRow> rows;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t gen_seed = mix_seed(spec.seed, rep, 0);
    const DenseTensor truth = gen_synthetic(spec.shape, spec.rank, gen_seed);
    const auto m = static_cast<std::int64_t>(
        std::llround(fraction * static_cast<double>(spec.shape.size())));
    const auto idx = sample_indices(SamplingDistribution::Uniform(spec.shape), m,
                                    mix_seed(spec.seed, rep, 1));
    for (std::size_t si = 0; si < spec.sigmas.size(); ++si) {
      const double sigma = spec.sigmas[si];
      const LinkFunction link = LinkFunction::Probit(sigma);
      const ObservationSet obs = quantize(truth, idx, link, mix_seed(spec.seed, rep, 2 + si));
      const std::uint64_t fit_seed = mix_seed(spec.seed, rep, 100 + si);
      if (spec.run_tensor)
        rows.push_back(tensor_cell(spec, truth, obs, link, sigma, spec.rank, fraction,
                                   rep, fit_seed));
      if (spec.run_matricized)
        rows.push_back(matricized_cell(spec, truth, obs, link, sigma, spec.rank,
                                       fraction, rep, fit_seed));
    }
  }
  return rows;
}

std::vector<SweepRow> run_sample_sweep(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
  const double sigma = spec.sigmas.empty() ? 0.1 : spec.sigmas.front();
  const LinkFunction link = LinkFunction::Probit(sigma);
  std::vector<SweepRow> rows;
  for (std::size_t ri = 0; ri < spec.ranks.size(); ++ri) {
    const int rank = spec.ranks[ri];
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      const std::uint64_t gen_seed = mix_seed(spec.seed, rep, 1000 + ri);
      const DenseTensor truth = gen_synthetic(spec.shape, rank, gen_seed);
      for (std::size_t fi = 0; fi < spec.fractions.size(); ++fi) {
        const double fraction = spec.fractions[fi];
        const auto m = static_cast<std::int64_t>(
            std::llround(fraction * static_cast<double>(spec.shape.size())));
        const auto idx = sample_indices(SamplingDistribution::Uniform(spec.shape), m,
                                        mix_seed(gen_seed, fi, 1));
        const ObservationSet obs = quantize(truth, idx, link, mix_seed(gen_seed, fi, 2));
        const std::uint64_t fit_seed = mix_seed(gen_seed, fi, 3);
        if (spec.run_tensor)
          rows.push_back(tensor_cell(spec, truth, obs, link, sigma, rank, fraction,
                                     rep, fit_seed));
        if (spec.run_matricized)
          rows.push_back(matricized_cell(spec, truth, obs, link, sigma, rank, fraction,
                                         rep, fit_seed));
      }
    }
  }
  return rows;
}

std::vector<SweepRow> run_sigma_robustness(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
  const double fraction = spec.fractions.empty() ? 0.5 : spec.fractions.front();
  const LinkFunction gen_link = LinkFunction::Probit(spec.sigma_gen);
  std::vector<SweepRow> rows;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t gen_seed = mix_seed(spec.seed, rep, 7);
    const DenseTensor truth = gen_synthetic(spec.shape, spec.rank, gen_seed);
    const auto m = static_cast<std::int64_t>(
        std::llround(fraction * static_cast<double>(spec.shape.size())));
    const auto idx = sample_indices(SamplingDistribution::Uniform(spec.shape), m,
                                    mix_seed(spec.seed, rep, 8));
    const ObservationSet obs = quantize(truth, idx, gen_link, mix_seed(spec.seed, rep, 9));
    for (std::size_t si = 0; si < spec.sigmas.size(); ++si) {
      const LinkFunction fit_link = LinkFunction::Probit(spec.sigmas[si]);
      rows.push_back(tensor_cell(spec, truth, obs, fit_link, spec.sigmas[si], spec.rank,
                                 fraction, rep, mix_seed(spec.seed, rep, 200 + si)));
    }
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << std::setprecision(17);
  f << "method,sigma,rank,fraction,rep,seed,rse,sign_acc,final_nll,chosen_r,"
       "iterations,max_trace_increase,feasibility_gap\n";
  for (const auto& r : rows)
    f << r.method << "," << r.sigma << "," << r.rank << "," << r.fraction << ","
      << r.rep << "," << r.seed << "," << r.rse << "," << r.sign_acc << ","
      << r.final_nll << "," << r.chosen_r << "," << r.iterations << ","
      << r.max_trace_increase << "," << r.feasibility_gap << "\n";
}

RecipeResult run_recipe(const RatingsTable& table, const RecipeParams& params,
                        const ExperimentSpec& spec) {
  if (table.rows.empty()) throw std::invalid_argument("recipe: empty ratings table");
  if (!(params.scale_max > 0.0)) throw std::invalid_argument("recipe: scale_max must be positive");
  const double frac_sum =
      params.train_fraction + params.val_fraction + params.test_fraction;
  if (std::abs(frac_sum - 1.0) > 1e-9 || params.train_fraction <= 0.0 ||
      params.val_fraction <= 0.0 || params.test_fraction <= 0.0)
    throw std::invalid_argument("recipe: split fractions must be positive and sum to 1");

  // sample-level split
  const std::size_t n = table.rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(params.seed, 0, 42));
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(n * params.test_fraction));
  const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(n * params.val_fraction));
  if (n_test + n_val >= n) throw std::invalid_argument("recipe: empty train split");
  std::vector<std::size_t> test_ids(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> fit_ids(order.begin() + n_test, order.end());

  // step 1: rescale to unit infinity norm; step 2: threshold at eta
  const double scale = params.scale_max;
  double eta = params.eta;
  if (std::isnan(eta)) {
    double total = 0.0;
    for (std::size_t i : fit_ids) total += table.rows[i].rating;
    eta = total / static_cast<double>(fit_ids.size());
  }
  if (std::abs(eta) > scale)
    throw std::invalid_argument("recipe: eta outside the rating scale");

  ObservationSet obs;
  obs.shape = table.shape;
  obs.indices.resize(fit_ids.size(), table.shape.order());
  obs.signs.resize(fit_ids.size());
  int n_pos = 0;
  for (std::size_t s = 0; s < fit_ids.size(); ++s) {
    const auto& row = table.rows[fit_ids[s]];
    for (int j = 0; j < table.shape.order(); ++j) obs.indices(s, j) = row.index[j];
    obs.signs[s] = row.rating > eta ? 1 : -1;  // ties at eta go to -1
    if (obs.signs[s] > 0) ++n_pos;
  }

  RecipeResult res;
  res.eta_used = eta;
  res.n_train = static_cast<int>(fit_ids.size() - n_val);
  res.n_val = static_cast<int>(n_val);
  res.n_test = static_cast<int>(n_test);
  res.degenerate_labels = (n_pos == 0 || n_pos == static_cast<int>(fit_ids.size()));

  // step 3: cross-validated max-qnorm fit on the 1-bit training data
  const double sigma = spec.sigmas.empty() ? 0.1 : spec.sigmas.front();
  const LinkFunction link = LinkFunction::Probit(sigma);
  SolverConfig config = spec.solver;
  config.seed = mix_seed(params.seed, 1, 7);
  const double holdout =
      static_cast<double>(n_val) / static_cast<double>(fit_ids.size());
  const auto cv = cross_validate_radius(obs, link, config, grid_or_default(spec),
                                        std::clamp(holdout, 0.01, 0.49));
  res.chosen_r = cv.best_r;

  // step 4: back to the rating scale
  DenseTensor est = cp_expand(cv.fit.factors);
  est.data() = est.data() * scale;
  est.data().array() += eta;

  // step 5: evaluate on the test split
  std::vector<TruthSample> test;
  test.reserve(test_ids.size());
  for (std::size_t i : test_ids)
    test.push_back(TruthSample{table.rows[i].index, table.rows[i].rating});
  res.sign_acc = sign_accuracy(est, test, eta);
  res.mae_value = mae(est, test);

  // per-rating-level breakdown
  std::vector<double> levels;
  for (const auto& t : test) levels.push_back(t.value);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto side = [eta](double v) { return v >= eta ? 1 : -1; };
  for (double lvl : levels) {
    int count = 0, correct = 0;
    for (const auto& t : test) {
      if (t.value != lvl) continue;
      ++count;
      if (side(est(t.index)) == side(t.value)) ++correct;
    }
    res.per_level.push_back(
        LevelAccuracy{lvl, count, static_cast<double>(correct) / count});
  }
  return res;
}

namespace {

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::map<std::string, std::string>& kv) {
  ExperimentSpec spec;
  auto get = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("kind")) {
    if (*v == "sigma") spec.kind = ExperimentKind::sigma_sweep;
    else if (*v == "sample") spec.kind = ExperimentKind::sample_sweep;
    else if (*v == "robustness") spec.kind = ExperimentKind::sigma_robustness;
    else if (*v == "recipe") spec.kind = ExperimentKind::recipe;
    else throw std::invalid_argument("unknown experiment kind: " + *v);
  }
  if (auto* v = get("shape")) spec.shape = Shape(parse_int_list(*v));
  if (auto* v = get("rank")) spec.rank = std::stoi(*v);
  if (auto* v = get("ranks")) spec.ranks = parse_int_list(*v);
  if (auto* v = get("fractions")) spec.fractions = parse_double_list(*v);
  if (auto* v = get("sigmas")) spec.sigmas = parse_double_list(*v);
  if (auto* v = get("sigma_gen")) spec.sigma_gen = std::stod(*v);
  if (auto* v = get("repetitions")) spec.repetitions = std::stoi(*v);
  if (auto* v = get("seed")) spec.seed = std::stoull(*v);
  if (auto* v = get("methods")) {
    spec.run_tensor = v->find("tensor") != std::string::npos || *v == "both";
    spec.run_matricized = v->find("matricized") != std::string::npos || *v == "both";
  }
  if (auto* v = get("cv_grid")) spec.cv_grid = parse_double_list(*v);
  if (auto* v = get("holdout")) spec.holdout = std::stod(*v);
  if (auto* v = get("row_modes")) {
    spec.row_modes.clear();
    for (int m : parse_int_list(*v)) spec.row_modes.push_back(m - 1);  // 1-based in files
  }
  if (auto* v = get("k_cap")) spec.solver.k_cap = std::stoi(*v);
  if (auto* v = get("max_outer")) spec.solver.max_outer = std::stoi(*v);
  if (auto* v = get("max_inner")) spec.solver.max_inner = std::stoi(*v);
  if (auto* v = get("tol")) spec.solver.tol = std::stod(*v);
  if (auto* v = get("alpha")) spec.solver.alpha = std::stod(*v);
  if (auto* v = get("enforce_infinity")) spec.solver.enforce_infinity = (*v == "1" || *v == "true");
  for (double f : spec.fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw std::invalid_argument("spec: fractions must lie in (0, 1]");
  return spec;
}

}  // namespace onebit
