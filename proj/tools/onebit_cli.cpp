// Command-line front end: synthetic data generation, fitting, evaluation,
// experiment sweeps, and the ratings recipe.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "onebit/experiments.hpp"

using namespace onebit;
using nlohmann::json;

namespace {

Shape parse_shape(const std::string& s) {
  std::vector<int> dims;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
  return Shape(dims);
}

LinkFunction make_link(const std::string& kind, double sigma) {
  if (kind == "logistic") return LinkFunction::Logistic();
  if (kind == "probit") return LinkFunction::Probit(sigma);
  throw CLI::ValidationError("--link must be logistic or probit");
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open for writing: " + out);
  f << j.dump(2) << "\n";
}

json fit_summary(const FitResult& fit) {
  return json{{"chosen_r", fit.chosen_r},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"final_nll", fit.objective_trace.back()},
              {"feasibility_gap", fit.feasibility_gap},
              {"max_trace_increase", fit.max_trace_increase}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit tensor completion via max-qnorm constrained ML"};
  app.require_subcommand(1);

  // simulate: generate a synthetic tensor and quantized observations
  auto* simulate = app.add_subcommand("simulate", "generate truth tensor and 1-bit samples");
  std::string sim_shape = "20,20,20", sim_out = "sim", sim_link = "probit";
  int sim_rank = 5;
  double sim_sigma = 0.1, sim_fraction = 0.5;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--shape", sim_shape, "comma-separated dims");
  simulate->add_option("--rank", sim_rank, "CP rank of the planted tensor");
  simulate->add_option("--sigma", sim_sigma, "probit scale");
  simulate->add_option("--link", sim_link, "logistic or probit");
  simulate->add_option("--fraction", sim_fraction, "samples as a fraction of tensor size");
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--out", sim_out, "output prefix (<out>_truth.txt, <out>_obs.csv)");

  // fit: observations -> checkpoint
  auto* fit_cmd = app.add_subcommand("fit", "fit observations, write a checkpoint");
  std::string fit_obs, fit_shape, fit_ckpt = "fit_checkpoint.txt", fit_link = "probit";
  std::string fit_metrics_out;
  double fit_sigma = 0.1, fit_rmax = 0.0, fit_holdout = 0.1;
  std::vector<double> fit_grid;
  std::uint64_t fit_seed = 0;
  int fit_kcap = 0, fit_max_outer = 200;
  fit_cmd->add_option("--obs", fit_obs, "observation CSV")->required();
  fit_cmd->add_option("--shape", fit_shape, "comma-separated dims")->required();
  fit_cmd->add_option("--sigma", fit_sigma, "probit scale");
  fit_cmd->add_option("--link", fit_link, "logistic or probit");
  fit_cmd->add_option("--rmax", fit_rmax, "fixed max-qnorm radius (skips cross-validation)");
  fit_cmd->add_option("--cv-grid", fit_grid, "radii to cross-validate (default alpha*2^j)");
  fit_cmd->add_option("--holdout", fit_holdout, "validation fraction for cross-validation");
  fit_cmd->add_option("--k-cap", fit_kcap, "factor columns (0: twice the largest dim)");
  fit_cmd->add_option("--max-outer", fit_max_outer, "alternating sweeps");
  fit_cmd->add_option("--seed", fit_seed, "RNG seed");
  fit_cmd->add_option("--out", fit_ckpt, "checkpoint path");
  fit_cmd->add_option("--metrics-out", fit_metrics_out, "fit summary JSON (default stdout)");

  // evaluate: checkpoint + truth -> metrics JSON
  auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint against a truth tensor");
  std::string eval_ckpt, eval_truth, eval_out;
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint path")->required();
  eval_cmd->add_option("--truth", eval_truth, "truth tensor file")->required();
  eval_cmd->add_option("--out", eval_out, "metrics JSON path (default stdout)");

  // sweep: spec file -> result CSV
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment sweep from a spec file");
  std::string sweep_kind, sweep_spec, sweep_out = "sweep.csv";
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  sweep_cmd->add_option("--kind", sweep_kind, "sigma, sample, or robustness")->required();
  sweep_cmd->add_option("--spec", sweep_spec, "key-value spec file");
  sweep_cmd->add_option("--out", sweep_out, "result CSV path");
  sweep_cmd->add_option("--seed", sweep_seed, "override the spec seed")
      ->each([&](const std::string&) { sweep_seed_set = true; });

  // recipe: ratings CSV -> metrics JSON
  auto* recipe_cmd = app.add_subcommand("recipe", "threshold-fit-rescale recipe on ratings");
  std::string rec_ratings, rec_shape, rec_out, rec_spec;
  double rec_eta = std::numeric_limits<double>::quiet_NaN(), rec_scale = 5.0;
  std::uint64_t rec_seed = 0;
  recipe_cmd->add_option("--ratings", rec_ratings, "ratings CSV")->required();
  recipe_cmd->add_option("--shape", rec_shape, "comma-separated dims")->required();
  recipe_cmd->add_option("--eta", rec_eta, "threshold (default: train mean)");
  recipe_cmd->add_option("--scale-max", rec_scale, "rating scale maximum");
  recipe_cmd->add_option("--spec", rec_spec, "optional key-value solver spec");
  recipe_cmd->add_option("--seed", rec_seed, "RNG seed");
  recipe_cmd->add_option("--out", rec_out, "metrics JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const Shape shape = parse_shape(sim_shape);
      const DenseTensor truth = gen_synthetic(shape, sim_rank, sim_seed);
      const auto m = static_cast<std::int64_t>(
          std::llround(sim_fraction * static_cast<double>(shape.size())));
      const auto idx =
          sample_indices(SamplingDistribution::Uniform(shape), m, sim_seed + 1);
      const LinkFunction link = make_link(sim_link, sim_sigma);
      const ObservationSet obs = quantize(truth, idx, link, sim_seed + 2);
      write_tensor(sim_out + "_truth.txt", truth);
      write_observations(sim_out + "_obs.csv", obs);
      std::cout << "wrote " << sim_out << "_truth.txt and " << sim_out << "_obs.csv ("
                << m << " samples)\n";
    }

    if (*fit_cmd) {
      const Shape shape = parse_shape(fit_shape);
      const ObservationSet obs = read_observations(fit_obs, shape);
      const LinkFunction link = make_link(fit_link, fit_sigma);
      SolverConfig config;
      config.seed = fit_seed;
      config.k_cap = fit_kcap;
      config.max_outer = fit_max_outer;
      json summary;
      FitResult fit;
      if (fit_rmax > 0.0) {
        config.r_max = fit_rmax;
        fit = fit_max_qnorm(obs, link, config);
      } else {
        const auto grid = fit_grid.empty() ? default_radius_grid(1.0) : fit_grid;
        auto cv = cross_validate_radius(obs, link, config, grid, fit_holdout);
        fit = std::move(cv.fit);
        summary["cv_grid"] = cv.grid;
        summary["validation_nll"] = cv.validation_nll;
      }
      write_checkpoint(fit_ckpt, fit);
      summary.update(fit_summary(fit));
      summary["checkpoint"] = fit_ckpt;
      emit(summary, fit_metrics_out);
    }

    if (*eval_cmd) {
      const FitResult fit = read_checkpoint(eval_ckpt);
      const DenseTensor truth = read_tensor(eval_truth);
      const DenseTensor est = cp_expand(fit.factors);
      std::vector<TruthSample> test;
      test.reserve(truth.shape().size());
      for (std::int64_t off = 0; off < truth.shape().size(); ++off)
        test.push_back(TruthSample{truth.shape().index(off), truth.data()[off]});
      json j = fit_summary(fit);
      j["rse"] = rse(est, truth);
      j["sign_accuracy"] = sign_accuracy(est, test, 0.0);
      j["mae"] = mae(est, test);
      j["pi_weighted_mse"] =
          pi_weighted_mse(est, truth, SamplingDistribution::Uniform(truth.shape()));
      emit(j, eval_out);
    }

    if (*sweep_cmd) {
      std::map<std::string, std::string> kv;
      if (!sweep_spec.empty()) kv = read_keyvalue_file(sweep_spec);
      kv["kind"] = sweep_kind;
      ExperimentSpec spec = parse_experiment_spec(kv);
      if (sweep_seed_set) spec.seed = sweep_seed;
      std::vector<SweepRow> rows;
      if (sweep_kind == "sigma") rows = run_sigma_sweep(spec);
      else if (sweep_kind == "sample") rows = run_sample_sweep(spec);
      else if (sweep_kind == "robustness") rows = run_sigma_robustness(spec);
      else throw CLI::ValidationError("--kind must be sigma, sample, or robustness");
      write_sweep_csv(sweep_out, rows);
      std::cout << "wrote " << rows.size() << " rows to " << sweep_out << "\n";
    }

    if (*recipe_cmd) {
      const Shape shape = parse_shape(rec_shape);
      const RatingsTable table = ingest_csv(rec_ratings, shape);
      RecipeParams params;
      params.eta = rec_eta;
      params.scale_max = rec_scale;
      params.seed = rec_seed;
      ExperimentSpec spec;
      if (!rec_spec.empty()) spec = parse_experiment_spec(read_keyvalue_file(rec_spec));
      const RecipeResult res = run_recipe(table, params, spec);
      json j{{"sign_accuracy", res.sign_acc},
             {"mae", res.mae_value},
             {"chosen_r", res.chosen_r},
             {"eta", res.eta_used},
             {"n_train", res.n_train},
             {"n_val", res.n_val},
             {"n_test", res.n_test},
             {"duplicate_rows", table.duplicate_count},
             {"degenerate_labels", res.degenerate_labels}};
      json per_level = json::object();
      for (const auto& lvl : res.per_level) {
        std::ostringstream key;
        key << lvl.rating;
        per_level[key.str()] = json{{"count", lvl.count}, {"accuracy", lvl.accuracy}};
      }
      j["per_level_accuracy"] = per_level;
      emit(j, rec_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
