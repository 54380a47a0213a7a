#pragma once

#include <cmath>
#include <set>
#include <string>

#include "sfmc/experiment.hpp"

namespace sfmc {

/// Named experiment presets. The desk-scale defaults shrink the full-scale
/// experiment dimensions so a whole sweep stays in the minutes range; the
/// *_paper variants keep the original sizes.
inline ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.gamma_grid = {0.4, 0.55, 0.7, 0.85, 1.0};
  cfg.lambda_grid = {0.0, 1.0, 3.0, 10.0, 30.0, 100.0};
  cfg.trials = 10;
  cfg.restarts = 4;
  // Slow annealing: the longer small-rho phase is what finds the right
  // support before the coupling consolidates.
  cfg.solver.eta = 1.03;
  cfg.solver.max_outer_iters = 1500;

  auto desk_dims = [&] {
    cfg.truth.n1 = 50;
    cfg.truth.n2 = 200;
    cfg.truth.r = 10;
    cfg.truth.k = 4;
  };
  auto paper_dims = [&] {
    cfg.truth.n1 = 100;
    cfg.truth.n2 = 1000;
    cfg.truth.r = 20;
    cfg.truth.k = 8;
    cfg.trials = 20;
  };

  if (name == "gaussian" || name == "gaussian_paper") {
    name == "gaussian" ? desk_dims() : paper_dims();
    cfg.likelihood = Likelihood::gaussian(0.5);
  } else if (name == "laplace" || name == "laplace_paper") {
    name == "laplace" ? desk_dims() : paper_dims();
    cfg.likelihood = Likelihood::laplace(std::sqrt(2.0));
  } else if (name == "poisson" || name == "poisson_paper") {
    name == "poisson" ? desk_dims() : paper_dims();
    cfg.likelihood = Likelihood::poisson();
    cfg.truth.d_box_true = Box(0.1, 1.0);
    cfg.truth.a_box_true = Box(0.0, 40.0);
    cfg.truth.nonnegative = true;
    cfg.a_box_est = Box(-80.0, 80.0);
  } else if (name == "onebit" || name == "onebit_paper") {
    if (name == "onebit") {
      cfg.truth.n1 = 200;
      cfg.truth.n2 = 200;
      cfg.truth.r = 4;
      cfg.truth.k = 2;
    } else {
      cfg.truth.n1 = 1000;
      cfg.truth.n2 = 1000;
      cfg.truth.r = 5;
      cfg.truth.k = 2;
      cfg.trials = 20;
    }
    cfg.likelihood = Likelihood::one_bit_from_sigma(0.1);
    cfg.lambda_grid = {0.0, 0.5, 2.0, 8.0, 32.0, 128.0};
  } else if (name == "compare62") {
    cfg.truth.n1 = 50;
    cfg.truth.n2 = 500;
    cfg.truth.r = 10;
    cfg.truth.k = 4;
    cfg.likelihood = Likelihood::gaussian(0.5);
    cfg.gamma_grid = {0.5};
    cfg.methods = {Method::AdmmL0, Method::AdmmL1, Method::Nuclear};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

/// Applies flat key = value overrides on top of a preset. Unknown keys are
/// rejected so typos surface instead of silently using defaults.
inline ExperimentConfig apply_config(const KeyValues& kv, ExperimentConfig cfg) {
  static const std::set<std::string> known = {
      "preset", "n1", "n2", "r", "k", "p", "coefficient_model", "likelihood", "sigma", "tau",
      "link_s", "link_sigma", "d_true_lo", "d_true_hi", "a_true_lo", "a_true_hi", "d_est_lo",
      "d_est_hi", "a_est_lo", "a_est_hi", "x_lo", "x_hi", "gamma_grid", "lambda_grid", "trials",
      "seed", "jobs", "record_timing", "restarts", "methods", "nuclear_step", "nuclear_max_iters",
      "output_dir", "solver.eps1", "solver.eps2", "solver.delta1_stop", "solver.delta2_stop",
      "solver.eta", "solver.rho0", "solver.max_outer_iters", "solver.max_inner_iters",
      "solver.newton_damping_delta"};
  for (const auto& [key, value] : kv.entries())
    if (!known.count(key)) throw std::runtime_error("unknown config key: " + key);

  cfg.truth.n1 = kv.get_long("n1", cfg.truth.n1);
  cfg.truth.n2 = kv.get_long("n2", cfg.truth.n2);
  cfg.truth.r = kv.get_long("r", cfg.truth.r);
  cfg.truth.k = int(kv.get_long("k", cfg.truth.k));
  cfg.truth.p = kv.get_double("p", cfg.truth.p);
  if (kv.has("coefficient_model")) {
    const std::string m = kv.get_string("coefficient_model", "");
    if (m == "sparse") cfg.truth.model = CoefficientModel::ExactSparse;
    else if (m == "weaklp") cfg.truth.model = CoefficientModel::WeakLp;
    else throw std::runtime_error("coefficient_model must be sparse or weaklp");
  }
  if (kv.has("likelihood")) {
    const std::string l = kv.get_string("likelihood", "");
    if (l == "gaussian") cfg.likelihood = Likelihood::gaussian(kv.get_double("sigma", 0.5));
    else if (l == "laplace") cfg.likelihood = Likelihood::laplace(kv.get_double("tau", std::sqrt(2.0)));
    else if (l == "poisson") cfg.likelihood = Likelihood::poisson();
    else if (l == "onebit") {
      if (kv.has("link_s")) cfg.likelihood = Likelihood::one_bit(LogisticLink(kv.get_double("link_s", 1.0)));
      else cfg.likelihood = Likelihood::one_bit_from_sigma(kv.get_double("link_sigma", 0.1));
    } else throw std::runtime_error("likelihood must be gaussian|laplace|poisson|onebit");
  } else {
    if (kv.has("sigma") && cfg.likelihood.kind() == NoiseKind::Gaussian)
      cfg.likelihood = Likelihood::gaussian(kv.get_double("sigma", 0.5));
    if (kv.has("tau") && cfg.likelihood.kind() == NoiseKind::Laplace)
      cfg.likelihood = Likelihood::laplace(kv.get_double("tau", 1.0));
    if (kv.has("link_sigma") && cfg.likelihood.kind() == NoiseKind::OneBit)
      cfg.likelihood = Likelihood::one_bit_from_sigma(kv.get_double("link_sigma", 0.1));
    if (kv.has("link_s") && cfg.likelihood.kind() == NoiseKind::OneBit)
      cfg.likelihood = Likelihood::one_bit(LogisticLink(kv.get_double("link_s", 1.0)));
  }
  cfg.truth.d_box_true = Box(kv.get_double("d_true_lo", cfg.truth.d_box_true.lo),
                             kv.get_double("d_true_hi", cfg.truth.d_box_true.hi));
  cfg.truth.a_box_true = Box(kv.get_double("a_true_lo", cfg.truth.a_box_true.lo),
                             kv.get_double("a_true_hi", cfg.truth.a_box_true.hi));
  cfg.d_box_est = Box(kv.get_double("d_est_lo", cfg.d_box_est.lo),
                      kv.get_double("d_est_hi", cfg.d_box_est.hi));
  cfg.a_box_est = Box(kv.get_double("a_est_lo", cfg.a_box_est.lo),
                      kv.get_double("a_est_hi", cfg.a_box_est.hi));
  if (kv.has("x_lo") || kv.has("x_hi")) {
    if (!kv.has("x_lo") || !kv.has("x_hi"))
      throw std::runtime_error("x_lo and x_hi must be given together");
    cfg.x_box_override = Box(kv.get_double("x_lo", 0), kv.get_double("x_hi", 0));
  }
  cfg.gamma_grid = kv.get_doubles("gamma_grid", cfg.gamma_grid);
  cfg.lambda_grid = kv.get_doubles("lambda_grid", cfg.lambda_grid);
  cfg.trials = int(kv.get_long("trials", cfg.trials));
  cfg.seed = uint64_t(kv.get_long("seed", long(cfg.seed)));
  cfg.jobs = int(kv.get_long("jobs", cfg.jobs));
  cfg.record_timing = kv.get_bool("record_timing", cfg.record_timing);
  cfg.restarts = int(kv.get_long("restarts", cfg.restarts));
  if (kv.has("methods")) {
    cfg.methods.clear();
    for (const std::string& m : kv.get_strings("methods", {})) cfg.methods.push_back(parse_method(m));
  }
  cfg.nuclear_step = kv.get_double("nuclear_step", cfg.nuclear_step);
  cfg.nuclear_max_iters = int(kv.get_long("nuclear_max_iters", cfg.nuclear_max_iters));

  cfg.solver.eps1 = kv.get_double("solver.eps1", cfg.solver.eps1);
  cfg.solver.eps2 = kv.get_double("solver.eps2", cfg.solver.eps2);
  if (kv.has("solver.delta1_stop")) cfg.solver.delta1_stop = kv.get_double("solver.delta1_stop", 0);
  if (kv.has("solver.delta2_stop")) cfg.solver.delta2_stop = kv.get_double("solver.delta2_stop", 0);
  cfg.solver.eta = kv.get_double("solver.eta", cfg.solver.eta);
  cfg.solver.rho0 = kv.get_double("solver.rho0", cfg.solver.rho0);
  cfg.solver.max_outer_iters = int(kv.get_long("solver.max_outer_iters", cfg.solver.max_outer_iters));
  cfg.solver.max_inner_iters = int(kv.get_long("solver.max_inner_iters", cfg.solver.max_inner_iters));
  cfg.solver.newton_damping_delta =
      kv.get_double("solver.newton_damping_delta", cfg.solver.newton_damping_delta);
  return cfg;
}

/// Builds an ExperimentConfig from parsed config text: the preset key picks
/// the base, every other key overrides it.
inline ExperimentConfig load_experiment_config(const KeyValues& kv,
                                               const std::string& default_preset = "gaussian") {
  return apply_config(kv, preset_config(kv.get_string("preset", default_preset)));
}

}  // namespace sfmc
