// Command-line front end: ground-truth generation, single solves, full
// experiment sweeps, and theoretical bound evaluation.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "sfmc/sfmc.hpp"

namespace {

using namespace sfmc;

std::string likelihood_meta(const Likelihood& lik) {
  std::string s = std::string("likelihood = ") + noise_name(lik.kind()) + "\n";
  switch (lik.kind()) {
    case NoiseKind::Gaussian: s += "sigma = " + fmt_g(lik.sigma()) + "\n"; break;
    case NoiseKind::Laplace: s += "tau = " + fmt_g(lik.tau()) + "\n"; break;
    case NoiseKind::OneBit: s += "link_s = " + fmt_g(lik.link().s) + "\n"; break;
    case NoiseKind::Poisson: break;
  }
  return s;
}

Likelihood likelihood_from_meta(const KeyValues& kv) {
  const std::string name = kv.get_string("likelihood", "gaussian");
  if (name == "gaussian") return Likelihood::gaussian(kv.get_double("sigma", 0.5));
  if (name == "laplace") return Likelihood::laplace(kv.get_double("tau", 1.0));
  if (name == "poisson") return Likelihood::poisson();
  if (name == "onebit") return Likelihood::one_bit(LogisticLink(kv.get_double("link_s", 1.0)));
  throw std::runtime_error("bundle metadata: unknown likelihood " + name);
}

int cmd_generate(const std::string& preset, const std::string& config_path, uint64_t seed,
                 const std::string& out_dir, std::optional<double> gamma) {
  ExperimentConfig cfg = config_path.empty()
                             ? preset_config(preset)
                             : load_experiment_config(KeyValues::parse_file(config_path), preset);
  cfg.seed = seed;

  std::mt19937_64 rng(cfg.seed);
  FactorPair truth = generate_ground_truth(cfg.truth, rng);
  const Matrix x_true = truth.product();
  const Box x_box = cfg.x_box_override ? *cfg.x_box_override
                                       : derive_x_box(x_true, cfg.truth.nonnegative);

  std::filesystem::create_directories(out_dir);
  write_matrix(out_dir + "/d_true.mat", truth.D);
  write_matrix(out_dir + "/a_true.mat", truth.A);
  write_matrix(out_dir + "/x_true.mat", x_true);

  std::string meta;
  meta += "n1 = " + std::to_string(cfg.truth.n1) + "\n";
  meta += "n2 = " + std::to_string(cfg.truth.n2) + "\n";
  meta += "r = " + std::to_string(cfg.truth.r) + "\n";
  meta += likelihood_meta(cfg.likelihood);
  meta += "x_lo = " + fmt_g(x_box.lo) + "\nx_hi = " + fmt_g(x_box.hi) + "\n";
  meta += "d_lo = " + fmt_g(cfg.d_box_est.lo) + "\nd_hi = " + fmt_g(cfg.d_box_est.hi) + "\n";
  meta += "a_lo = " + fmt_g(cfg.a_box_est.lo) + "\na_hi = " + fmt_g(cfg.a_box_est.hi) + "\n";
  meta += "x_min_true = " + fmt_g(x_true.minCoeff()) + "\n";
  meta += "x_max_true = " + fmt_g(x_true.maxCoeff()) + "\n";
  meta += "a_l0 = " + std::to_string(long((truth.A.array() != 0.0).count())) + "\n";
  meta += "seed = " + std::to_string(seed) + "\n";
  if (gamma) {
    SampleMask mask = sample_mask(cfg.truth.n1, cfg.truth.n2, *gamma, rng);
    Problem problem = generate_observations(truth, mask, cfg.likelihood, x_box, cfg.d_box_est,
                                            cfg.a_box_est, rng);
    write_mask(out_dir + "/mask.txt", mask);
    write_observations(out_dir + "/observations.txt", mask, problem.observations);
    meta += "gamma = " + fmt_g(*gamma) + "\n";
  }
  write_text_file(out_dir + "/meta.txt", meta);
  std::cout << "wrote ground-truth bundle to " << out_dir << "\n";
  return 0;
}

int cmd_solve(const std::string& in_dir, const std::string& config_path, uint64_t seed,
              double lambda, const std::string& out_dir) {
  const KeyValues meta = KeyValues::parse_file(in_dir + "/meta.txt");
  const Index n1 = meta.get_long("n1", 0), n2 = meta.get_long("n2", 0);
  const Index r = meta.get_long("r", 0);
  const Likelihood lik = likelihood_from_meta(meta);
  const Box x_box(meta.get_double("x_lo", 0), meta.get_double("x_hi", 0));
  const Box d_box(meta.get_double("d_lo", -2), meta.get_double("d_hi", 2));
  const Box a_box(meta.get_double("a_lo", -40), meta.get_double("a_hi", 40));

  auto [pairs, values] = read_observations(in_dir + "/observations.txt");
  Problem problem(SampleMask(n1, n2, std::move(pairs)), std::move(values), lik, x_box, d_box,
                  a_box, r);

  AdmmConfig solver;
  if (!config_path.empty()) {
    ExperimentConfig cfg = load_experiment_config(KeyValues::parse_file(config_path));
    solver = cfg.solver;
  }
  solver.lambda = lambda;

  std::mt19937_64 rng(seed);
  AdmmResult res = admm_solve(problem, solver, std::nullopt, rng);

  const std::string dir = out_dir.empty() ? in_dir : out_dir;
  std::filesystem::create_directories(dir);
  write_matrix(dir + "/x_hat.mat", res.factors.product());
  write_matrix(dir + "/d_hat.mat", res.factors.D);
  write_matrix(dir + "/a_hat.mat", res.factors.A);
  std::string trace = "iter,delta1,delta2,rho,objective\n";
  for (size_t k = 0; k < res.trace.size(); ++k)
    trace += std::to_string(k) + ',' + fmt_g(res.trace[k].delta1) + ',' +
             fmt_g(res.trace[k].delta2) + ',' + fmt_g(res.trace[k].rho) + ',' +
             fmt_g(res.trace[k].objective) + '\n';
  write_text_file(dir + "/trace.csv", trace);

  std::cout << (res.converged ? "converged" : "hit iteration cap") << " after "
            << res.outer_iters << " outer iterations\n";
  if (std::filesystem::exists(in_dir + "/x_true.mat")) {
    const Matrix x_true = read_matrix(in_dir + "/x_true.mat");
    std::cout << "per-element mse vs truth: "
              << fmt_g(frobenius_mse(res.factors.product(), x_true)) << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& preset, const std::string& config_path,
                   std::optional<uint64_t> seed, const std::string& out_dir,
                   std::optional<int> jobs) {
  ExperimentConfig cfg = config_path.empty()
                             ? preset_config(preset)
                             : load_experiment_config(KeyValues::parse_file(config_path), preset);
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = *jobs;

  ExperimentResult result = run_experiment(cfg);
  emit_outputs(result.rows, result.summary, out_dir, cfg.likelihood.kind());

  std::printf("%-8s %-10s %-12s %-14s %-12s\n", "gamma", "method", "best_lambda", "mean_mse",
              "stderr");
  for (const SummaryRow& s : result.summary)
    std::printf("%-8g %-10s %-12g %-14.6g %-12.4g\n", s.gamma, method_name(s.method),
                s.best_lambda, s.mean_mse, s.stderr_mse);
  for (Method m : cfg.methods) {
    const auto pts = summary_points(result, m);
    if (pts.size() >= 2)
      std::cout << "log-log slope (" << method_name(m) << "): " << fmt_g(estimate_slope(pts), 4)
                << "\n";
  }
  std::cout << "outputs in " << out_dir << "\n";
  return 0;
}

int cmd_bounds(const std::string& model, long n1, long n2, long r, long m, long a_l0, double p,
               double amax, double xmax, double xmin, double sigma, double tau, double link_s) {
  BoundInputs in;
  in.n1 = n1;
  in.n2 = n2;
  in.r = r;
  in.m = m;
  if (a_l0 >= 0) in.a_l0 = a_l0;
  if (p > 0) in.p = p;
  in.a_max = amax;
  in.x_max = xmax;
  if (xmin > 0) in.x_min = xmin;
  if (model == "gaussian") in.noise = Likelihood::gaussian(sigma);
  else if (model == "laplace") in.noise = Likelihood::laplace(tau);
  else if (model == "poisson") in.noise = Likelihood::poisson();
  else if (model == "onebit") in.noise = Likelihood::one_bit(LogisticLink(link_s));
  else throw std::runtime_error("bounds: unknown model " + model);

  const BoundValue b = corollary_bound(in);
  std::cout << "beta       = " << fmt_g(b.beta) << "\n";
  std::cout << "C_D        = " << fmt_g(b.cd) << "\n";
  std::cout << "lambda     = " << fmt_g(b.lambda) << "\n";
  std::cout << "mse bound  = " << fmt_g(b.value) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse factor matrix completion toolkit"};
  app.require_subcommand(1);

  std::string preset = "gaussian", config_path, out_dir = "out", in_dir;
  uint64_t seed = 1;
  std::optional<uint64_t> seed_opt;
  std::optional<int> jobs_opt;
  std::optional<double> gamma_opt;
  double lambda = 0.0;

  auto* gen = app.add_subcommand("generate", "write a ground-truth bundle");
  gen->add_option("--preset", preset, "gaussian|laplace|poisson|onebit|compare62");
  gen->add_option("--config", config_path, "flat key=value config file");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--gamma", gamma_opt, "also sample a mask and observations at this rate");

  auto* solve = app.add_subcommand("solve", "solve a single problem from files");
  solve->add_option("--in", in_dir, "bundle directory with meta.txt and observations.txt")->required();
  solve->add_option("--config", config_path, "solver overrides (flat key=value)");
  solve->add_option("--seed", seed, "rng seed for the initialization");
  solve->add_option("--lambda", lambda, "sparsity penalty");
  solve->add_option("--out", out_dir, "output directory (defaults to the bundle)");

  auto* exp = app.add_subcommand("experiment", "run a full (gamma, lambda) sweep");
  exp->add_option("--preset", preset, "gaussian|laplace|poisson|onebit|compare62");
  exp->add_option("--config", config_path, "flat key=value config file");
  exp->add_option("--seed", seed_opt, "rng seed");
  exp->add_option("--out", out_dir, "output directory");
  exp->add_option("--jobs", jobs_opt, "worker threads for sweep cells");

  auto* bounds = app.add_subcommand("bounds", "evaluate a corollary error bound");
  std::string model = "gaussian";
  long n1 = 100, n2 = 1000, r = 20, m = 100000, a_l0 = -1;
  double p = 0, amax = 20, xmax = 2, xmin = 0, sigma = 1, tau = 1, link_s = 1;
  bounds->add_option("--model", model, "gaussian|laplace|poisson|onebit");
  bounds->add_option("--n1", n1);
  bounds->add_option("--n2", n2);
  bounds->add_option("--r", r);
  bounds->add_option("--m", m, "nominal observation count");
  bounds->add_option("--a-l0", a_l0, "||A*||_0 (sparse case)");
  bounds->add_option("--p", p, "weak-lp exponent (approximately sparse case)");
  bounds->add_option("--amax", amax);
  bounds->add_option("--xmax", xmax);
  bounds->add_option("--xmin", xmin, "minimum rate (Poisson)");
  bounds->add_option("--sigma", sigma);
  bounds->add_option("--tau", tau);
  bounds->add_option("--link-s", link_s, "logistic link scale");

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return cmd_generate(preset, config_path, seed, out_dir, gamma_opt);
    if (solve->parsed()) {
      std::string solve_out = solve->count("--out") ? out_dir : "";
      return cmd_solve(in_dir, config_path, seed, lambda, solve_out);
    }
    if (exp->parsed()) return cmd_experiment(preset, config_path, seed_opt, out_dir, jobs_opt);
    if (bounds->parsed())
      return cmd_bounds(model, n1, n2, r, m, a_l0, p, amax, xmax, xmin, sigma, tau, link_s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
