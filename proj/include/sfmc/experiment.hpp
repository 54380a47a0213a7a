#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sfmc/baselines.hpp"
#include "sfmc/io.hpp"
#include "sfmc/solver.hpp"
#include "sfmc/synth.hpp"

namespace sfmc {

enum class Method { AdmmL0, AdmmL1, Nuclear };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::AdmmL0: return "admm_l0";
    case Method::AdmmL1: return "admm_l1";
    case Method::Nuclear: return "nuclear";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "admm_l0") return Method::AdmmL0;
  if (s == "admm_l1") return Method::AdmmL1;
  if (s == "nuclear") return Method::Nuclear;
  throw std::invalid_argument("unknown method: " + s);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic per-cell seed: the experiment seed mixed with the gamma
/// index, lambda index, trial index, and a hash of the method name, so no
/// two sweep cells share a random stream.
inline uint64_t cell_seed(uint64_t seed, size_t gamma_idx, size_t lambda_idx, size_t trial,
                          std::string_view method) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (uint64_t(gamma_idx) + 1));
  h = splitmix64(h ^ (uint64_t(lambda_idx) + 1));
  h = splitmix64(h ^ (uint64_t(trial) + 1));
  uint64_t fnv = 1469598103934665603ull;
  for (char c : method) fnv = (fnv ^ uint64_t(uint8_t(c))) * 1099511628211ull;
  return splitmix64(h ^ fnv);
}

/// Full sweep description: ground truth recipe, likelihood, estimation boxes,
/// the (gamma, lambda) grids, trial count, solver settings, and methods.
struct ExperimentConfig {
  GroundTruthSpec truth;
  Likelihood likelihood = Likelihood::gaussian(0.5);
  Box d_box_est{-2.0, 2.0};
  Box a_box_est{-40.0, 40.0};
  std::optional<Box> x_box_override;
  std::vector<double> gamma_grid;
  std::vector<double> lambda_grid;
  int trials = 20;
  uint64_t seed = 1;
  AdmmConfig solver;
  std::vector<Method> methods{Method::AdmmL0};
  int jobs = 1;
  bool record_timing = true;
  int restarts = 1;  // ADMM runs per cell; the best data objective wins
  double nuclear_step = 0.5;
  int nuclear_max_iters = 300;

  void validate() const {
    truth.validate();
    if (gamma_grid.empty() || lambda_grid.empty())
      throw std::invalid_argument("ExperimentConfig: grids must be nonempty");
    for (double g : gamma_grid)
      if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("ExperimentConfig: gamma in (0, 1]");
    for (double l : lambda_grid)
      if (!(l >= 0.0)) throw std::invalid_argument("ExperimentConfig: lambda >= 0");
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials >= 1");
    if (restarts < 1) throw std::invalid_argument("ExperimentConfig: restarts >= 1");
    if (methods.empty()) throw std::invalid_argument("ExperimentConfig: methods must be nonempty");
  }
};

struct ResultRow {
  double gamma = 0.0;
  double lambda = 0.0;
  int trial = 0;
  Method method = Method::AdmmL0;
  double mse = 0.0;
  int outer_iters = 0;
  double runtime_ms = 0.0;
  bool converged = false;
};

struct SummaryRow {
  double gamma = 0.0;
  Method method = Method::AdmmL0;
  double best_lambda = 0.0;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  FactorPair truth;
  Matrix x_true;
  Box x_box;
  double x_min_true = 0.0;
  double x_max_true = 0.0;
  long a_l0 = 0;
};

/// Ordinary least-squares slope of log10(mse) against log10(gamma).
inline double estimate_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("estimate_slope: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [g, e] : points) {
    if (!(g > 0.0) || !(e > 0.0)) throw std::invalid_argument("estimate_slope: values must be positive");
    const double x = std::log10(g), y = std::log10(e);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = double(points.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("estimate_slope: gammas must not be identical");
  return (n * sxy - sx * sy) / denom;
}

/// Runs the full (gamma, lambda, trial, method) sweep against one fixed
/// ground truth. Each cell draws a fresh mask and fresh observations from its
/// own seeded stream, so results are identical for any jobs count. Failed
/// cells are recorded with converged = false and an infinite error.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;

  std::mt19937_64 truth_rng(config.seed);
  out.truth = generate_ground_truth(config.truth, truth_rng);
  out.x_true = out.truth.product();
  out.x_min_true = out.x_true.minCoeff();
  out.x_max_true = out.x_true.maxCoeff();
  out.a_l0 = long((out.truth.A.array() != 0.0).count());
  out.x_box = config.x_box_override ? *config.x_box_override
                                    : derive_x_box(out.x_true, config.truth.nonnegative);

  struct Cell {
    size_t gi, li, mi;
    int trial;
  };
  std::vector<Cell> cells;
  for (size_t gi = 0; gi < config.gamma_grid.size(); ++gi)
    for (size_t li = 0; li < config.lambda_grid.size(); ++li)
      for (int trial = 0; trial < config.trials; ++trial)
        for (size_t mi = 0; mi < config.methods.size(); ++mi)
          cells.push_back({gi, li, mi, trial});
  out.rows.resize(cells.size());

  auto run_cell = [&](const Cell& cell, ResultRow& row) {
    const double gamma = config.gamma_grid[cell.gi];
    const double lambda = config.lambda_grid[cell.li];
    const Method method = config.methods[cell.mi];
    row.gamma = gamma;
    row.lambda = lambda;
    row.trial = cell.trial;
    row.method = method;
    std::mt19937_64 rng(cell_seed(config.seed, cell.gi, cell.li, size_t(cell.trial),
                                  method_name(method)));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SampleMask mask = sample_mask(config.truth.n1, config.truth.n2, gamma, rng);
      Problem problem = generate_observations(out.truth, mask, config.likelihood, out.x_box,
                                              config.d_box_est, config.a_box_est, rng);
      switch (method) {
        case Method::AdmmL0:
        case Method::AdmmL1: {
          AdmmConfig cfg = config.solver;
          cfg.lambda = lambda;
          // The objective is nonconvex; restart from fresh initializations and
          // keep the run with the best penalized data objective.
          AdmmResult best;
          double best_obj = kInf;
          for (int s = 0; s < config.restarts; ++s) {
            AdmmResult res = method == Method::AdmmL0
                                 ? admm_solve(problem, cfg, std::nullopt, rng)
                                 : admm_solve_l1(problem, cfg, std::nullopt, rng);
            const Matrix Xhat = project_box(res.factors.product(), out.x_box);
            const double pen = method == Method::AdmmL0
                                   ? lambda * double((res.factors.A.array() != 0.0).count())
                                   : lambda * res.factors.A.cwiseAbs().sum();
            const double obj = problem.data_loss(Xhat) + pen;
            if (obj < best_obj) {
              best_obj = obj;
              best = std::move(res);
            }
          }
          row.mse = frobenius_mse(best.factors.product(), out.x_true);
          row.outer_iters = best.outer_iters;
          row.converged = best.converged;
          break;
        }
        case Method::Nuclear: {
          NuclearResult res = nuclear_norm_complete(problem, lambda, config.nuclear_step,
                                                    config.nuclear_max_iters);
          row.mse = frobenius_mse(res.X, out.x_true);
          row.outer_iters = res.iters;
          row.converged = !res.cap_reached;
          break;
        }
      }
    } catch (const std::exception&) {
      row.mse = kInf;
      row.converged = false;
    }
    if (config.record_timing) {
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (size_t c = 0; c < cells.size(); ++c) run_cell(cells[c], out.rows[c]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (size_t c = next.fetch_add(1); c < cells.size(); c = next.fetch_add(1))
          run_cell(cells[c], out.rows[c]);
      });
    for (auto& t : workers) t.join();
  }

  // Per-(gamma, method) mean over trials for each lambda; keep the best.
  for (size_t gi = 0; gi < config.gamma_grid.size(); ++gi) {
    for (size_t mi = 0; mi < config.methods.size(); ++mi) {
      SummaryRow best;
      best.gamma = config.gamma_grid[gi];
      best.method = config.methods[mi];
      double best_mean = kInf;
      bool found = false;
      for (size_t li = 0; li < config.lambda_grid.size(); ++li) {
        double sum = 0.0, sum_sq = 0.0;
        int n = 0;
        for (const ResultRow& row : out.rows) {
          if (row.gamma == config.gamma_grid[gi] && row.lambda == config.lambda_grid[li] &&
              row.method == config.methods[mi]) {
            sum += row.mse;
            sum_sq += row.mse * row.mse;
            ++n;
          }
        }
        const double mean = sum / double(n);
        if (!found || mean < best_mean) {
          found = true;
          best_mean = mean;
          best.best_lambda = config.lambda_grid[li];
          best.mean_mse = mean;
          const double var = n > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / double(n - 1)) : 0.0;
          best.stderr_mse = std::sqrt(var / double(n));
        }
      }
      out.summary.push_back(best);
    }
  }
  return out;
}

/// Points (gamma, mean best-lambda mse) for one method, for slope fitting.
inline std::vector<std::pair<double, double>> summary_points(const ExperimentResult& result,
                                                             Method method) {
  std::vector<std::pair<double, double>> pts;
  for (const SummaryRow& s : result.summary)
    if (s.method == method) pts.emplace_back(s.gamma, s.mean_mse);
  return pts;
}

inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string s = "gamma,lambda,trial,method,mse,outer_iters,runtime_ms,converged\n";
  for (const ResultRow& r : rows) {
    s += fmt_g(r.gamma) + ',' + fmt_g(r.lambda) + ',' + std::to_string(r.trial) + ',' +
         method_name(r.method) + ',' + fmt_g(r.mse) + ',' + std::to_string(r.outer_iters) + ',' +
         fmt_g(r.runtime_ms) + ',' + (r.converged ? "true" : "false") + '\n';
  }
  return s;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "gamma,method,best_lambda,mean_mse,stderr_mse\n";
  for (const SummaryRow& r : rows) {
    s += fmt_g(r.gamma) + ',' + method_name(r.method) + ',' + fmt_g(r.best_lambda) + ',' +
         fmt_g(r.mean_mse) + ',' + fmt_g(r.stderr_mse) + '\n';
  }
  return s;
}

namespace detail {

inline void append_marker(std::string& svg, Method m, double x, double y, const std::string& color) {
  char buf[256];
  switch (m) {
    case Method::AdmmL0:
      std::snprintf(buf, sizeof(buf),
                    "<rect x='%.2f' y='%.2f' width='8' height='8' fill='none' stroke='%s'/>",
                    x - 4.0, y - 4.0, color.c_str());
      break;
    case Method::AdmmL1:
      std::snprintf(buf, sizeof(buf),
                    "<path d='M %.2f %.2f l 5 5 l -5 5 l -5 -5 z' fill='none' stroke='%s'/>",
                    x, y - 5.0, color.c_str());
      break;
    case Method::Nuclear:
      std::snprintf(buf, sizeof(buf), "<circle cx='%.2f' cy='%.2f' r='4' fill='none' stroke='%s'/>",
                    x, y, color.c_str());
      break;
  }
  svg += buf;
  svg += '\n';
}

}  // namespace detail

/// Self-contained SVG log-log plot of mean best-lambda error against sampling
/// rate, one polyline and marker style per method.
inline std::string loglog_svg(const std::vector<SummaryRow>& summary, const std::string& title) {
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const SummaryRow& s : summary) {
    if (!(s.gamma > 0.0) || !(s.mean_mse > 0.0)) continue;
    xmin = std::min(xmin, std::log10(s.gamma));
    xmax = std::max(xmax, std::log10(s.gamma));
    ymin = std::min(ymin, std::log10(s.mean_mse));
    ymax = std::max(ymax, std::log10(s.mean_mse));
  }
  if (!(xmin <= xmax)) throw std::invalid_argument("loglog_svg: no positive data");
  if (xmax - xmin < 1e-9) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-9) { ymin -= 0.5; ymax += 0.5; }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double lg) { return ml + (lg - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double lg) { return H - mb - (lg - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='480' "
                    "font-family='sans-serif' font-size='12'>\n<rect width='640' height='480' fill='white'/>\n";
  char buf[512];
  std::snprintf(buf, sizeof(buf), "<text x='%.0f' y='24' font-size='15'>%s</text>\n", ml, title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='black'/>\n"
                "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='black'/>\n",
                ml, H - mb, W - mr, H - mb, ml, mt, ml, H - mb);
  svg += buf;
  svg += "<text x='" + fmt_g((ml + W - mr) / 2, 4) + "' y='" + fmt_g(H - 12, 4) +
         "' text-anchor='middle'>sampling rate (log10)</text>\n";
  svg += "<text x='18' y='" + fmt_g((mt + H - mb) / 2, 4) +
         "' text-anchor='middle' transform='rotate(-90 18 " + fmt_g((mt + H - mb) / 2, 4) +
         ")'>per-element error (log10)</text>\n";

  // Decade (and data-point) ticks.
  for (double d = std::ceil(ymin); d <= std::floor(ymax) + 1e-12; d += 1.0) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1='%.1f' y1='%.2f' x2='%.1f' y2='%.2f' stroke='#cccccc'/>"
                  "<text x='%.1f' y='%.2f' text-anchor='end'>%g</text>\n",
                  ml, py(d), W - mr, py(d), ml - 6, py(d) + 4, d);
    svg += buf;
  }
  std::vector<double> gammas;
  for (const SummaryRow& s : summary)
    if (std::find(gammas.begin(), gammas.end(), s.gamma) == gammas.end()) gammas.push_back(s.gamma);
  std::sort(gammas.begin(), gammas.end());
  for (double g : gammas) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1='%.2f' y1='%.1f' x2='%.2f' y2='%.1f' stroke='black'/>"
                  "<text x='%.2f' y='%.1f' text-anchor='middle'>%g</text>\n",
                  px(std::log10(g)), H - mb, px(std::log10(g)), H - mb + 5, px(std::log10(g)),
                  H - mb + 18, g);
    svg += buf;
  }

  const char* colors[] = {"#1f6fb2", "#c44e52", "#2a8f5c"};
  std::vector<Method> methods;
  for (const SummaryRow& s : summary)
    if (std::find(methods.begin(), methods.end(), s.method) == methods.end())
      methods.push_back(s.method);
  for (size_t mi = 0; mi < methods.size(); ++mi) {
    const std::string color = colors[mi % 3];
    std::string pts;
    std::vector<std::pair<double, double>> coords;
    for (double g : gammas)
      for (const SummaryRow& s : summary)
        if (s.method == methods[mi] && s.gamma == g && s.mean_mse > 0.0)
          coords.emplace_back(px(std::log10(g)), py(std::log10(s.mean_mse)));
    for (const auto& [x, y] : coords) pts += fmt_g(x, 6) + ',' + fmt_g(y, 6) + ' ';
    svg += "<polyline points='" + pts + "' fill='none' stroke='" + color + "'/>\n";
    for (const auto& [x, y] : coords) detail::append_marker(svg, methods[mi], x, y, color);
    std::snprintf(buf, sizeof(buf), "<text x='%.1f' y='%.1f' fill='%s'>%s</text>\n", W - mr - 120.0,
                  mt + 16.0 * (mi + 1), color.c_str(), method_name(methods[mi]));
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

/// Writes results.csv, summary.csv, and (when there is data) one log-log SVG
/// plot named after the likelihood.
inline void emit_outputs(const std::vector<ResultRow>& rows, const std::vector<SummaryRow>& summary,
                         const std::string& output_dir, NoiseKind likelihood) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create directory " + output_dir);
  write_text_file(output_dir + "/results.csv", results_csv(rows));
  write_text_file(output_dir + "/summary.csv", summary_csv(summary));
  if (!rows.empty()) {
    const std::string name = std::string("error_decay_") + noise_name(likelihood) + ".svg";
    write_text_file(output_dir + "/" + name,
                    loglog_svg(summary, std::string("error decay, ") + noise_name(likelihood)));
  }
}

}  // namespace sfmc
