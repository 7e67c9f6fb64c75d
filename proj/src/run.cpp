#include "dphase/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <thread>

namespace dphase {

ScalarField make_rhs(RhsPreset preset, double scale, double sigma, int blocks, const GridPtr& grid) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_rhs: sigma must be positive");
  if (blocks < 1) throw std::invalid_argument("make_rhs: blocks must be positive");
  ScalarField f(grid);
  const Point c = grid->center();
  const int n = grid->dim();
  for (std::size_t node = 0; node < grid->node_count(); ++node) {
    const Point x = grid->node_position(node);
    double v = scale;
    if (preset == RhsPreset::gaussian_bump) {
      double r2 = 0.0;
      for (int d = 0; d < n; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
      v = scale * std::exp(-r2 / (sigma * sigma));
    } else if (preset == RhsPreset::checker) {
      int parity = 0;
      for (int d = 0; d < n; ++d) {
        const int b = static_cast<int>(std::floor((x[d] - grid->origin()) / grid->side() * blocks));
        parity += std::clamp(b, 0, blocks - 1);
      }
      v = parity % 2 == 0 ? scale : -scale;
    }
    f.values[node] = v;
  }
  return f;
}

ScalarField make_rhs(const RunConfig& config, const GridPtr& grid) {
  return make_rhs(config.rhs_preset, config.rhs_scale, config.rhs_sigma, config.rhs_blocks, grid);
}

WeightField make_weight(const RunConfig& config, const GridPtr& grid) {
  WeightParams params;
  params.c = config.weight_c;
  params.k = config.weight_k;
  params.r0 = config.weight_r0;
  return make_weight(config.weight_preset, params, grid);
}

ContinuationConfig continuation_config(const RunConfig& config) {
  ContinuationConfig cc;
  cc.q = config.q;
  cc.p_schedule = ContinuationConfig::default_schedule(config.k_max.value_or(10));
  cc.epsilon0 = config.epsilon0;
  cc.solver.tol = config.solver_tol;
  cc.solver.max_iter = config.max_iter;
  cc.strict_h0 = config.strict_h0;
  return cc;
}

int sweep_workers(int jobs) {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("DPHASE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1, std::min(cap, jobs));
}

std::string indexed_path(const std::string& path, std::size_t index) {
  const std::filesystem::path p(path);
  auto name = p.stem().string() + "_" + std::to_string(index) + p.extension().string();
  return (p.parent_path() / name).string();
}

namespace {

struct Problem {
  GridPtr grid;
  WeightField a;
};

Problem build_problem(const RunConfig& config) {
  auto grid = build_grid(config.dim, config.resolution, config.shape);
  auto a = make_weight(config, grid);
  return {grid, std::move(a)};
}

AqOptions aq_options(const RunConfig& config) {
  AqOptions opts;
  opts.floor_relative = config.aq_floor;
  return opts;
}

void write_outputs(RunSummary& s) {
  try {
    if (!s.config.csv_path.empty() && !s.steps.empty()) emit_csv(s.steps, s.config.csv_path);
    if (!s.config.json_path.empty()) write_json(s, s.config.json_path);
  } catch (const std::exception& e) {
    s.exit_code = kExitConfig;
    s.message = e.what();
  }
}

void run_check_weight(RunSummary& s) {
  const auto problem = build_problem(s.config);
  s.h0 = check_h0(problem.a, s.config.q, s.config.dim, s.config.p_min(), aq_options(s.config));
  s.exit_code = s.h0->verdict == Verdict::fail ? kExitCertificateFailed : kExitOk;
  s.message = "weight check: " + std::string(to_string(s.h0->verdict));
}

void run_solve(RunSummary& s) {
  const auto& cfg = s.config;
  const auto problem = build_problem(cfg);
  const auto f = make_rhs(cfg, problem.grid);
  // Informational here; the weight hypothesis is only stated for p < q.
  if (*cfg.p < cfg.q) s.h0 = check_h0(problem.a, cfg.q, cfg.dim, *cfg.p, aq_options(cfg));
  s.smallness = smallness_check(f, cfg.dim);

  auto cc = continuation_config(cfg);
  cc.p_schedule = {*cfg.p};
  const auto params = cc.params_for(*cfg.p);
  const auto result = solve_fixed_p(params, problem.a, f);

  auto diag = step_diagnostics(result.u, ScalarField(problem.grid), *cfg.p, cc, problem.a, f);
  diag.iterations = result.iterations;
  diag.converged = result.converged;
  s.steps.push_back(diag);
  s.solve = SolveSummary{*cfg.p,          params.epsilon,       result.energy,      result.grad_sup,
                         result.residual, result.u.sup_norm(), result.iterations, result.converged};
  s.exit_code = result.converged ? kExitOk : kExitNoConvergence;
  s.message = result.converged ? "converged" : "solver did not converge";
}

void run_continue(RunSummary& s) {
  const auto& cfg = s.config;
  const auto problem = build_problem(cfg);
  const auto f = make_rhs(cfg, problem.grid);
  const auto cc = continuation_config(cfg);
  cc.validate(cfg.dim);

  s.h0 = check_h0(problem.a, cfg.q, cfg.dim, cc.p_schedule.back(), aq_options(cfg));
  s.smallness = smallness_check(f, cfg.dim);
  if (s.h0->verdict == Verdict::fail) {
    s.exit_code = kExitConfig;
    s.message = "weight fails the structural hypothesis (boundary minimum or A_q constant)";
    return;
  }

  const auto result = run_continuation(cc, problem.a, f);
  s.steps = result.steps;
  s.certificate = result.certificate;
  if (result.aborted) {
    s.exit_code = kExitNoConvergence;
    s.message = result.message;
    return;
  }
  if (cfg.uniqueness_seeds >= 2) {
    try {
      s.uniqueness_gap = uniqueness_probe(cc, problem.a, f, cfg.uniqueness_seeds, cfg.seed);
    } catch (const std::runtime_error& e) {
      s.exit_code = kExitNoConvergence;
      s.message = e.what();
      return;
    }
  }

  const auto verdict = result.certificate.verdict;
  s.exit_code = verdict == CertificateVerdict::failed ? kExitCertificateFailed : kExitOk;
  s.message = "certificate: " + std::string(to_string(verdict));
}

RunSummary run_one(const RunConfig& config);

void run_sweep(RunSummary& s) {
  const auto& cfg = s.config;
  auto base = to_entries(cfg);
  base.erase("sweep.key");
  base.erase("sweep.values");
  base["mode"] = "continue";

  const std::size_t jobs = cfg.sweep_values.size();
  s.runs.resize(jobs);
  std::vector<RunConfig> configs(jobs);
  for (std::size_t i = 0; i < jobs; ++i) {
    auto entries = base;
    entries[cfg.sweep_key] = cfg.sweep_values[i];
    if (!cfg.csv_path.empty()) entries["output.csv_path"] = indexed_path(cfg.csv_path, i);
    if (!cfg.json_path.empty()) entries["output.json_path"] = indexed_path(cfg.json_path, i);
    std::string text;
    for (const auto& [k, v] : entries) text += k + " = " + v + "\n";
    try {
      configs[i] = parse_config(text);
    } catch (const ConfigError& e) {
      s.runs[i].config = cfg;
      s.runs[i].exit_code = kExitConfig;
      s.runs[i].message = "sweep value '" + cfg.sweep_values[i] + "': " + e.what();
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++)
      if (s.runs[i].exit_code != kExitConfig) s.runs[i] = run_one(configs[i]);
  };
  std::vector<std::jthread> pool;
  const int workers = sweep_workers(static_cast<int>(jobs));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();

  // Severity order: config error, non-convergence, failed certificate, ok.
  auto rank = [](int code) {
    switch (code) {
      case kExitConfig: return 3;
      case kExitNoConvergence: return 2;
      case kExitCertificateFailed: return 1;
      default: return 0;
    }
  };
  int worst = kExitOk;
  for (const auto& r : s.runs)
    if (rank(r.exit_code) > rank(worst)) worst = r.exit_code;
  s.exit_code = worst;
  s.message = "sweep over " + cfg.sweep_key + ": " + std::to_string(jobs) + " runs";
}

RunSummary run_one(const RunConfig& config) {
  RunSummary s;
  s.config = config;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.mode) {
      case Mode::check_weight: run_check_weight(s); break;
      case Mode::solve: run_solve(s); break;
      case Mode::continuation: run_continue(s); break;
      case Mode::sweep: run_sweep(s); break;
    }
  } catch (const std::exception& e) {
    s.exit_code = kExitConfig;
    s.message = e.what();
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Sweeps have no steps of their own, so only the JSON summary is written.
  write_outputs(s);
  return s;
}

}  // namespace

RunSummary run(const RunConfig& config) { return run_one(config); }

}  // namespace dphase
