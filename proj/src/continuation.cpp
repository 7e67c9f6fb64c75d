#include "dphase/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dphase {

std::vector<double> ContinuationConfig::default_schedule(int k_max) {
  if (k_max < 1) throw std::invalid_argument("schedule depth k_max must be at least 1");
  std::vector<double> s;
  for (int k = 1; k <= k_max; ++k) s.push_back(1.0 + std::ldexp(1.0, -k));
  return s;
}

SolveParams ContinuationConfig::params_for(double p) const {
  SolveParams sp = solver;
  sp.exponents = ExponentPair(p, q);
  sp.epsilon = epsilon_for(p);
  return sp;
}

void ContinuationConfig::validate(int n) const {
  if (p_schedule.empty()) throw std::invalid_argument("p schedule is empty");
  for (std::size_t i = 0; i < p_schedule.size(); ++i) {
    const double p = p_schedule[i];
    if (!(p > 1.0)) throw std::invalid_argument("p schedule values must exceed 1");
    if (i > 0 && !(p < p_schedule[i - 1])) throw std::invalid_argument("p schedule must be strictly decreasing");
    if (strict_h0 && !(q / p < 1.0 + 1.0 / n)) {
      std::ostringstream msg;
      msg << "(H_0) violation: q/p = " << q / p << " >= 1 + 1/n = " << 1.0 + 1.0 / n << " at p = " << p;
      throw std::invalid_argument(msg.str());
    }
  }
  if (!(epsilon0 >= 0.0)) throw std::invalid_argument("epsilon0 must be non-negative");
  for (double r : flux_r_list)
    if (!(r >= 1.0)) throw std::invalid_argument("flux r values must be at least 1");
  solver.validate();
}

std::string_view to_string(CertificateVerdict verdict) {
  switch (verdict) {
    case CertificateVerdict::certified: return "certified";
    case CertificateVerdict::failed: return "failed";
    case CertificateVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double pairing_ratio(const VectorField& z, const ScalarField& u) {
  if (z.grid != u.grid) throw std::invalid_argument("pairing_ratio: fields live on different grids");
  const auto xi = gradient(u);
  const auto& grid = *u.grid;
  const double num = integrate(grid, dot(z, xi));
  const double den = integrate(grid, xi.magnitudes());
  constexpr double tiny = 1e-14;
  if (std::abs(num) < tiny && den < tiny) return 1.0;
  return num / std::max(den, tiny);
}

double monotone_gap(const ScalarField& u_p, const ScalarField& u_ref, double q, const WeightField& a) {
  if (u_p.grid != u_ref.grid || u_p.grid != a.grid) throw std::invalid_argument("monotone_gap: grid mismatch");
  const auto xi = gradient(u_p);
  const auto eta = gradient(u_ref);
  const int dim = u_p.grid->dim();
  std::vector<double> integrand(xi.cell_count(), 0.0);
  for (std::size_t c = 0; c < integrand.size(); ++c) {
    if (a.values[c] == 0.0) continue;
    const auto x = xi.at(c);
    const auto y = eta.at(c);
    double sx = 0.0, sy = 0.0;
    for (int d = 0; d < dim; ++d) {
      sx += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
      sy += y[static_cast<std::size_t>(d)] * y[static_cast<std::size_t>(d)];
    }
    const double fx = sx > 0.0 ? std::pow(sx, 0.5 * (q - 2.0)) : 0.0;
    const double fy = sy > 0.0 ? std::pow(sy, 0.5 * (q - 2.0)) : 0.0;
    double v = 0.0;
    for (int d = 0; d < dim; ++d) {
      const auto k = static_cast<std::size_t>(d);
      v += (fx * x[k] - fy * y[k]) * (x[k] - y[k]);
    }
    integrand[c] = a.values[c] * v;
  }
  return integrate(*u_p.grid, integrand);
}

double poincare_ratio(const ScalarField& u, const WeightField& a, const ExponentPair& e) {
  const double grad_norm = luxemburg_norm(gradient(u), a, e, ModularKind::theta_p);
  if (!(grad_norm > 0.0)) throw std::domain_error("poincare_ratio is undefined for the zero field");
  return luxemburg_norm(u, a, e, ModularKind::theta_p) / grad_norm;
}

StepDiagnostics step_diagnostics(const ScalarField& u_p, const ScalarField& u_prev, double p,
                                 const ContinuationConfig& config, const WeightField& a, const ScalarField& f) {
  const int n = u_p.grid->dim();
  const SolveParams params = config.params_for(p);
  const ExponentPair e = params.exponents;
  const auto xi = gradient(u_p);

  StepDiagnostics s;
  s.p = p;
  s.epsilon = params.epsilon;
  s.lambda_p = luxemburg_norm(xi, a, e, ModularKind::theta_p);
  s.weighted_q = weighted_lq_norm(xi, a, config.q);

  const auto z = flux(u_p, p, params.epsilon);
  for (double r : config.flux_r_list) s.flux_lr.emplace_back(r, lr_norm(z, r));
  s.flux_sup = z.sup_magnitude();

  auto diff = xi;
  const auto prev = gradient(u_prev);
  for (std::size_t i = 0; i < diff.components.size(); ++i) diff.components[i] -= prev.components[i];
  s.theta0_diff_prev = luxemburg_norm(diff, a, e, ModularKind::theta_0);

  s.pairing_ratio = pairing_ratio(z, u_p);
  s.residual = weak_residual(u_p, params, a, f);
  s.ratio_ok = config.q / p < 1.0 + 1.0 / n;
  s.energy = energy(u_p, params, a, f);
  return s;
}

namespace {

LimitCertificate assemble_certificate(const ContinuationResult& run, const ContinuationConfig& config,
                                      const WeightField& a, const ScalarField& f) {
  LimitCertificate cert;
  const auto small = smallness_check(f, f.grid->dim());
  cert.smallness_lhs = small.lhs;
  cert.smallness_pass = small.pass;
  if (run.steps.empty()) return cert;

  const auto& last = run.steps.back();
  cert.flux_sup_final = last.flux_sup;
  cert.pairing_ratio_final = last.pairing_ratio;
  cert.residual_final = last.residual;
  const double first = run.steps.front().theta0_diff_prev;
  cert.theta0_cauchy = last.theta0_diff_prev <= cert.tolerances.theta0 * (first + 1e-12);
  if (run.aborted) return cert;

  // Sensitivity to the regularization: re-solve the final step at eps/2.
  SolveParams half = config.params_for(last.p);
  half.epsilon *= 0.5;
  const auto resolved = solve_fixed_p(half, a, f, run.u);
  const double base = run.u.sup_norm();
  double diff = 0.0;
  for (std::size_t i = 0; i < run.u.values.size(); ++i)
    diff = std::max(diff, std::abs(resolved.u.values[i] - run.u.values[i]));
  cert.eps_sensitivity = base > 0.0 ? diff / base : diff;

  const auto& tol = cert.tolerances;
  const bool ok = cert.flux_sup_final <= 1.0 + tol.flux &&
                  std::abs(cert.pairing_ratio_final - 1.0) <= tol.pairing &&
                  cert.residual_final <= tol.residual && cert.theta0_cauchy;
  if (!ok)
    cert.verdict = CertificateVerdict::failed;
  else
    cert.verdict = small.pass ? CertificateVerdict::certified : CertificateVerdict::inconclusive;
  return cert;
}

}  // namespace

ContinuationResult run_continuation(const ContinuationConfig& config, const WeightField& a, const ScalarField& f,
                                    const std::optional<ScalarField>& init) {
  const GridPtr grid = f.grid;
  config.validate(grid->dim());

  ContinuationResult run;
  ScalarField prev = init ? *init : ScalarField(grid);
  for (double p : config.p_schedule) {
    const auto solved = solve_fixed_p(config.params_for(p), a, f, prev);
    auto diag = step_diagnostics(solved.u, prev, p, config, a, f);
    diag.iterations = solved.iterations;
    diag.converged = solved.converged;
    run.steps.push_back(std::move(diag));
    run.solutions.push_back(solved.u);
    prev = solved.u;
    if (!solved.converged) {
      std::ostringstream msg;
      msg << "solver did not converge at p = " << p << " (grad_sup " << solved.grad_sup << " > tol "
          << solved.tol_used << " after " << solved.iterations << " iterations)";
      run.aborted = true;
      run.message = msg.str();
      break;
    }
  }

  run.u = prev;
  run.z = flux(prev, run.steps.back().p, run.steps.back().epsilon);
  for (std::size_t k = 0; k < run.steps.size(); ++k)
    run.steps[k].monotone_gap = monotone_gap(run.solutions[k], run.u, config.q, a);
  run.certificate = assemble_certificate(run, config, a, f);
  return run;
}

ScalarField random_dirichlet_field(const GridPtr& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  ScalarField u(grid);
  for (std::size_t node : grid->interior_nodes()) u.values[node] = dist(rng);
  return u;
}

double uniqueness_probe(const ContinuationConfig& config, const WeightField& a, const ScalarField& f, int n_seeds,
                        std::uint64_t seed) {
  if (n_seeds < 2) throw std::invalid_argument("uniqueness_probe needs at least two seeds");
  ContinuationConfig cfg = config;
  cfg.solver.scale_tol_by_energy = false;

  std::vector<std::future<ScalarField>> runs;
  for (int s = 0; s < n_seeds; ++s) {
    runs.push_back(std::async(std::launch::async, [&, s] {
      const auto init = random_dirichlet_field(f.grid, seed + static_cast<std::uint64_t>(s), 0.1);
      auto r = run_continuation(cfg, a, f, init);
      if (r.aborted) throw std::runtime_error("uniqueness_probe: " + r.message);
      return r.u;
    }));
  }
  std::vector<ScalarField> finals;
  for (auto& r : runs) finals.push_back(r.get());

  double worst = 0.0;
  for (std::size_t i = 0; i < finals.size(); ++i)
    for (std::size_t j = i + 1; j < finals.size(); ++j)
      for (std::size_t k = 0; k < finals[i].values.size(); ++k)
        worst = std::max(worst, std::abs(finals[i].values[k] - finals[j].values[k]));
  return worst;
}

}  // namespace dphase
