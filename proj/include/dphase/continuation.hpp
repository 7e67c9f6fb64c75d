#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/solver.hpp"
#include "dphase/weights.hpp"

namespace dphase {

struct ContinuationConfig {
  double q = 1.3;
  /// Strictly decreasing, all > 1.
  std::vector<double> p_schedule = default_schedule(10);
  /// Per-step regularization eps(p) = epsilon0 (p - 1).
  double epsilon0 = 1e-2;
  /// Template for every step; exponents and epsilon are overwritten.
  SolveParams solver{};
  std::vector<double> flux_r_list{1.0, 2.0, 4.0, 8.0};
  /// Reject schedules reaching q/p >= 1 + 1/n.
  bool strict_h0 = false;

  /// p_k = 1 + 2^{-k}, k = 1..k_max.
  static std::vector<double> default_schedule(int k_max);

  double epsilon_for(double p) const { return epsilon0 * (p - 1.0); }
  SolveParams params_for(double p) const;
  /// Throws std::invalid_argument on a malformed schedule, or on a strict
  /// (H_0) violation for dimension n.
  void validate(int n) const;
};

struct StepDiagnostics {
  double p = 0.0;
  double epsilon = 0.0;
  /// Luxemburg theta_p norm of grad u_p.
  double lambda_p = 0.0;
  /// (int a |grad u_p|^q)^{1/q}
  double weighted_q = 0.0;
  /// (r, ||flux||_{L^r}) in flux_r_list order.
  std::vector<std::pair<double, double>> flux_lr;
  double flux_sup = 0.0;
  /// Luxemburg theta_0 norm of grad u_p - grad u_prev.
  double theta0_diff_prev = 0.0;
  double pairing_ratio = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool ratio_ok = false;
  bool converged = false;
  double energy = 0.0;
  /// Filled after the run with the final solution as reference.
  double monotone_gap = 0.0;
};

struct CertificateTolerances {
  double flux = 0.05;
  double pairing = 0.05;
  double residual = 1e-6;
  double theta0 = 1e-3;
};

enum class CertificateVerdict { certified, failed, inconclusive };
std::string_view to_string(CertificateVerdict verdict);

struct LimitCertificate {
  double flux_sup_final = 0.0;
  double pairing_ratio_final = 0.0;
  double residual_final = 0.0;
  bool theta0_cauchy = false;
  double smallness_lhs = 0.0;
  bool smallness_pass = false;
  /// sup|u(eps/2) - u(eps)| / sup|u(eps)| at the final p; 0 for the zero solution.
  double eps_sensitivity = 0.0;
  CertificateVerdict verdict = CertificateVerdict::failed;
  CertificateTolerances tolerances{};
};

struct ContinuationResult {
  std::vector<StepDiagnostics> steps;
  LimitCertificate certificate;
  /// Final solution u_{p_K} and limit flux z.
  ScalarField u;
  VectorField z;
  /// Every converged u_p in schedule order.
  std::vector<ScalarField> solutions;
  bool aborted = false;
  std::string message;
};

/// Marches through the p schedule with warm starts. A step that fails to
/// converge aborts the run; the diagnostics gathered so far are returned with
/// a failed verdict.
ContinuationResult run_continuation(const ContinuationConfig& config, const WeightField& a, const ScalarField& f,
                                    const std::optional<ScalarField>& init = std::nullopt);

StepDiagnostics step_diagnostics(const ScalarField& u_p, const ScalarField& u_prev, double p,
                                 const ContinuationConfig& config, const WeightField& a, const ScalarField& f);

/// int z . grad u / max(int |grad u|, 1e-14); 1 when both integrals vanish.
double pairing_ratio(const VectorField& z, const ScalarField& u);

/// int a (|xi|^{q-2} xi - |eta|^{q-2} eta) . (xi - eta), xi = grad u_p, eta = grad u_ref.
double monotone_gap(const ScalarField& u_p, const ScalarField& u_ref, double q, const WeightField& a);

/// ||u||_{theta_p} / ||grad u||_{theta_p}. Throws std::domain_error for u == 0.
double poincare_ratio(const ScalarField& u, const WeightField& a, const ExponentPair& e);

/// Random Dirichlet field with values uniform in [-amplitude, amplitude].
ScalarField random_dirichlet_field(const GridPtr& grid, std::uint64_t seed, double amplitude);

/// Runs the continuation from n_seeds random initial fields and returns the
/// largest pairwise sup-difference of the final-step solutions.
double uniqueness_probe(const ContinuationConfig& config, const WeightField& a, const ScalarField& f, int n_seeds,
                        std::uint64_t seed = 1);

}  // namespace dphase
