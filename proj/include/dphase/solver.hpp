#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/weights.hpp"

namespace dphase {

struct SolveParams {
  ExponentPair exponents{2.0, 2.0};
  /// Regularization of |grad u| in the p-term: (|grad u|^2 + eps^2)^{(p-2)/2}.
  double epsilon = 0.0;
  /// Stationarity tolerance on the sup-norm of the energy gradient.
  double tol = 1e-9;
  /// Use tol * (1 + |E(init)|) as the effective tolerance.
  bool scale_tol_by_energy = true;
  int max_iter = 500;

  void validate() const;
};

struct SolveResult {
  ScalarField u;
  int iterations = 0;
  double energy = 0.0;
  double grad_sup = 0.0;
  double residual = 0.0;
  bool converged = false;
  /// Effective stationarity tolerance.
  double tol_used = 0.0;
  /// Energy of every accepted iterate, starting with the initial guess.
  std::vector<double> energy_history;
};

/// Discrete energy
///   sum_cells h^n [ ((|xi|^2+eps^2)^{p/2} - eps^p)/p + a |xi|^q / q ]
///   - sum_interior h^n f_i u_i,
/// xi the forward-difference gradient. Its Euler-Lagrange equation is the
/// discrete weak form of -div(|grad u|^{p-2} grad u + a |grad u|^{q-2} grad u) = f.
double energy(const ScalarField& u, const SolveParams& params, const WeightField& a, const ScalarField& f);

/// Nodal gradient of `energy`; g . delta is the directional derivative along
/// any Dirichlet perturbation delta. Zero on non-interior nodes.
ScalarField energy_gradient(const ScalarField& u, const SolveParams& params, const WeightField& a,
                            const ScalarField& f);

/// Damped Newton with Armijo backtracking. Never throws on non-convergence;
/// check `converged`.
SolveResult solve_fixed_p(const SolveParams& params, const WeightField& a, const ScalarField& f,
                          const std::optional<ScalarField>& init = std::nullopt);

/// max_i |int F . grad phi_i - int f phi_i| / ||grad phi_i||_{L^2} over the
/// interior nodal basis, F the total flux.
double weak_residual(const ScalarField& u, const SolveParams& params, const WeightField& a, const ScalarField& f);

/// Per-cell flux maps.
void p_flux(std::span<const double> xi, double p, double epsilon, std::span<double> out);
void total_flux_cell(std::span<const double> xi, double p, double q, double epsilon, double weight,
                     std::span<double> out);

/// (|grad u|^2 + eps^2)^{(p-2)/2} grad u per cell.
VectorField flux(const ScalarField& u, double p, double epsilon);
/// flux plus a |grad u|^{q-2} grad u.
VectorField total_flux(const ScalarField& u, const SolveParams& params, const WeightField& a);

/// h^n sum over interior nodes of f_i u_i.
double load_integral(const ScalarField& f, const ScalarField& u);

}  // namespace dphase
