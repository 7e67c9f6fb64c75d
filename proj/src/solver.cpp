#include "dphase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace dphase {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
// Hessian floors: magnitudes below kMinSlope are treated as kMinSlope, and
// cell eigenvalues are clipped at kMinEigen.
constexpr double kMinSlope = 1e-12;
constexpr double kMinEigen = 1e-12;

struct EnergyParts {
  double value = 0.0;
  double scale = 0.0;  // sum of absolute contributions, for roundoff estimates
};

double p_density(double s, double p, double eps) {
  if (eps > 0.0) {
    const double e2 = eps * eps;
    return std::pow(eps, p) * std::expm1(0.5 * p * std::log1p(s / e2)) / p;
  }
  return std::pow(s, 0.5 * p) / p;
}

void check_fields(const ScalarField& u, const WeightField& a, const ScalarField& f) {
  if (u.grid != a.grid || u.grid != f.grid) throw std::invalid_argument("solver: fields live on different grids");
}

EnergyParts energy_parts(const ScalarField& u, const SolveParams& params, const WeightField& a, const ScalarField& f) {
  check_fields(u, a, f);
  const auto xi = gradient(u);
  const double p = params.exponents.p;
  const double q = params.exponents.q;
  const auto& grid = *u.grid;
  EnergyParts out;
  double bulk = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    double s = 0.0;
    for (double x : xi.at(c)) s += x * x;
    double w = p_density(s, p, params.epsilon);
    if (a.values[c] != 0.0 && s > 0.0) w += a.values[c] * std::pow(s, 0.5 * q) / q;
    bulk += w;
  }
  bulk *= grid.cell_volume();
  double load = 0.0;
  double load_abs = 0.0;
  for (std::size_t node : grid.interior_nodes()) {
    load += f.values[node] * u.values[node];
    load_abs += std::abs(f.values[node] * u.values[node]);
  }
  load *= grid.cell_volume();
  out.value = bulk - load;
  out.scale = std::abs(bulk) + load_abs * grid.cell_volume();
  return out;
}

// Cell Hessian of the integrand: alpha_t I + (alpha_r - alpha_t) xi_hat xi_hat^T.
struct CellCurvature {
  double tangential;
  double radial;
};

CellCurvature cell_curvature(double s, double p, double q, double eps, double weight) {
  const double t = std::max(std::sqrt(s), kMinSlope);
  const double se = std::max(s + eps * eps, kMinSlope * kMinSlope);
  const double beta = std::pow(se, 0.5 * (p - 2.0));
  double tangential = beta;
  double radial = beta * (eps * eps + (p - 1.0) * s) / se;
  if (s + eps * eps < kMinSlope * kMinSlope) radial = beta * (p - 1.0);
  if (weight != 0.0) {
    const double tq = weight * std::pow(t, q - 2.0);
    tangential += tq;
    radial += (q - 1.0) * tq;
  }
  return {std::max(tangential, kMinEigen), std::max(radial, kMinEigen)};
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void SolveParams::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("solver epsilon must be non-negative");
  if (!(tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be at least 1");
}

void p_flux(std::span<const double> xi, double p, double epsilon, std::span<double> out) {
  double s = 0.0;
  for (double x : xi) s += x * x;
  const double se = s + epsilon * epsilon;
  const double factor = se > 0.0 ? std::pow(se, 0.5 * (p - 2.0)) : 0.0;
  for (std::size_t d = 0; d < xi.size(); ++d) out[d] = factor * xi[d];
}

void total_flux_cell(std::span<const double> xi, double p, double q, double epsilon, double weight,
                     std::span<double> out) {
  p_flux(xi, p, epsilon, out);
  double s = 0.0;
  for (double x : xi) s += x * x;
  if (weight == 0.0 || s == 0.0) return;
  const double factor = weight * std::pow(s, 0.5 * (q - 2.0));
  for (std::size_t d = 0; d < xi.size(); ++d) out[d] += factor * xi[d];
}

VectorField flux(const ScalarField& u, double p, double epsilon) {
  const auto xi = gradient(u);
  VectorField out(u.grid);
  for (std::size_t c = 0; c < xi.cell_count(); ++c) p_flux(xi.at(c), p, epsilon, out.at(c));
  return out;
}

VectorField total_flux(const ScalarField& u, const SolveParams& params, const WeightField& a) {
  if (u.grid != a.grid) throw std::invalid_argument("total_flux: fields live on different grids");
  const auto xi = gradient(u);
  VectorField out(u.grid);
  for (std::size_t c = 0; c < xi.cell_count(); ++c)
    total_flux_cell(xi.at(c), params.exponents.p, params.exponents.q, params.epsilon, a.values[c], out.at(c));
  return out;
}

double load_integral(const ScalarField& f, const ScalarField& u) {
  if (f.grid != u.grid) throw std::invalid_argument("load_integral: fields live on different grids");
  double sum = 0.0;
  for (std::size_t node : u.grid->interior_nodes()) sum += f.values[node] * u.values[node];
  return sum * u.grid->cell_volume();
}

double energy(const ScalarField& u, const SolveParams& params, const WeightField& a, const ScalarField& f) {
  return energy_parts(u, params, a, f).value;
}

ScalarField energy_gradient(const ScalarField& u, const SolveParams& params, const WeightField& a,
                            const ScalarField& f) {
  check_fields(u, a, f);
  auto g = gradient_transpose(total_flux(u, params, a));
  const double vol = u.grid->cell_volume();
  for (std::size_t node = 0; node < g.values.size(); ++node)
    g.values[node] = u.grid->is_interior(node) ? vol * (g.values[node] - f.values[node]) : 0.0;
  return g;
}

double weak_residual(const ScalarField& u, const SolveParams& params, const WeightField& a, const ScalarField& f) {
  const auto g = energy_gradient(u, params, a, f);
  const auto& grid = *u.grid;
  // ||grad phi_i||^2 = h^n * sum of squared entries of column i of the gradient matrix.
  const auto& gm = grid.gradient_matrix();
  std::vector<double> col_sq(grid.node_count(), 0.0);
  for (Eigen::Index r = 0; r < gm.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gm, r); it; ++it)
      col_sq[static_cast<std::size_t>(it.col())] += it.value() * it.value();
  double worst = 0.0;
  for (std::size_t node : grid.interior_nodes()) {
    const double norm = std::sqrt(grid.cell_volume() * col_sq[node]);
    if (norm > 0.0) worst = std::max(worst, std::abs(g.values[node]) / norm);
  }
  return worst;
}

SolveResult solve_fixed_p(const SolveParams& params, const WeightField& a, const ScalarField& f,
                          const std::optional<ScalarField>& init) {
  params.validate();
  const GridPtr grid = f.grid;
  if (a.grid != grid) throw std::invalid_argument("solve_fixed_p: weight and rhs live on different grids");
  ScalarField u = init ? *init : ScalarField(grid);
  if (u.grid != grid) throw std::invalid_argument("solve_fixed_p: initial guess lives on a different grid");
  if (!u.is_dirichlet()) throw std::invalid_argument("solve_fixed_p: initial guess must vanish on the boundary");

  const int dim = grid->dim();
  const double h = grid->spacing();
  const double vol = grid->cell_volume();
  const double p = params.exponents.p;
  const double q = params.exponents.q;
  const auto dofs = grid->interior_nodes();
  const auto ndof = static_cast<Eigen::Index>(dofs.size());

  SolveResult result;
  EnergyParts e = energy_parts(u, params, a, f);
  result.tol_used = params.scale_tol_by_energy ? params.tol * (1.0 + std::abs(e.value)) : params.tol;
  result.energy_history.push_back(e.value);

  auto g = energy_gradient(u, params, a, f);
  double gsup = sup_abs(g.values);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern_ready = false;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::ptrdiff_t> local(static_cast<std::size_t>(dim) + 1);

  // After a damped Newton step the next step uses the Kacanov matrix (radial
  // curvature raised to the tangential one). For growth exponents below 2 it
  // majorizes the energy, so full steps decrease it even on steep gradients
  // where the Newton model overshoots.
  bool kacanov = false;
  int iter = 0;
  for (; iter < params.max_iter && gsup > result.tol_used && ndof > 0; ++iter) {
    const auto xi = gradient(u);
    triplets.clear();
    for (std::size_t c = 0; c < grid->cell_count(); ++c) {
      const std::size_t anchor = grid->cell_anchor(c);
      local[0] = grid->dof_of(anchor);
      for (int d = 0; d < dim; ++d) local[static_cast<std::size_t>(d) + 1] = grid->dof_of(anchor + grid->stride(d));
      bool any = false;
      for (auto l : local) any = any || l >= 0;
      if (!any) continue;

      const auto x = xi.at(c);
      double s = 0.0;
      for (double v : x) s += v * v;
      auto curv = cell_curvature(s, p, q, params.epsilon, a.values[c]);
      if (kacanov) curv.radial = std::max(curv.radial, curv.tangential);
      const double norm = std::sqrt(s);
      // D = alpha_t I + (alpha_r - alpha_t) xi_hat xi_hat^T, then B^T D B with
      // B the local forward-difference operator.
      Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
      for (int i = 0; i < dim; ++i) {
        D(i, i) = curv.tangential;
        if (norm > 0.0)
          for (int j = 0; j < dim; ++j)
            D(i, j) += (curv.radial - curv.tangential) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)] / s;
      }
      // B(d, 0) = -1/h, B(d, d+1) = 1/h.
      Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const double dij = D(i, j) * vol / (h * h);
          K(0, 0) += dij;
          K(0, j + 1) -= dij;
          K(i + 1, 0) -= dij;
          K(i + 1, j + 1) += dij;
        }
      for (int i = 0; i <= dim; ++i) {
        const auto li = local[static_cast<std::size_t>(i)];
        if (li < 0) continue;
        for (int j = 0; j <= dim; ++j) {
          const auto lj = local[static_cast<std::size_t>(j)];
          if (lj < 0) continue;
          triplets.emplace_back(static_cast<int>(li), static_cast<int>(lj), K(i, j));
        }
      }
    }
    Eigen::SparseMatrix<double> H(ndof, ndof);
    H.setFromTriplets(triplets.begin(), triplets.end());
    if (!pattern_ready) {
      ldlt.analyzePattern(H);
      pattern_ready = true;
    }
    ldlt.factorize(H);
    if (ldlt.info() != Eigen::Success) break;

    Eigen::VectorXd rhs(ndof);
    for (Eigen::Index i = 0; i < ndof; ++i) rhs(i) = -g.values[dofs[static_cast<std::size_t>(i)]];
    const Eigen::VectorXd step = ldlt.solve(rhs);
    const double slope = -rhs.dot(step);  // g . d, negative for a descent direction
    if (!(slope < 0.0)) break;

    double alpha = 1.0;
    bool accepted = false;
    ScalarField trial(grid);
    EnergyParts et;
    ScalarField gt;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, alpha *= 0.5) {
      trial.values = u.values;
      for (Eigen::Index i = 0; i < ndof; ++i) trial.values[dofs[static_cast<std::size_t>(i)]] += alpha * step(i);
      et = energy_parts(trial, params, a, f);
      if (et.value <= e.value + kArmijo * alpha * slope) {
        accepted = true;
        gt = energy_gradient(trial, params, a, f);
        break;
      }
      // Near the minimizer the energy decrease drops below roundoff; accept a
      // step that stays within roundoff and reduces stationarity.
      if (et.value - e.value <= 1e-13 * std::max(e.scale, et.scale)) {
        gt = energy_gradient(trial, params, a, f);
        if (sup_abs(gt.values) < gsup) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (kacanov) break;
      kacanov = true;
      continue;
    }
    kacanov = !kacanov && alpha < 1.0;
    u = std::move(trial);
    e = et;
    g = std::move(gt);
    gsup = sup_abs(g.values);
    result.energy_history.push_back(e.value);
  }

  result.iterations = iter;
  result.energy = e.value;
  result.grad_sup = gsup;
  result.converged = gsup <= result.tol_used;
  result.residual = weak_residual(u, params, a, f);
  result.u = std::move(u);
  return result;
}

}  // namespace dphase
