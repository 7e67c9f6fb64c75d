#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the solver or the norm code.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "dphase/grid.hpp"
#include "dphase/weights.hpp"

namespace oracle {

// Every window of k^n consecutive lattice cells (n <= 2), averaged over its
// active cells, with the weight normalized by its max and floored.
inline double brute_force_aq(const dphase::WeightField& a, double q, double floor_rel) {
  const auto& g = *a.grid;
  const int n = g.dim();
  const int N = g.resolution();
  double amax = 0.0;
  for (double v : a.values) amax = std::max(amax, v);
  std::vector<double> b(a.values.size());
  for (std::size_t c = 0; c < b.size(); ++c) b[c] = std::max(a.values[c] / amax, floor_rel);

  auto cell_at = [&](int i, int j) {
    const std::size_t node = static_cast<std::size_t>(i) + (n > 1 ? static_cast<std::size_t>(j) * g.stride(1) : 0);
    return g.cell_at_anchor(node);
  };
  const int jspan = n > 1 ? N : 1;
  double best = 0.0;
  for (int k = 1; k <= N; ++k) {
    const int kj = n > 1 ? k : 1;
    for (int i0 = 0; i0 + k <= N; ++i0)
      for (int j0 = 0; j0 + kj <= jspan; ++j0) {
        double sa = 0.0, si = 0.0;
        int cnt = 0;
        for (int i = i0; i < i0 + k; ++i)
          for (int j = j0; j < j0 + kj; ++j) {
            const auto c = cell_at(i, j);
            if (c < 0) continue;
            sa += b[static_cast<std::size_t>(c)];
            si += std::pow(b[static_cast<std::size_t>(c)], -1.0 / (q - 1.0));
            ++cnt;
          }
        if (cnt > 0) best = std::max(best, (sa / cnt) * std::pow(si / cnt, q - 1.0));
      }
  }
  return best;
}

// Unscaled five-point matrix (4 on the diagonal, -1 per interior neighbour)
// over the interior nodes of a 2D grid.
inline Eigen::SparseMatrix<double> five_point_matrix(const dphase::GridDomain& g) {
  const auto& dofs = g.interior_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const auto row = static_cast<int>(k);
    trip.emplace_back(row, row, 4.0);
    for (std::size_t nb : {dofs[k] - 1, dofs[k] + 1, dofs[k] - g.stride(1), dofs[k] + g.stride(1)})
      if (g.is_interior(nb)) trip.emplace_back(row, static_cast<int>(g.dof_of(nb)), -1.0);
  }
  const auto n = static_cast<Eigen::Index>(dofs.size());
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

// -Laplace_h u = f with homogeneous Dirichlet data, by sparse LU. Returns
// nodal values (zero off the interior).
inline std::vector<double> five_point_poisson(const dphase::GridDomain& g, const std::vector<double>& f) {
  const double h = g.spacing();
  Eigen::SparseMatrix<double> A = five_point_matrix(g) / (h * h);
  const auto& dofs = g.interior_nodes();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t k = 0; k < dofs.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = f[dofs[k]];
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::VectorXd x = lu.solve(rhs);
  std::vector<double> u(g.node_count(), 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) u[dofs[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

// Smallest eigenvalue of the unscaled five-point matrix by inverse power iteration.
inline double five_point_min_eigenvalue(const dphase::GridDomain& g) {
  const auto A = five_point_matrix(g);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows());
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd y = ldlt.solve(x);
    const double next = x.dot(x) / x.dot(y);
    x = y / y.norm();
    if (std::abs(next - lambda) < 1e-15 * next) break;
    lambda = next;
  }
  return x.dot(A * x);
}

// Radial solution of -div(|grad u|^{p-2} grad u) = 1 in the unit n-ball:
// |u'|^{p-1} = r/n, so u = (p-1)/p n^{-1/(p-1)} (1 - r^{p/(p-1)}).
inline double radial_p_laplace(double p, int n, double r) {
  return (p - 1.0) / p * std::pow(static_cast<double>(n), -1.0 / (p - 1.0)) * (1.0 - std::pow(r, p / (p - 1.0)));
}

// Plain bisection for a decreasing scalar function.
template <class F>
double decreasing_root(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
