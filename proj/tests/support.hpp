#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/weights.hpp"

namespace testing {

inline dphase::WeightField constant_weight(const dphase::GridPtr& grid, double c) {
  return dphase::WeightField::from_values(grid, std::vector<double>(grid->cell_count(), c), "constant");
}

inline dphase::ScalarField random_nodal(const dphase::GridPtr& grid, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  dphase::ScalarField u(grid);
  for (double& v : u.values) v = d(rng);
  return u;
}

inline dphase::ScalarField random_dirichlet(const dphase::GridPtr& grid, std::mt19937_64& rng, double amp = 1.0) {
  auto u = random_nodal(grid, rng, amp);
  u.apply_dirichlet();
  return u;
}

inline double sup_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

inline double rel_close(double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

}  // namespace testing
