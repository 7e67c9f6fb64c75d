#include "dphase/orlicz.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dphase {

ExponentPair::ExponentPair(double p_, double q_) : p(p_), q(q_) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (!(q > 1.0)) throw std::invalid_argument("exponent q must exceed 1");
}

double ExponentPair::sobolev_conjugate(int n) const {
  if (!(p < n)) throw std::invalid_argument("sobolev conjugate needs p < n");
  return n * p / (n - p);
}

double ExponentPair::dual_sobolev(int n) const { return 1.0 / (1.0 - 1.0 / sobolev_conjugate(n)); }

std::string_view to_string(ModularKind kind) { return kind == ModularKind::theta_p ? "theta_p" : "theta_0"; }

namespace {

void check_sizes(std::span<const double> magnitudes, const WeightField& a) {
  if (magnitudes.size() != a.values.size()) throw std::invalid_argument("field and weight sizes differ");
}

double modular_scaled(std::span<const double> m, const WeightField& a, const ExponentPair& e, ModularKind kind,
                      double inv_lambda) {
  double sum = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) {
    const double t = m[c] * inv_lambda;
    if (t == 0.0) continue;
    if (kind == ModularKind::theta_p) sum += std::pow(t, e.p);
    if (a.values[c] != 0.0) sum += a.values[c] * std::pow(t, e.q);
  }
  return sum * a.grid->cell_volume();
}

}  // namespace

double modular(std::span<const double> magnitudes, const WeightField& a, const ExponentPair& e, ModularKind kind) {
  check_sizes(magnitudes, a);
  return modular_scaled(magnitudes, a, e, kind, 1.0);
}

double modular(const VectorField& v, const WeightField& a, const ExponentPair& e, ModularKind kind) {
  const auto m = v.magnitudes();
  return modular(m, a, e, kind);
}

double modular(const ScalarField& v, const WeightField& a, const ExponentPair& e, ModularKind kind) {
  auto m = v.cell_values();
  for (double& x : m) x = std::abs(x);
  return modular(m, a, e, kind);
}

double luxemburg_norm(std::span<const double> magnitudes, const WeightField& a, const ExponentPair& e, ModularKind kind,
                      double tol) {
  check_sizes(magnitudes, a);
  if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tol must be positive");
  if (modular_scaled(magnitudes, a, e, kind, 1.0) == 0.0) return 0.0;

  auto rho = [&](double lambda) { return modular_scaled(magnitudes, a, e, kind, 1.0 / lambda); };

  double hi = std::max(1.0, lr_norm(*a.grid, magnitudes, 1.0) + weighted_lq_norm(magnitudes, a, e.q) + 1.0);
  while (rho(hi) > 1.0) hi *= 2.0;
  double lo = std::numeric_limits<double>::min();
  if (rho(lo) <= 1.0) return lo;

  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    if (rho(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double luxemburg_norm(const VectorField& v, const WeightField& a, const ExponentPair& e, ModularKind kind, double tol) {
  const auto m = v.magnitudes();
  return luxemburg_norm(m, a, e, kind, tol);
}

double luxemburg_norm(const ScalarField& v, const WeightField& a, const ExponentPair& e, ModularKind kind, double tol) {
  auto m = v.cell_values();
  for (double& x : m) x = std::abs(x);
  return luxemburg_norm(m, a, e, kind, tol);
}

double lr_norm(const GridDomain& grid, std::span<const double> magnitudes, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lr_norm: r must be at least 1");
  double sum = 0.0;
  for (double m : magnitudes) sum += std::pow(std::abs(m), r);
  return std::pow(sum * grid.cell_volume(), 1.0 / r);
}

double lr_norm(const VectorField& v, double r) {
  const auto m = v.magnitudes();
  return lr_norm(*v.grid, m, r);
}

double lr_norm(const ScalarField& v, double r) {
  const auto m = v.cell_values();
  return lr_norm(*v.grid, m, r);
}

double weighted_lq_norm(std::span<const double> magnitudes, const WeightField& a, double q) {
  check_sizes(magnitudes, a);
  double sum = 0.0;
  for (std::size_t c = 0; c < magnitudes.size(); ++c) sum += a.values[c] * std::pow(magnitudes[c], q);
  return std::pow(sum * a.grid->cell_volume(), 1.0 / q);
}

double weighted_lq_norm(const VectorField& v, const WeightField& a, double q) {
  const auto m = v.magnitudes();
  return weighted_lq_norm(m, a, q);
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(1.0 + 0.5 * n);
}

double sobolev_constant(int n, double p) {
  if (n < 1) throw std::invalid_argument("sobolev_constant: n must be positive");
  if (p == 1.0) return std::pow(unit_ball_volume(n), -1.0 / n) / n;
  if (!(p > 1.0) || !(p < n)) throw std::invalid_argument("sobolev_constant requires p = 1 or 1 < p < n");
  const double nd = n;
  const double log_ratio = std::lgamma(1.0 + 0.5 * nd) + std::lgamma(nd) - std::lgamma(nd / p) -
                           std::lgamma(1.0 + nd - nd / p);
  return std::pow(std::numbers::pi, -0.5) * std::pow(nd, -1.0 / p) *
         std::pow((p - 1.0) / (nd - p), 1.0 - 1.0 / p) * std::exp(log_ratio / nd);
}

SmallnessResult smallness_check(const ScalarField& f, int n) {
  SmallnessResult r;
  r.f_norm = lr_norm(f, static_cast<double>(n));
  r.lhs = r.f_norm * (sobolev_constant(n, 1.0) + 1.0);
  r.pass = r.lhs < 1.0;
  return r;
}

HoelderCheck hoelder_fp_check(const ScalarField& f, int n, double p) {
  if (!(p > 1.0 && p < n)) throw std::invalid_argument("hoelder_fp_check requires 1 < p < n");
  const ExponentPair e(p, p);
  HoelderCheck r;
  r.lhs = lr_norm(f, e.dual_sobolev(n));
  r.rhs = std::pow(f.grid->measure(), 1.0 - 1.0 / p) * lr_norm(f, static_cast<double>(n));
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-10);
  return r;
}

}  // namespace dphase
