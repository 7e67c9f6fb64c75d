#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/weights.hpp"

namespace dphase {

/// Growth exponents of the double-phase integrand t^p + a(x) t^q.
/// Both must exceed 1. The double-phase regime is p < q, but continuation
/// schedules may start above q, where the energy is still strictly convex.
struct ExponentPair {
  double p;
  double q;

  ExponentPair(double p_, double q_);

  /// Sobolev conjugate np/(n-p); requires p < n.
  double sobolev_conjugate(int n) const;
  /// p_* with 1/p_* + 1/p^* = 1.
  double dual_sobolev(int n) const;
};

enum class ModularKind { theta_p, theta_0 };

std::string_view to_string(ModularKind kind);

/// rho(v) = integral of |v|^p + a|v|^q (theta_p) or a|v|^q (theta_0) over the
/// active cells. `magnitudes` holds |v| per cell.
double modular(std::span<const double> magnitudes, const WeightField& a, const ExponentPair& e, ModularKind kind);
double modular(const VectorField& v, const WeightField& a, const ExponentPair& e, ModularKind kind);
/// Scalar fields enter through their cell averages.
double modular(const ScalarField& v, const WeightField& a, const ExponentPair& e, ModularKind kind);

inline constexpr double kLuxemburgTol = 1e-10;

/// inf{lambda > 0 : rho(v/lambda) <= 1}, by bisection on log(lambda) until the
/// bracket has relative width `tol`. Returns the upper end of the bracket, so
/// rho(v/result) <= 1 always holds.
double luxemburg_norm(std::span<const double> magnitudes, const WeightField& a, const ExponentPair& e, ModularKind kind,
                      double tol = kLuxemburgTol);
double luxemburg_norm(const VectorField& v, const WeightField& a, const ExponentPair& e, ModularKind kind,
                      double tol = kLuxemburgTol);
double luxemburg_norm(const ScalarField& v, const WeightField& a, const ExponentPair& e, ModularKind kind,
                      double tol = kLuxemburgTol);

double lr_norm(const GridDomain& grid, std::span<const double> magnitudes, double r);
double lr_norm(const VectorField& v, double r);
double lr_norm(const ScalarField& v, double r);

/// (integral of a |v|^q)^{1/q}
double weighted_lq_norm(std::span<const double> magnitudes, const WeightField& a, double q);
double weighted_lq_norm(const VectorField& v, const WeightField& a, double q);

/// Optimal constant in ||u||_{p*} <= S(n,p) ||grad u||_p. For p = 1 this is the
/// isoperimetric constant n^{-1} omega_n^{-1/n}; for 1 < p < n Talenti's
/// closed form. Throws std::invalid_argument otherwise.
double sobolev_constant(int n, double p);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

struct SmallnessResult {
  double f_norm = 0.0;
  double lhs = 0.0;
  bool pass = false;
};

/// lhs = ||f||_n (S(n,1) + 1); the limit problem is solvable when lhs < 1.
SmallnessResult smallness_check(const ScalarField& f, int n);

struct HoelderCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||f||_{p_*} <= |Omega|^{1-1/p} ||f||_n, with a relative slack of 1e-10.
HoelderCheck hoelder_fp_check(const ScalarField& f, int n, double p);

}  // namespace dphase
