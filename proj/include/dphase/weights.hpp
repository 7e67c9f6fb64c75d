#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dphase/grid.hpp"

namespace dphase {

enum class WeightPreset { constant, parabola, ring };

WeightPreset parse_weight_preset(std::string_view name);
std::string_view to_string(WeightPreset preset);

/// constant: a = c. parabola: a = c |x - center|^2.
/// ring: a = min(c, k max(0, |x - center| - r0)).
struct WeightParams {
  double c = 1.0;
  double k = 4.0;
  double r0 = 0.25;
  /// Defaults to the domain center.
  std::optional<Point> center;
};

double weight_value(WeightPreset preset, const WeightParams& params, const Point& x, int dim);

/// Weight a(x) >= 0 sampled at active cell centers.
struct WeightField {
  GridPtr grid;
  std::vector<double> values;
  double lipschitz_estimate = 0.0;
  double boundary_min = 0.0;
  std::string preset_name;

  /// Builds a weight from raw cell values and fills the metadata. No
  /// hypothesis is enforced beyond non-negativity.
  static WeightField from_values(GridPtr grid, std::vector<double> values, std::string name);
};

/// Throws std::invalid_argument when the preset vanishes on the boundary
/// (boundary_min == 0) or the parameters are out of range.
WeightField make_weight(WeightPreset preset, const WeightParams& params, GridPtr grid);

enum class CubeFamily { all, dyadic };

struct AqOptions {
  /// Cells are floored at floor_relative * max(a) before inverting.
  double floor_relative = 1e-8;
  CubeFamily family = CubeFamily::all;
};

/// Supremum over axis-aligned cubes of lattice cells of
/// (avg_Q a) (avg_Q a^{-1/(q-1)})^{q-1}, averaging over the active cells in Q.
/// Returns +infinity when an average of the inverted weight overflows.
double aq_constant(const WeightField& a, double q, const AqOptions& options = {});

enum class Verdict { pass, warn, fail };
std::string_view to_string(Verdict verdict);

struct H0Report {
  double lipschitz_estimate = 0.0;
  double aq_constant = 0.0;
  double boundary_min = 0.0;
  /// q/p_min < 1 + 1/n and q < n.
  bool exponent_ratio_ok = false;
  bool ratio_condition = false;
  bool q_below_n = false;
  double floor_relative = 0.0;
  Verdict verdict = Verdict::fail;
};

/// fail: the weight vanishes on the boundary or is not A_q (infinite constant).
/// warn: the exponent conditions fail; the discrete problems stay solvable.
H0Report check_h0(const WeightField& a, double q, int n, double p_min, const AqOptions& options = {});

}  // namespace dphase
