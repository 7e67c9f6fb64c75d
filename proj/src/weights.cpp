#include "dphase/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dphase {

WeightPreset parse_weight_preset(std::string_view name) {
  if (name == "constant") return WeightPreset::constant;
  if (name == "parabola") return WeightPreset::parabola;
  if (name == "ring") return WeightPreset::ring;
  throw std::invalid_argument("unknown weight preset '" + std::string(name) + "'");
}

std::string_view to_string(WeightPreset preset) {
  switch (preset) {
    case WeightPreset::constant: return "constant";
    case WeightPreset::parabola: return "parabola";
    case WeightPreset::ring: return "ring";
  }
  return "?";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
  }
  return "?";
}

double weight_value(WeightPreset preset, const WeightParams& params, const Point& x, int dim) {
  const Point center = params.center.value_or(Point{0.0, 0.0, 0.0});
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double dx = x[static_cast<std::size_t>(d)] - center[static_cast<std::size_t>(d)];
    r2 += dx * dx;
  }
  switch (preset) {
    case WeightPreset::constant: return params.c;
    case WeightPreset::parabola: return params.c * r2;
    case WeightPreset::ring: return std::min(params.c, params.k * std::max(0.0, std::sqrt(r2) - params.r0));
  }
  return 0.0;
}

WeightField WeightField::from_values(GridPtr grid, std::vector<double> values, std::string name) {
  if (values.size() != grid->cell_count()) throw std::invalid_argument("weight: one value per active cell expected");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("weight values must be finite and non-negative");

  WeightField w;
  w.grid = grid;
  w.values = std::move(values);
  w.preset_name = std::move(name);

  const double h = grid->spacing();
  double lip = 0.0;
  double bmin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid->cell_count(); ++c) {
    const std::size_t anchor = grid->cell_anchor(c);
    for (int d = 0; d < grid->dim(); ++d) {
      const std::ptrdiff_t nb = grid->cell_at_anchor(anchor + grid->stride(d));
      if (nb < 0) continue;
      lip = std::max(lip, std::abs(w.values[static_cast<std::size_t>(nb)] - w.values[c]) / h);
    }
    if (grid->cell_touches_boundary(c)) bmin = std::min(bmin, w.values[c]);
  }
  w.lipschitz_estimate = lip;
  w.boundary_min = std::isfinite(bmin) ? bmin : 0.0;
  return w;
}

WeightField make_weight(WeightPreset preset, const WeightParams& params, GridPtr grid) {
  WeightParams p = params;
  if (!p.center) p.center = grid->center();
  if (!(p.c > 0.0)) throw std::invalid_argument("weight parameter c must be positive");
  if (preset == WeightPreset::ring) {
    if (!(p.k > 0.0)) throw std::invalid_argument("ring weight parameter k must be positive");
    if (!(p.r0 >= 0.0)) throw std::invalid_argument("ring weight parameter r0 must be non-negative");
  }
  std::vector<double> values(grid->cell_count());
  for (std::size_t c = 0; c < values.size(); ++c)
    values[c] = weight_value(preset, p, grid->cell_center(c), grid->dim());
  auto w = WeightField::from_values(grid, std::move(values), std::string(to_string(preset)));
  if (!(w.boundary_min > 0.0))
    throw std::invalid_argument("weight preset '" + w.preset_name + "' vanishes on the boundary (boundary_min = 0)");
  return w;
}

namespace {

// Summed-area table over the lattice cells, indexed like the nodes: entry at
// node i holds the sum over cells with lattice coordinates < coords(i).
std::vector<long double> summed_area(const GridDomain& grid, const std::vector<double>& cell_values) {
  std::vector<long double> table(grid.node_count(), 0.0L);
  std::size_t shift = 0;
  for (int d = 0; d < grid.dim(); ++d) shift += grid.stride(d);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) table[grid.cell_anchor(c) + shift] = cell_values[c];
  const std::size_t n = static_cast<std::size_t>(grid.resolution()) + 1;
  for (int d = 0; d < grid.dim(); ++d) {
    const std::size_t s = grid.stride(d);
    for (std::size_t i = 0; i < table.size(); ++i)
      if ((i / s) % n != 0) table[i] += table[i - s];
  }
  return table;
}

long double box_sum(const std::vector<long double>& table, const GridDomain& grid, std::size_t lo, std::size_t side) {
  long double sum = 0.0L;
  const int dim = grid.dim();
  for (int corner = 0; corner < (1 << dim); ++corner) {
    std::size_t idx = lo;
    int lows = 0;
    for (int d = 0; d < dim; ++d) {
      if ((corner >> d) & 1)
        idx += side * grid.stride(d);
      else
        ++lows;
    }
    sum += (lows % 2 == 0) ? table[idx] : -table[idx];
  }
  return sum;
}

}  // namespace

double aq_constant(const WeightField& a, double q, const AqOptions& options) {
  if (!(q > 1.0)) throw std::invalid_argument("aq_constant: q must exceed 1");
  const GridDomain& grid = *a.grid;
  double amax = 0.0;
  for (double v : a.values) amax = std::max(amax, v);
  if (!(amax > 0.0)) return std::numeric_limits<double>::infinity();

  // The constant is scale invariant; normalizing makes constant weights exact.
  const double beta = 1.0 / (q - 1.0);
  const double floor = options.floor_relative;
  std::vector<double> scaled(a.values.size());
  std::vector<double> inverted(a.values.size());
  std::vector<double> ones(a.values.size(), 1.0);
  for (std::size_t c = 0; c < scaled.size(); ++c) {
    scaled[c] = std::max(a.values[c] / amax, floor);
    inverted[c] = std::pow(scaled[c], -beta);
    if (!std::isfinite(inverted[c])) return std::numeric_limits<double>::infinity();
  }
  const auto sum_a = summed_area(grid, scaled);
  const auto sum_inv = summed_area(grid, inverted);
  const auto count = summed_area(grid, ones);

  const int dim = grid.dim();
  const std::size_t res = static_cast<std::size_t>(grid.resolution());
  std::vector<std::size_t> sides;
  if (options.family == CubeFamily::all) {
    for (std::size_t s = 1; s <= res; ++s) sides.push_back(s);
  } else {
    for (std::size_t s = res; s >= 1; s /= 2) {
      sides.push_back(s);
      if (s % 2 != 0) break;
    }
  }

  double best = 0.0;
  for (std::size_t side : sides) {
    const std::size_t step = options.family == CubeFamily::all ? 1 : side;
    std::array<std::size_t, 3> lo{0, 0, 0};
    while (true) {
      std::size_t idx = 0;
      for (int d = 0; d < dim; ++d) idx += lo[static_cast<std::size_t>(d)] * grid.stride(d);
      const long double cnt = box_sum(count, grid, idx, side);
      if (cnt > 0.5L) {
        const long double avg_a = box_sum(sum_a, grid, idx, side) / cnt;
        const long double avg_inv = box_sum(sum_inv, grid, idx, side) / cnt;
        if (!std::isfinite(static_cast<double>(avg_inv))) return std::numeric_limits<double>::infinity();
        const double value = static_cast<double>(avg_a * std::pow(avg_inv, static_cast<long double>(q - 1.0)));
        best = std::max(best, value);
      }
      int d = 0;
      for (; d < dim; ++d) {
        auto& l = lo[static_cast<std::size_t>(d)];
        l += step;
        if (l + side <= res) break;
        l = 0;
      }
      if (d == dim) break;
    }
  }
  return best;
}

H0Report check_h0(const WeightField& a, double q, int n, double p_min, const AqOptions& options) {
  if (!(p_min > 1.0 && p_min < q)) throw std::invalid_argument("check_h0 requires 1 < p_min < q");
  H0Report r;
  r.lipschitz_estimate = a.lipschitz_estimate;
  r.boundary_min = a.boundary_min;
  r.floor_relative = options.floor_relative;
  r.aq_constant = aq_constant(a, q, options);
  r.ratio_condition = q / p_min < 1.0 + 1.0 / n;
  r.q_below_n = q < n;
  r.exponent_ratio_ok = r.ratio_condition && r.q_below_n;
  if (!(r.boundary_min > 0.0) || !std::isfinite(r.aq_constant))
    r.verdict = Verdict::fail;
  else if (!r.exponent_ratio_ok)
    r.verdict = Verdict::warn;
  else
    r.verdict = Verdict::pass;
  return r;
}

}  // namespace dphase
