#include "dphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dphase {

Shape parse_shape(std::string_view name) {
  if (name == "interval") return Shape::interval;
  if (name == "square") return Shape::square;
  if (name == "disk") return Shape::disk;
  throw std::invalid_argument("unknown domain shape '" + std::string(name) + "'");
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::interval: return "interval";
    case Shape::square: return "square";
    case Shape::disk: return "disk";
  }
  return "?";
}

GridDomain::GridDomain(int dim, int resolution, Shape shape)
    : dim_(dim), resolution_(resolution), shape_(shape) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (resolution < 4) throw std::invalid_argument("grid resolution must be at least 4 (degenerate stencil)");
  if (shape == Shape::interval && dim != 1) throw std::invalid_argument("shape 'interval' requires dim = 1");
  if (shape == Shape::square && dim == 1) throw std::invalid_argument("shape 'square' requires dim 2 or 3");
  if (shape == Shape::disk && dim != 2) throw std::invalid_argument("shape 'disk' requires dim = 2");

  side_ = shape == Shape::disk ? 2.0 : 1.0;
  origin_ = shape == Shape::disk ? -1.0 : 0.0;
  spacing_ = side_ / resolution;
  cell_volume_ = std::pow(spacing_, dim);

  const std::size_t nodes_per_axis = static_cast<std::size_t>(resolution) + 1;
  std::size_t node_total = 1;
  for (int d = 0; d < 3; ++d) {
    stride_[static_cast<std::size_t>(d)] = d < dim ? node_total : 0;
    if (d < dim) node_total *= nodes_per_axis;
  }

  // Lattice cells are indexed by their lower-corner node.
  std::vector<char> lattice_active(node_total, 0);
  for (std::size_t node = 0; node < node_total; ++node) {
    const auto c = lattice_coords(node);
    bool in_lattice = true;
    for (int d = 0; d < dim; ++d) in_lattice = in_lattice && c[static_cast<std::size_t>(d)] < resolution;
    if (!in_lattice) continue;
    bool inside = true;
    if (shape == Shape::disk) {
      double r2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double x = origin_ + (c[static_cast<std::size_t>(d)] + 0.5) * spacing_;
        r2 += x * x;
      }
      inside = r2 < 1.0;
    }
    lattice_active[node] = inside ? 1 : 0;
  }

  kinds_.assign(node_total, NodeKind::exterior);
  dof_.assign(node_total, -1);
  cell_of_anchor_.assign(node_total, -1);
  const int corner_count = 1 << dim;
  for (std::size_t node = 0; node < node_total; ++node) {
    const auto c = lattice_coords(node);
    int touching_active = 0;
    int touching_lattice = 0;
    for (int corner = 0; corner < corner_count; ++corner) {
      std::size_t cell = node;
      bool valid = true;
      for (int d = 0; d < dim; ++d) {
        const bool shift = (corner >> d) & 1;
        const int cd = c[static_cast<std::size_t>(d)] - (shift ? 1 : 0);
        if (cd < 0 || cd >= resolution) {
          valid = false;
          break;
        }
        if (shift) cell -= stride(d);
      }
      if (!valid) continue;
      ++touching_lattice;
      touching_active += lattice_active[cell];
    }
    if (touching_active == corner_count && touching_lattice == corner_count) {
      kinds_[node] = NodeKind::interior;
      dof_[node] = static_cast<std::ptrdiff_t>(interior_.size());
      interior_.push_back(node);
    } else if (touching_active > 0) {
      kinds_[node] = NodeKind::boundary;
    }
    if (lattice_active[node]) {
      cell_of_anchor_[node] = static_cast<std::ptrdiff_t>(cell_anchor_.size());
      cell_anchor_.push_back(node);
    }
  }
  measure_ = static_cast<double>(cell_anchor_.size()) * cell_volume_;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(cell_anchor_.size() * static_cast<std::size_t>(dim) * 2);
  const double inv_h = 1.0 / spacing_;
  for (std::size_t cell = 0; cell < cell_anchor_.size(); ++cell) {
    const std::size_t anchor = cell_anchor_[cell];
    for (int d = 0; d < dim; ++d) {
      const auto row = static_cast<int>(cell * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d));
      triplets.emplace_back(row, static_cast<int>(anchor + stride(d)), inv_h);
      triplets.emplace_back(row, static_cast<int>(anchor), -inv_h);
    }
  }
  grad_.resize(static_cast<Eigen::Index>(cell_anchor_.size() * static_cast<std::size_t>(dim)),
               static_cast<Eigen::Index>(node_total));
  grad_.setFromTriplets(triplets.begin(), triplets.end());
}

std::array<int, 3> GridDomain::lattice_coords(std::size_t node) const {
  std::array<int, 3> c{0, 0, 0};
  const std::size_t n = static_cast<std::size_t>(resolution_) + 1;
  for (int d = 0; d < dim_; ++d) {
    c[static_cast<std::size_t>(d)] = static_cast<int>(node % n);
    node /= n;
  }
  return c;
}

double GridDomain::inradius() const noexcept { return shape_ == Shape::disk ? 1.0 : 0.5; }

Point GridDomain::center() const noexcept {
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) p[static_cast<std::size_t>(d)] = origin_ + 0.5 * side_;
  return p;
}

double GridDomain::diameter() const noexcept {
  if (shape_ == Shape::disk) return 2.0;
  return side_ * std::sqrt(static_cast<double>(dim_));
}

std::vector<std::size_t> GridDomain::cell_corners(std::size_t cell) const {
  const std::size_t anchor = cell_anchor_[cell];
  std::vector<std::size_t> corners;
  corners.reserve(std::size_t{1} << dim_);
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    std::size_t node = anchor;
    for (int d = 0; d < dim_; ++d)
      if ((corner >> d) & 1) node += stride(d);
    corners.push_back(node);
  }
  return corners;
}

bool GridDomain::cell_touches_boundary(std::size_t cell) const {
  const auto corners = cell_corners(cell);
  return std::any_of(corners.begin(), corners.end(), [&](std::size_t n) { return is_boundary(n); });
}

Point GridDomain::node_position(std::size_t node) const {
  const auto c = lattice_coords(node);
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) p[static_cast<std::size_t>(d)] = origin_ + c[static_cast<std::size_t>(d)] * spacing_;
  return p;
}

Point GridDomain::cell_center(std::size_t cell) const {
  Point p = node_position(cell_anchor_[cell]);
  for (int d = 0; d < dim_; ++d) p[static_cast<std::size_t>(d)] += 0.5 * spacing_;
  return p;
}

GridPtr build_grid(int dim, int resolution, Shape shape) {
  return std::make_shared<const GridDomain>(dim, resolution, shape);
}

ScalarField::ScalarField(GridPtr g) : grid(std::move(g)), values(grid->node_count(), 0.0) {}

ScalarField::ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->node_count()) throw std::invalid_argument("scalar field size does not match grid");
}

bool ScalarField::is_dirichlet() const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!grid->is_interior(i) && values[i] != 0.0) return false;
  return true;
}

void ScalarField::apply_dirichlet() {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!grid->is_interior(i)) values[i] = 0.0;
}

std::vector<double> ScalarField::cell_values() const {
  std::vector<double> out(grid->cell_count());
  const double inv = 1.0 / static_cast<double>(1 << grid->dim());
  for (std::size_t c = 0; c < out.size(); ++c) {
    double sum = 0.0;
    for (std::size_t node : grid->cell_corners(c)) sum += values[node];
    out[c] = sum * inv;
  }
  return out;
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

VectorField::VectorField(GridPtr g)
    : grid(std::move(g)), components(grid->cell_count() * static_cast<std::size_t>(grid->dim()), 0.0) {}

VectorField::VectorField(GridPtr g, std::vector<double> c) : grid(std::move(g)), components(std::move(c)) {
  if (components.size() != grid->cell_count() * static_cast<std::size_t>(grid->dim()))
    throw std::invalid_argument("vector field size does not match grid");
}

std::span<const double> VectorField::at(std::size_t cell) const {
  const auto n = static_cast<std::size_t>(dim());
  return {components.data() + cell * n, n};
}

std::span<double> VectorField::at(std::size_t cell) {
  const auto n = static_cast<std::size_t>(dim());
  return {components.data() + cell * n, n};
}

std::vector<double> VectorField::magnitudes() const {
  std::vector<double> out(cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    double s = 0.0;
    for (double x : at(c)) s += x * x;
    out[c] = std::sqrt(s);
  }
  return out;
}

double VectorField::sup_magnitude() const {
  const auto m = magnitudes();
  return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

VectorField gradient(const ScalarField& u) {
  const auto& g = u.grid->gradient_matrix();
  Eigen::Map<const Eigen::VectorXd> uv(u.values.data(), static_cast<Eigen::Index>(u.values.size()));
  VectorField out(u.grid);
  Eigen::Map<Eigen::VectorXd> ov(out.components.data(), static_cast<Eigen::Index>(out.components.size()));
  ov = g * uv;
  return out;
}

ScalarField gradient_transpose(const VectorField& field) {
  const auto& g = field.grid->gradient_matrix();
  Eigen::Map<const Eigen::VectorXd> fv(field.components.data(), static_cast<Eigen::Index>(field.components.size()));
  ScalarField out(field.grid);
  Eigen::Map<Eigen::VectorXd> ov(out.values.data(), static_cast<Eigen::Index>(out.values.size()));
  ov = g.transpose() * fv;
  return out;
}

double integrate(const GridDomain& grid, std::span<const double> cell_values) {
  if (cell_values.size() != grid.cell_count()) throw std::invalid_argument("integrate: one value per active cell expected");
  double sum = 0.0;
  for (double v : cell_values) sum += v;
  return sum * grid.cell_volume();
}

std::vector<double> dot(const VectorField& lhs, const VectorField& rhs) {
  if (lhs.grid != rhs.grid) throw std::invalid_argument("dot: fields live on different grids");
  std::vector<double> out(lhs.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto a = lhs.at(c);
    const auto b = rhs.at(c);
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
    out[c] = s;
  }
  return out;
}

}  // namespace dphase
