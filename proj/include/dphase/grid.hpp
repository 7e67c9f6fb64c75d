#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

namespace dphase {

enum class Shape { interval, square, disk };

Shape parse_shape(std::string_view name);
std::string_view to_string(Shape shape);

enum class NodeKind : std::uint8_t { interior, boundary, exterior };

using Point = std::array<double, 3>;

/// Uniform Cartesian grid over the unit interval, the unit square/cube or the
/// unit disk (masked square [-1,1]^2).
///
/// Unknowns live on lattice nodes. Quadrature lives on "active" cells, the
/// lattice cells whose center lies in the domain. A node is interior when
/// every lattice cell touching it is active, boundary when it touches at least
/// one active cell, exterior otherwise. Dirichlet fields vanish on all
/// non-interior nodes, so their gradient vanishes outside the active cells.
class GridDomain {
public:
  GridDomain(int dim, int resolution, Shape shape);

  int dim() const noexcept { return dim_; }
  int resolution() const noexcept { return resolution_; }
  Shape shape() const noexcept { return shape_; }
  double spacing() const noexcept { return spacing_; }
  double side() const noexcept { return side_; }
  double origin() const noexcept { return origin_; }
  /// h^n
  double cell_volume() const noexcept { return cell_volume_; }
  /// Number of active cells times h^n.
  double measure() const noexcept { return measure_; }
  /// Radius of the largest ball centred at center() inside the domain.
  double inradius() const noexcept;
  Point center() const noexcept;
  /// Largest distance between two points of the domain.
  double diameter() const noexcept;

  std::size_t node_count() const noexcept { return kinds_.size(); }
  std::size_t cell_count() const noexcept { return cell_anchor_.size(); }

  NodeKind kind(std::size_t node) const { return kinds_[node]; }
  bool is_interior(std::size_t node) const { return kinds_[node] == NodeKind::interior; }
  bool is_boundary(std::size_t node) const { return kinds_[node] == NodeKind::boundary; }
  std::span<const NodeKind> node_kinds() const noexcept { return kinds_; }

  std::span<const std::size_t> interior_nodes() const noexcept { return interior_; }
  /// Index of `node` among the interior nodes, or -1.
  std::ptrdiff_t dof_of(std::size_t node) const { return dof_[node]; }

  /// Lattice index offset between a node and its neighbour along `axis`.
  std::size_t stride(int axis) const noexcept { return stride_[static_cast<std::size_t>(axis)]; }
  /// Lower corner node of an active cell; the forward-difference stencil of
  /// the cell uses it and its `dim` axis neighbours.
  std::size_t cell_anchor(std::size_t cell) const { return cell_anchor_[cell]; }
  /// Active cell whose anchor is `node`, or -1.
  std::ptrdiff_t cell_at_anchor(std::size_t node) const { return cell_of_anchor_[node]; }
  /// All 2^dim corner nodes of an active cell.
  std::vector<std::size_t> cell_corners(std::size_t cell) const;
  /// True when the cell has a boundary node among its corners.
  bool cell_touches_boundary(std::size_t cell) const;

  Point node_position(std::size_t node) const;
  Point cell_center(std::size_t cell) const;

  /// Forward-difference gradient as a (dim*cells) x nodes sparse matrix.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& gradient_matrix() const noexcept { return grad_; }

private:
  int dim_;
  int resolution_;
  Shape shape_;
  double side_;
  double origin_;
  double spacing_;
  double cell_volume_;
  double measure_ = 0.0;
  std::array<std::size_t, 3> stride_{};
  std::vector<NodeKind> kinds_;
  std::vector<std::size_t> interior_;
  std::vector<std::ptrdiff_t> dof_;
  std::vector<std::size_t> cell_anchor_;
  std::vector<std::ptrdiff_t> cell_of_anchor_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> grad_;

  std::array<int, 3> lattice_coords(std::size_t node) const;
};

using GridPtr = std::shared_ptr<const GridDomain>;

/// Throws std::invalid_argument for resolution < 4, dim outside {1,2,3}, or a
/// shape that does not fit the dimension.
GridPtr build_grid(int dim, int resolution, Shape shape);

/// Nodal function on a grid.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g);
  ScalarField(GridPtr g, std::vector<double> v);

  /// Zero on every non-interior node.
  bool is_dirichlet() const;
  /// Sets every non-interior node to zero.
  void apply_dirichlet();
  /// Average of the cell corners, one value per active cell.
  std::vector<double> cell_values() const;
  double sup_norm() const;
};

/// Cell-wise vectors, stored cell-major: components[cell*dim + axis].
struct VectorField {
  GridPtr grid;
  std::vector<double> components;

  VectorField() = default;
  explicit VectorField(GridPtr g);
  VectorField(GridPtr g, std::vector<double> c);

  int dim() const { return grid->dim(); }
  std::size_t cell_count() const { return grid->cell_count(); }
  std::span<const double> at(std::size_t cell) const;
  std::span<double> at(std::size_t cell);
  /// Euclidean magnitude per cell.
  std::vector<double> magnitudes() const;
  double sup_magnitude() const;
};

VectorField gradient(const ScalarField& u);
/// Exact transpose of `gradient`: <gradient(u), F> = <u, gradient_transpose(F)>
/// in the plain Euclidean pairing of coefficient vectors.
ScalarField gradient_transpose(const VectorField& field);

/// Midpoint rule over active cells: h^n * sum of values.
double integrate(const GridDomain& grid, std::span<const double> cell_values);

/// Cell-wise dot product of two vector fields on the same grid.
std::vector<double> dot(const VectorField& lhs, const VectorField& rhs);

}  // namespace dphase
