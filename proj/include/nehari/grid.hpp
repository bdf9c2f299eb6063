#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

/// Raised for out-of-range or non-finite construction parameters.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when two fields (or a field and a grid) do not share a mesh.
class GridMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Surface area of the unit sphere S^{dim-1} in R^dim.
double unit_sphere_area(int dim);

/// Volume of the ball of radius `radius` in R^dim.
double ball_volume(int dim, double radius);

/// Radial mesh of the ball B_R(0) in R^N.
///
/// Nodes run from r = 0 to r = R. Spacings grow geometrically so that the
/// outermost cell is `grading` times wider than the innermost one. Quadrature
/// weights integrate the piecewise-linear interpolant of nodal samples against
/// the exact radial density |S^{N-1}| r^{N-1}, so constants and linear
/// functions of r are integrated exactly.
///
/// Nonlinear integrands g(u_h) of the interpolant u_h use a per-cell Gauss
/// rule instead (see quadrature()).
class RadialGrid {
public:
  RadialGrid(int dim, double radius, std::vector<double> nodes);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t cell_count() const { return nodes_.size() - 1; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Exact measure of the spherical shell {r_i <= |x| <= r_{i+1}}.
  std::span<const double> shell_volumes() const { return shell_volumes_; }

  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double spacing(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }
  double sphere_area() const { return sphere_area_; }

  /// Gauss point inside a cell: u_h = left * u[cell] + right * u[cell + 1],
  /// weight includes |S^{N-1}| r^{N-1}.
  struct QuadraturePoint {
    std::size_t cell;
    double left;
    double right;
    double weight;
  };
  std::span<const QuadraturePoint> quadrature() const { return quadrature_; }

  bool same_mesh(const RadialGrid &other) const;

private:
  int dim_;
  double radius_;
  double sphere_area_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> shell_volumes_;
  std::vector<QuadraturePoint> quadrature_;
};

inline constexpr int kCellGaussPoints = 6;

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Build a graded radial grid. grading = 1 is uniform; grading > 1 clusters
/// nodes near the origin (last spacing / first spacing = grading).
GridPtr build_radial_grid(int dim, double radius, int node_count, double grading = 4.0);

/// Real radial function sampled at the nodes of a grid.
class Field {
public:
  Field() = default;
  Field(GridPtr grid, std::vector<double> values);

  /// Zero field on `grid`.
  explicit Field(GridPtr grid);

  /// Sample `fn(r)` at every node.
  template <class Fn> static Field sample(GridPtr grid, Fn &&fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = fn(grid->node(i));
    return Field(std::move(grid), std::move(v));
  }

  const RadialGrid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double> &mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  bool is_zero() const;

  Field &operator+=(const Field &other);
  Field &operator-=(const Field &other);
  Field &operator*=(double c);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field &b);
Field operator-(Field a, const Field &b);
Field operator*(double c, Field a);
Field operator*(Field a, double c);

/// Throws GridMismatch unless both fields live on the same mesh.
void require_same_grid(const Field &a, const Field &b);

/// Approximates the integral of f(|x|) over B_R.
double integrate(const Field &f);

/// Integral of f over the ball B_rho, rho <= R, including the partial cell.
double integrate_ball(const Field &f, double rho);

/// Nodal derivative df/dr from staggered cell slopes (second order on
/// nonuniform meshes, one-sided second-order stencils at the endpoints).
Field radial_derivative(const Field &f);

/// (int |f|^s dx)^{1/s}, s > 1.
double lp_norm(const Field &f, double s);

/// Slope of the piecewise-linear interpolant on every cell.
std::vector<double> cell_slopes(const Field &f);

/// Writes "r,value" rows, one per node, with 17 significant digits.
void write_field_csv(std::ostream &os, const Field &f, const std::string &value_name = "value");

/// Writes {"dim":..,"radius":..,"nodes":[..]}.
void write_grid_json(std::ostream &os, const RadialGrid &grid);

/// Reads a grid written by write_grid_json.
GridPtr read_grid_json(std::istream &is);

/// Reads a two-column CSV written by write_field_csv onto `grid`.
Field read_field_csv(std::istream &is, GridPtr grid);

} // namespace nehari
