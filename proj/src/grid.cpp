#include "nehari/grid.hpp"

#include "nehari/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace nehari {

double unit_sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ball_volume(int dim, double radius) {
  return unit_sphere_area(dim) * std::pow(radius, dim) / dim;
}

namespace {

// Enough Gauss points to integrate (hat function) * r^{N-1} exactly.
int exact_order(int dim) { return dim / 2 + 1; }

} // namespace

RadialGrid::RadialGrid(int dim, double radius, std::vector<double> nodes)
    : dim_(dim), radius_(radius), sphere_area_(unit_sphere_area(dim)), nodes_(std::move(nodes)) {
  if (dim_ < 3)
    throw ParameterError("RadialGrid: dim must be >= 3 (got " + std::to_string(dim_) + ")");
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw ParameterError("RadialGrid: radius must be positive and finite");
  if (nodes_.size() < 3)
    throw ParameterError("RadialGrid: at least 3 nodes required");
  if (nodes_.front() != 0.0 || nodes_.back() != radius_)
    throw ParameterError("RadialGrid: nodes must start at 0 and end at the radius");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i + 1] > nodes_[i]))
      throw ParameterError("RadialGrid: nodes must be strictly increasing");

  const int order = exact_order(dim_);
  const double power = dim_ - 1;
  weights_.assign(nodes_.size(), 0.0);
  shell_volumes_.resize(nodes_.size() - 1);
  for (std::size_t c = 0; c + 1 < nodes_.size(); ++c) {
    const double a = nodes_[c], b = nodes_[c + 1], h = b - a;
    const double left = gauss_integrate([&](double r) { return (b - r) / h * std::pow(r, power); }, a, b, order);
    const double right = gauss_integrate([&](double r) { return (r - a) / h * std::pow(r, power); }, a, b, order);
    weights_[c] += sphere_area_ * left;
    weights_[c + 1] += sphere_area_ * right;
    shell_volumes_[c] = sphere_area_ * (std::pow(b, dim_) - std::pow(a, dim_)) / dim_;
  }

  const GaussRule &rule = gauss_legendre(kCellGaussPoints);
  quadrature_.reserve(cell_count() * rule.points.size());
  for (std::size_t c = 0; c + 1 < nodes_.size(); ++c) {
    const double a = nodes_[c], b = nodes_[c + 1], h = b - a;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double x = 0.5 * (rule.points[k] + 1.0);
      const double r = a + h * x;
      quadrature_.push_back({c, 1.0 - x, x, 0.5 * h * rule.weights[k] * sphere_area_ * std::pow(r, power)});
    }
  }
}

bool RadialGrid::same_mesh(const RadialGrid &other) const {
  return this == &other || (dim_ == other.dim_ && radius_ == other.radius_ && nodes_ == other.nodes_);
}

GridPtr build_radial_grid(int dim, double radius, int node_count, double grading) {
  if (dim < 3)
    throw ParameterError("build_radial_grid: dim must be >= 3 (got " + std::to_string(dim) + ")");
  if (!std::isfinite(radius) || radius <= 0.0)
    throw ParameterError("build_radial_grid: radius must be positive and finite");
  if (node_count < 16)
    throw ParameterError("build_radial_grid: node_count must be >= 16");
  if (!std::isfinite(grading) || grading < 1.0)
    throw ParameterError("build_radial_grid: grading must be finite and >= 1");

  const int cells = node_count - 1;
  std::vector<double> nodes(node_count);
  if (grading == 1.0) {
    for (int i = 0; i < node_count; ++i)
      nodes[i] = radius * i / cells;
  } else {
    // h_i = h_0 q^i with q^{cells-1} = grading.
    const double log_q = std::log(grading) / (cells - 1);
    const double total = std::expm1(cells * log_q) / std::expm1(log_q);
    for (int i = 0; i < node_count; ++i)
      nodes[i] = radius * (std::expm1(i * log_q) / std::expm1(log_q)) / total;
  }
  nodes.front() = 0.0;
  nodes.back() = radius;
  return std::make_shared<const RadialGrid>(dim, radius, std::move(nodes));
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_)
    throw ParameterError("Field: null grid");
  if (values_.size() != grid_->size())
    throw GridMismatch("Field: value count " + std::to_string(values_.size()) + " does not match node count " +
                       std::to_string(grid_->size()));
  for (double v : values_)
    if (!std::isfinite(v))
      throw ParameterError("Field: non-finite sample");
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_)
    throw ParameterError("Field: null grid");
  values_.assign(grid_->size(), 0.0);
}

bool Field::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Field &Field::operator+=(const Field &other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += other.values_[i];
  return *this;
}

Field &Field::operator-=(const Field &other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] -= other.values_[i];
  return *this;
}

Field &Field::operator*=(double c) {
  for (double &v : values_)
    v *= c;
  return *this;
}

Field operator+(Field a, const Field &b) { return a += b; }
Field operator-(Field a, const Field &b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }
Field operator*(Field a, double c) { return a *= c; }

void require_same_grid(const Field &a, const Field &b) {
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_mesh(b.grid()))
    throw GridMismatch("fields live on different grids");
}

double integrate(const Field &f) {
  const auto w = f.grid().weights();
  const auto v = f.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    sum += w[i] * v[i];
  return sum;
}

double integrate_ball(const Field &f, double rho) {
  const RadialGrid &g = f.grid();
  if (rho <= 0.0)
    return 0.0;
  if (rho >= g.radius())
    return integrate(f);
  const auto nodes = g.nodes();
  const auto v = f.values();
  const std::size_t last = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), rho) - nodes.begin()) - 1;
  const int order = exact_order(g.dim()) + 1;
  double sum = 0.0;
  for (std::size_t c = 0; c <= last && c + 1 < nodes.size(); ++c) {
    const double a = nodes[c], b = nodes[c + 1], h = b - a;
    const double upper = std::min(b, rho);
    if (upper <= a)
      break;
    sum += gauss_integrate(
        [&](double r) { return (v[c] * (b - r) + v[c + 1] * (r - a)) / h * std::pow(r, g.dim() - 1); }, a, upper,
        order);
  }
  return g.sphere_area() * sum;
}

std::vector<double> cell_slopes(const Field &f) {
  const RadialGrid &g = f.grid();
  std::vector<double> s(g.cell_count());
  for (std::size_t c = 0; c < s.size(); ++c)
    s[c] = (f[c + 1] - f[c]) / g.spacing(c);
  return s;
}

Field radial_derivative(const Field &f) {
  const RadialGrid &g = f.grid();
  const std::size_t n = g.size();
  if (n < 3)
    throw ParameterError("radial_derivative: need at least 3 nodes");
  const auto s = cell_slopes(f);
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = g.spacing(i - 1), hr = g.spacing(i);
    d[i] = (hr * s[i - 1] + hl * s[i]) / (hl + hr);
  }
  // One-sided three-point stencils, exact for quadratics.
  {
    const double h0 = g.spacing(0), h1 = g.spacing(1);
    d[0] = s[0] - h0 * (s[1] - s[0]) / (h0 + h1);
  }
  {
    const double hl = g.spacing(n - 3), hr = g.spacing(n - 2);
    d[n - 1] = s[n - 2] + hr * (s[n - 2] - s[n - 3]) / (hl + hr);
  }
  return Field(f.grid_ptr(), std::move(d));
}

double lp_norm(const Field &f, double s) {
  if (!(s > 1.0) || !std::isfinite(s))
    throw ParameterError("lp_norm: exponent must be > 1");
  const auto w = f.grid().weights();
  const auto v = f.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    sum += w[i] * std::pow(std::abs(v[i]), s);
  return std::pow(sum, 1.0 / s);
}

void write_field_csv(std::ostream &os, const Field &f, const std::string &value_name) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << "r," << value_name << '\n';
  for (std::size_t i = 0; i < f.size(); ++i)
    os << f.grid().node(i) << ',' << f[i] << '\n';
  os.flags(flags);
  os.precision(prec);
}

void write_grid_json(std::ostream &os, const RadialGrid &grid) {
  nlohmann::json j;
  j["dim"] = grid.dim();
  j["radius"] = grid.radius();
  j["nodes"] = std::vector<double>(grid.nodes().begin(), grid.nodes().end());
  os << j.dump(2) << '\n';
}

GridPtr read_grid_json(std::istream &is) {
  const auto j = nlohmann::json::parse(is);
  return std::make_shared<const RadialGrid>(j.at("dim").get<int>(), j.at("radius").get<double>(),
                                            j.at("nodes").get<std::vector<double>>());
}

Field read_field_csv(std::istream &is, GridPtr grid) {
  std::string line;
  std::getline(is, line); // header
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParameterError("read_field_csv: malformed row '" + line + "'");
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return Field(std::move(grid), std::move(values));
}

} // namespace nehari
