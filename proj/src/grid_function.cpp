#include "biparam/grid_function.hpp"

#include <algorithm>
#include <cmath>

namespace biparam {

AxisFunction::AxisFunction(const AxisGrid& a, std::vector<double> v) : axis(a), values(std::move(v)) {
  if (values.size() != a.cells()) throw StructuralError("axis function size does not match its grid");
}

GridFunction::GridFunction(const DyadicGrid& g, double fill) : grid_(g), values_(g.cells(), fill) {}

GridFunction::GridFunction(const DyadicGrid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
  if (values_.size() != g.cells()) throw StructuralError("grid function size does not match " + g.describe());
}

GridFunction GridFunction::from(const DyadicGrid& g, const std::function<double(std::size_t, std::size_t)>& fn) {
  GridFunction f(g);
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) f.at(i, j) = fn(i, j);
  return f;
}

GridFunction GridFunction::tensor(const AxisFunction& u, const AxisFunction& v) {
  DyadicGrid g(u.axis.n, v.axis.n, u.axis.K, v.axis.K);
  return from(g, [&](std::size_t i, std::size_t j) { return u[i] * v[j]; });
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!(a.grid() == b.grid()))
    throw StructuralError(std::string(what) + ": grid mismatch " + a.grid().describe() + " vs " + b.grid().describe());
}

GridFunction& GridFunction::operator+=(const GridFunction& o) { return axpy(1.0, o); }
GridFunction& GridFunction::operator-=(const GridFunction& o) { return axpy(-1.0, o); }

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction& GridFunction::axpy(double s, const GridFunction& o) {
  require_same_grid(*this, o, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

GridFunction GridFunction::times(const GridFunction& o) const {
  require_same_grid(*this, o, "pointwise product");
  GridFunction r(*this);
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] *= o.values_[i];
  return r;
}

GridFunction GridFunction::transposed() const {
  GridFunction r(grid_.transposed());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.at(j, i) = at(i, j);
  return r;
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
  GridFunction r(*this);
  for (double& v : r.values_) v = fn(v);
  return r;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::inner(const GridFunction& o) const {
  require_same_grid(*this, o, "inner product");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
  return s * grid_.cell_measure();
}

double GridFunction::l2_norm() const { return std::sqrt(inner(*this)); }

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

double relative_residual(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b, "residual");
  double scale = std::max({1.0, a.max_abs(), b.max_abs()});
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / scale;
}

}  // namespace biparam
