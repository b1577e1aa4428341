#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "biparam/grid.hpp"

namespace biparam {

/// Function on [0,1)^{n} constant on level-K cells of one parameter.
struct AxisFunction {
  AxisGrid axis;
  std::vector<double> values;

  AxisFunction() = default;
  explicit AxisFunction(const AxisGrid& a, double fill = 0.0) : axis(a), values(a.cells(), fill) {}
  AxisFunction(const AxisGrid& a, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Function on the product grid. Values are row-major: cell (i1, i2) at i1 * N2 + i2,
/// with each axis index in Morton order.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const DyadicGrid& g, double fill = 0.0);
  GridFunction(const DyadicGrid& g, std::vector<double> values);

  static GridFunction from(const DyadicGrid& g, const std::function<double(std::size_t, std::size_t)>& fn);
  static GridFunction tensor(const AxisFunction& u, const AxisFunction& v);

  const DyadicGrid& grid() const { return grid_; }
  std::size_t rows() const { return grid_.axis1.cells(); }
  std::size_t cols() const { return grid_.axis2.cells(); }
  std::size_t size() const { return values_.size(); }

  double& at(std::size_t i1, std::size_t i2) { return values_[i1 * cols() + i2]; }
  double at(std::size_t i1, std::size_t i2) const { return values_[i1 * cols() + i2]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);
  GridFunction& axpy(double s, const GridFunction& o);

  /// Pointwise product.
  GridFunction times(const GridFunction& o) const;
  GridFunction transposed() const;
  GridFunction map(const std::function<double(double)>& fn) const;

  double max_abs() const;
  /// Lebesgue L^2 inner product on the grid.
  double inner(const GridFunction& o) const;
  double l2_norm() const;

 private:
  DyadicGrid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* what);

/// Max pointwise difference scaled by max(1, |a|_inf, |b|_inf).
double relative_residual(const GridFunction& a, const GridFunction& b);

}  // namespace biparam
