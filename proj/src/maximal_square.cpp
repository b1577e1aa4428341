#include "biparam/maximal_square.hpp"

#include <algorithm>
#include <cmath>

#include "biparam/haar.hpp"

namespace biparam {

std::string ShiftComplexity::str() const {
  return "(" + std::to_string(i1) + "," + std::to_string(i2) + ")->(" + std::to_string(j1) + "," + std::to_string(j2) + ")";
}

void require_admissible_shift(const DyadicGrid& g, const ShiftComplexity& c) {
  if (std::min({c.i1, c.i2, c.j1, c.j2}) < 0) throw StructuralError("complexity entries must be non-negative");
  if (c.max1() > g.axis1.K - 1 || c.max2() > g.axis2.K - 1)
    throw StructuralError("complexity " + c.str() + " is not admissible on " + g.describe());
}

namespace {

void require_shift_square(const AxisGrid& a, int i, int j) {
  if (i < 0 || j < 0 || i > a.K - 1 || j > a.K)
    throw StructuralError("shifted square function complexity is not admissible");
}

GridFunction abs_of(const GridFunction& f) {
  return f.map([](double v) { return std::abs(v); });
}

// Sum of squared Haar coefficients per cube, indexed by cube, from a Haar axis.
void squares_per_cube(const AxisGrid& a, const double* haar, double* box, std::size_t stride_in, std::size_t stride_out) {
  for (std::size_t q = 0; q < a.cube_count(); ++q) box[q * stride_out] = 0.0;
  for (int k = 0; k < a.K; ++k)
    for (std::size_t p = 0; p < a.cubes_at(k); ++p) {
      double s = 0.0;
      for (int e = 0; e < a.signature_count(); ++e) {
        double v = haar[a.basis_index(k, p, e) * stride_in];
        s += v * v;
      }
      box[a.cube_index(k, p) * stride_out] = s;
    }
}

GridFunction sqrt_of(GridFunction f) {
  for (auto& v : f.values()) v = std::sqrt(std::max(v, 0.0));
  return f;
}

// Per cube R (levels r with r+i <= K-1, r+j <= K): (sum_{P in (R)_i} |c(P,e)|)^2 summed over e,
// times 2^{j n}. Output indexed by cube.
std::vector<double> shifted_weights(const AxisGrid& a, const std::vector<double>& coef_abs, int i, int j) {
  std::vector<double> out(a.cube_count(), 0.0);
  for (int r = 0; r + i <= a.K - 1 && r + j <= a.K; ++r)
    for (std::size_t pos = 0; pos < a.cubes_at(r); ++pos) {
      double total = 0.0;
      for (int e = 0; e < a.signature_count(); ++e) {
        double s = 0.0;
        std::size_t first = a.first_descendant(pos, i);
        for (std::size_t p = first; p < first + a.cubes_at(i); ++p) s += coef_abs[a.basis_index(r + i, p, e)];
        total += s * s;
      }
      out[a.cube_index(r, pos)] = total * std::ldexp(1.0, j * a.n);
    }
  return out;
}

}  // namespace

GridFunction maximal_dyadic(const GridFunction& f, MaxScope scope) {
  const auto& g = f.grid();
  GridFunction a = abs_of(f);
  GridFunction out(g);
  if (scope == MaxScope::Strong) {
    Table2D t = analyze(a, Rep::Box, Rep::Box);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t j = 0; j < f.cols(); ++j) {
        double m = 0.0;
        for (int k1 = 0; k1 <= g.axis1.K; ++k1)
          for (int k2 = 0; k2 <= g.axis2.K; ++k2)
            m = std::max(m, t.at(g.axis1.cube_index(k1, g.axis1.ancestor(i, g.axis1.K - k1)),
                                 g.axis2.cube_index(k2, g.axis2.ancestor(j, g.axis2.K - k2))));
        out.at(i, j) = m;
      }
    return out;
  }
  const bool first = scope == MaxScope::Parameter1;
  Table2D t = analyze(a, first ? Rep::Box : Rep::Cell, first ? Rep::Cell : Rep::Box);
  const AxisGrid& ax = first ? g.axis1 : g.axis2;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) {
      double m = 0.0;
      std::size_t c = first ? i : j;
      for (int k = 0; k <= ax.K; ++k) {
        std::size_t q = ax.cube_index(k, ax.ancestor(c, ax.K - k));
        m = std::max(m, first ? t.at(q, j) : t.at(i, q));
      }
      out.at(i, j) = m;
    }
  return out;
}

AxisFunction maximal_dyadic(const AxisFunction& u) {
  const AxisGrid& a = u.axis;
  std::vector<double> abs(u.size()), box(a.cube_count());
  for (std::size_t i = 0; i < u.size(); ++i) abs[i] = std::abs(u[i]);
  axis_analyze(a, Rep::Box, abs.data(), box.data());
  AxisFunction out(a);
  for (std::size_t c = 0; c < u.size(); ++c)
    for (int k = 0; k <= a.K; ++k) out[c] = std::max(out[c], box[a.cube_index(k, a.ancestor(c, a.K - k))]);
  return out;
}

GridFunction square_function(const GridFunction& f, SquareScope scope) {
  const auto& g = f.grid();
  if (scope == SquareScope::Biparameter) {
    HaarSpectrum s = haar_forward(f);
    Table2D e(g, Rep::Box, Rep::Box);
    for (int k1 = 0; k1 < g.axis1.K; ++k1)
      for (std::size_t p1 = 0; p1 < g.axis1.cubes_at(k1); ++p1)
        for (int k2 = 0; k2 < g.axis2.K; ++k2)
          for (std::size_t p2 = 0; p2 < g.axis2.cubes_at(k2); ++p2) {
            double sum = 0.0;
            for (int e1 = 0; e1 < g.axis1.signature_count(); ++e1)
              for (int e2 = 0; e2 < g.axis2.signature_count(); ++e2) {
                double v = s.cancellative({k1, p1}, e1, {k2, p2}, e2);
                sum += v * v;
              }
            e.at(g.axis1.cube_index(k1, p1), g.axis2.cube_index(k2, p2)) = sum;
          }
    return sqrt_of(synthesize(e));
  }
  if (scope == SquareScope::Parameter2) return square_function(f.transposed(), SquareScope::Parameter1).transposed();
  Table2D h = analyze(f, Rep::Haar, Rep::Cell);
  Table2D e(g, Rep::Box, Rep::Cell);
  for (std::size_t j = 0; j < h.dim2; ++j) squares_per_cube(g.axis1, &h.at(0, j), &e.at(0, j), h.dim2, e.dim2);
  return sqrt_of(synthesize(e));
}

AxisFunction square_function(const AxisFunction& u) {
  const AxisGrid& a = u.axis;
  std::vector<double> c(u.size()), box(a.cube_count());
  axis_analyze(a, Rep::Haar, u.values.data(), c.data());
  squares_per_cube(a, c.data(), box.data(), 1, 1);
  AxisFunction out(a);
  axis_synthesize(a, Rep::Box, box.data(), out.values.data());
  for (auto& v : out.values) v = std::sqrt(std::max(v, 0.0));
  return out;
}

GridFunction shifted_square_function(const GridFunction& f, const ShiftComplexity& c) {
  const auto& g = f.grid();
  require_shift_square(g.axis1, c.i1, c.j1);
  require_shift_square(g.axis2, c.i2, c.j2);
  HaarSpectrum s = haar_forward(f);
  const AxisGrid& a1 = g.axis1;
  const AxisGrid& a2 = g.axis2;
  Table2D e(g, Rep::Box, Rep::Box);
  const double spread = std::ldexp(1.0, c.j1 * a1.n + c.j2 * a2.n);
  for (int r1 = 0; r1 + c.i1 <= a1.K - 1 && r1 + c.j1 <= a1.K; ++r1)
    for (std::size_t q1 = 0; q1 < a1.cubes_at(r1); ++q1)
      for (int r2 = 0; r2 + c.i2 <= a2.K - 1 && r2 + c.j2 <= a2.K; ++r2)
        for (std::size_t q2 = 0; q2 < a2.cubes_at(r2); ++q2) {
          double total = 0.0;
          for (int e1 = 0; e1 < a1.signature_count(); ++e1)
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              double sum = 0.0;
              std::size_t f1 = a1.first_descendant(q1, c.i1), f2 = a2.first_descendant(q2, c.i2);
              for (std::size_t p1 = f1; p1 < f1 + a1.cubes_at(c.i1); ++p1)
                for (std::size_t p2 = f2; p2 < f2 + a2.cubes_at(c.i2); ++p2)
                  sum += std::abs(s.cancellative({r1 + c.i1, p1}, e1, {r2 + c.i2, p2}, e2));
              total += sum * sum;
            }
          e.at(a1.cube_index(r1, q1), a2.cube_index(r2, q2)) = total * spread;
        }
  return sqrt_of(synthesize(e));
}

AxisFunction shifted_square_function(const AxisFunction& u, int i, int j) {
  const AxisGrid& a = u.axis;
  require_shift_square(a, i, j);
  std::vector<double> c(u.size());
  axis_analyze(a, Rep::Haar, u.values.data(), c.data());
  for (auto& v : c) v = std::abs(v);
  auto box = shifted_weights(a, c, i, j);
  AxisFunction out(a);
  axis_synthesize(a, Rep::Box, box.data(), out.values.data());
  for (auto& v : out.values) v = std::sqrt(std::max(v, 0.0));
  return out;
}

GridFunction mixed_square_maximal(const GridFunction& f, MixedOrder order, std::optional<std::pair<int, int>> shift) {
  if (order == MixedOrder::MS) return mixed_square_maximal(f.transposed(), MixedOrder::SM, shift).transposed();
  const auto& g = f.grid();
  const AxisGrid& a1 = g.axis1;
  auto [i, j] = shift.value_or(std::pair<int, int>{0, 0});
  require_shift_square(a1, i, j);
  Table2D h = analyze(f, Rep::Haar, Rep::Cell);
  // Replace every row H_{Q1} f by M_{D2} H_{Q1} f.
  for (std::size_t r = 1; r < h.dim1; ++r) {
    AxisFunction row(g.axis2, std::vector<double>(&h.at(r, 0), &h.at(r, 0) + h.dim2));
    AxisFunction m = maximal_dyadic(row);
    std::copy(m.values.begin(), m.values.end(), &h.at(r, 0));
  }
  Table2D e(g, Rep::Box, Rep::Cell);
  std::vector<double> col(h.dim1);
  for (std::size_t x2 = 0; x2 < h.dim2; ++x2) {
    for (std::size_t r = 0; r < h.dim1; ++r) col[r] = h.at(r, x2);
    auto box = shifted_weights(a1, col, i, j);
    for (std::size_t q = 0; q < box.size(); ++q) e.at(q, x2) = box[q];
  }
  return sqrt_of(synthesize(e));
}

}  // namespace biparam
