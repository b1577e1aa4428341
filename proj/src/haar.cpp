#include "biparam/haar.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace biparam {

std::size_t rep_size(const AxisGrid& a, Rep r) { return r == Rep::Box ? a.cube_count() : a.cells(); }

namespace {

void haar_analyze(const AxisGrid& a, const double* in, double* out) {
  const int C = a.child_count();
  const int S = a.signature_count();
  std::vector<double> avg(in, in + a.cells());
  std::vector<double> next;
  for (int k = a.K - 1; k >= 0; --k) {
    const std::size_t m = a.cubes_at(k);
    const double scale = std::sqrt(a.volume(k)) / C;
    next.assign(m, 0.0);
    for (std::size_t q = 0; q < m; ++q) {
      const double* ch = &avg[q * C];
      double sum = 0.0;
      for (int c = 0; c < C; ++c) sum += ch[c];
      next[q] = sum / C;
      for (int e = 0; e < S; ++e) {
        double s = 0.0;
        for (int c = 0; c < C; ++c) s += haar_sign(e, c) * ch[c];
        out[a.basis_index(k, q, e)] = scale * s;
      }
    }
    avg.swap(next);
  }
  out[0] = avg[0];
}

void haar_synthesize(const AxisGrid& a, const double* in, double* out) {
  const int C = a.child_count();
  const int S = a.signature_count();
  std::vector<double> avg{in[0]};
  std::vector<double> next;
  for (int k = 0; k < a.K; ++k) {
    const std::size_t m = a.cubes_at(k);
    const double inv = 1.0 / std::sqrt(a.volume(k));
    next.assign(m * C, 0.0);
    for (std::size_t q = 0; q < m; ++q)
      for (int c = 0; c < C; ++c) {
        double v = avg[q];
        for (int e = 0; e < S; ++e) v += in[a.basis_index(k, q, e)] * haar_sign(e, c) * inv;
        next[q * C + c] = v;
      }
    avg.swap(next);
  }
  std::copy(avg.begin(), avg.end(), out);
}

void box_analyze(const AxisGrid& a, const double* in, double* out) {
  const int C = a.child_count();
  std::copy(in, in + a.cells(), out + a.cube_offset(a.K));
  for (int k = a.K - 1; k >= 0; --k) {
    const double* fine = out + a.cube_offset(k + 1);
    double* coarse = out + a.cube_offset(k);
    for (std::size_t q = 0; q < a.cubes_at(k); ++q) {
      double s = 0.0;
      for (int c = 0; c < C; ++c) s += fine[q * C + c];
      coarse[q] = s / C;
    }
  }
}

void box_synthesize(const AxisGrid& a, const double* in, double* out) {
  const int C = a.child_count();
  std::vector<double> acc{in[0]};
  std::vector<double> next;
  for (int k = 1; k <= a.K; ++k) {
    const double inv = 1.0 / a.volume(k);
    const double* level = in + a.cube_offset(k);
    next.resize(a.cubes_at(k));
    for (std::size_t q = 0; q < next.size(); ++q) next[q] = acc[q / C] + level[q] * inv;
    acc.swap(next);
  }
  std::copy(acc.begin(), acc.end(), out);
}

}  // namespace

void axis_analyze(const AxisGrid& a, Rep r, const double* in, double* out) {
  switch (r) {
    case Rep::Haar: haar_analyze(a, in, out); break;
    case Rep::Box: box_analyze(a, in, out); break;
    case Rep::Cell: std::copy(in, in + a.cells(), out); break;
  }
}

void axis_synthesize(const AxisGrid& a, Rep r, const double* in, double* out) {
  switch (r) {
    case Rep::Haar: haar_synthesize(a, in, out); break;
    case Rep::Box: box_synthesize(a, in, out); break;
    case Rep::Cell: std::copy(in, in + a.cells(), out); break;
  }
}

Table2D::Table2D(const DyadicGrid& g, Rep r1, Rep r2)
    : grid(g), rep1(r1), rep2(r2), dim1(rep_size(g.axis1, r1)), dim2(rep_size(g.axis2, r2)), data(dim1 * dim2, 0.0) {}

Table2D analyze(const GridFunction& f, Rep r1, Rep r2) {
  const DyadicGrid& g = f.grid();
  Table2D t(g, r1, r2);
  const std::size_t n1 = g.axis1.cells(), n2 = g.axis2.cells();
  std::vector<double> tmp(n1 * t.dim2);
  for (std::size_t i = 0; i < n1; ++i) axis_analyze(g.axis2, r2, &f.values()[i * n2], &tmp[i * t.dim2]);
  std::vector<double> col_in(n1), col_out(t.dim1);
  for (std::size_t j = 0; j < t.dim2; ++j) {
    for (std::size_t i = 0; i < n1; ++i) col_in[i] = tmp[i * t.dim2 + j];
    axis_analyze(g.axis1, r1, col_in.data(), col_out.data());
    for (std::size_t i = 0; i < t.dim1; ++i) t.at(i, j) = col_out[i];
  }
  return t;
}

GridFunction synthesize(const Table2D& t) {
  const DyadicGrid& g = t.grid;
  const std::size_t n1 = g.axis1.cells(), n2 = g.axis2.cells();
  std::vector<double> tmp(n1 * t.dim2);
  std::vector<double> col_in(t.dim1), col_out(n1);
  for (std::size_t j = 0; j < t.dim2; ++j) {
    for (std::size_t i = 0; i < t.dim1; ++i) col_in[i] = t.at(i, j);
    axis_synthesize(g.axis1, t.rep1, col_in.data(), col_out.data());
    for (std::size_t i = 0; i < n1; ++i) tmp[i * t.dim2 + j] = col_out[i];
  }
  GridFunction f(g);
  for (std::size_t i = 0; i < n1; ++i) axis_synthesize(g.axis2, t.rep2, &tmp[i * t.dim2], &f.values()[i * n2]);
  return f;
}

Table2D reanalyze(const Table2D& t, Rep r1, Rep r2) { return analyze(synthesize(t), r1, r2); }

HaarSpectrum::HaarSpectrum(Table2D t) : table_(std::move(t)) {
  if (table_.rep1 != Rep::Haar || table_.rep2 != Rep::Haar) throw StructuralError("spectrum table must be Haar x Haar");
}

double HaarSpectrum::cancellative(const Cube& q1, int e1, const Cube& q2, int e2) const {
  const auto& g = grid();
  return table_.at(g.axis1.basis_index(q1.level, q1.pos, e1), g.axis2.basis_index(q2.level, q2.pos, e2));
}

double& HaarSpectrum::cancellative(const Cube& q1, int e1, const Cube& q2, int e2) {
  const auto& g = grid();
  return table_.at(g.axis1.basis_index(q1.level, q1.pos, e1), g.axis2.basis_index(q2.level, q2.pos, e2));
}

double HaarSpectrum::hybrid1(const Cube& q1, int e1) const {
  return table_.at(grid().axis1.basis_index(q1.level, q1.pos, e1), 0);
}

double HaarSpectrum::hybrid2(const Cube& q2, int e2) const {
  return table_.at(0, grid().axis2.basis_index(q2.level, q2.pos, e2));
}

double HaarSpectrum::energy() const {
  double s = 0.0;
  for (double v : table_.data) s += v * v;
  return s;
}

HaarSpectrum haar_forward(const GridFunction& f) { return HaarSpectrum(analyze(f, Rep::Haar, Rep::Haar)); }

GridFunction haar_inverse(const HaarSpectrum& s) { return synthesize(s.table()); }

GridFunction haar_tensor(const DyadicGrid& g, const Cube& q1, int e1, const Cube& q2, int e2) {
  return GridFunction::tensor(haar_function(g.axis1, q1, e1), haar_function(g.axis2, q2, e2));
}

std::vector<double> haar_forward(const AxisFunction& u) {
  std::vector<double> c(u.size());
  axis_analyze(u.axis, Rep::Haar, u.values.data(), c.data());
  return c;
}

AxisFunction haar_inverse(const AxisGrid& a, const std::vector<double>& coefs) {
  if (coefs.size() != a.cells()) throw StructuralError("coefficient vector does not match axis");
  AxisFunction u(a);
  axis_synthesize(a, Rep::Haar, coefs.data(), u.values.data());
  return u;
}

AxisFunction haar_function(const AxisGrid& a, const Cube& q, int eps) {
  validate_cube(a, q);
  if (q.level >= a.K || eps < 0 || eps >= a.signature_count()) throw StructuralError("not a cancellative Haar index");
  std::vector<double> c(a.cells(), 0.0);
  c[a.basis_index(q.level, q.pos, eps)] = 1.0;
  return haar_inverse(a, c);
}

namespace {
std::pair<std::size_t, std::size_t> cell_range(const AxisGrid& a, const Cube& q) {
  std::size_t first = a.first_descendant(q.pos, a.K - q.level);
  return {first, first + a.cubes_at(a.K - q.level)};
}
}  // namespace

double rectangle_average(const GridFunction& f, const Rectangle& r) {
  const auto& g = f.grid();
  validate_cube(g.axis1, r.q1);
  validate_cube(g.axis2, r.q2);
  auto [a1, b1] = cell_range(g.axis1, r.q1);
  auto [a2, b2] = cell_range(g.axis2, r.q2);
  double s = 0.0;
  for (std::size_t i = a1; i < b1; ++i)
    for (std::size_t j = a2; j < b2; ++j) s += f.at(i, j);
  return s / static_cast<double>((b1 - a1) * (b2 - a2));
}

namespace {
// Basis indices of strict ancestors of q with the value of each basis function on q;
// index 0 (the constant) is included with value 1.
std::vector<std::pair<std::size_t, double>> ancestor_values(const AxisGrid& a, const Cube& q) {
  std::vector<std::pair<std::size_t, double>> out{{0, 1.0}};
  for (int k = 0; k < q.level; ++k) {
    std::size_t anc = a.ancestor(q.pos, q.level - k);
    for (int e = 0; e < a.signature_count(); ++e)
      out.emplace_back(a.basis_index(k, anc, e), haar_value_on(a, k, e, q.pos, q.level));
  }
  return out;
}
}  // namespace

double rectangle_average_series(const HaarSpectrum& s, const Rectangle& r) {
  const auto& g = s.grid();
  validate_cube(g.axis1, r.q1);
  validate_cube(g.axis2, r.q2);
  double sum = 0.0;
  for (auto [i1, v1] : ancestor_values(g.axis1, r.q1))
    for (auto [i2, v2] : ancestor_values(g.axis2, r.q2)) sum += s.coef(i1, i2) * v1 * v2;
  return sum;
}

double cube_average(const AxisFunction& u, const Cube& q) {
  validate_cube(u.axis, q);
  auto [a, b] = cell_range(u.axis, q);
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += u[i];
  return s / static_cast<double>(b - a);
}

double average_difference_series(const AxisGrid& a, const std::vector<double>& coefs, const Cube& q, const Cube& r) {
  validate_cube(a, q);
  validate_cube(a, r);
  if (q.level <= r.level || a.ancestor(q.pos, q.level - r.level) != r.pos)
    throw StructuralError("average difference needs Q strictly inside R");
  double s = 0.0;
  for (int k = r.level; k < q.level; ++k) {
    std::size_t anc = a.ancestor(q.pos, q.level - k);
    for (int e = 0; e < a.signature_count(); ++e) s += coefs[a.basis_index(k, anc, e)] * haar_value_on(a, k, e, q.pos, q.level);
  }
  return s;
}

AxisFunction slice_average(const GridFunction& f, int t, const Cube& q) {
  const auto& g = f.grid();
  if (t != 1 && t != 2) throw StructuralError("parameter index must be 1 or 2");
  validate_cube(g.axis(t), q);
  auto [a, b] = cell_range(g.axis(t), q);
  const double inv = 1.0 / static_cast<double>(b - a);
  if (t == 1) {
    AxisFunction out(g.axis2);
    for (std::size_t i = a; i < b; ++i)
      for (std::size_t j = 0; j < f.cols(); ++j) out[j] += f.at(i, j) * inv;
    return out;
  }
  AxisFunction out(g.axis1);
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = a; j < b; ++j) out[i] += f.at(i, j) * inv;
  return out;
}

namespace {
bool inside(const AxisGrid& a, const BasisEntry& e, const Cube& q) {
  return e.level >= q.level && a.ancestor(e.pos, e.level - q.level) == q.pos;
}
}  // namespace

OscillationSplit local_mean_oscillation_expansion(const GridFunction& f, const Rectangle& r) {
  const auto& g = f.grid();
  validate_cube(g.axis1, r.q1);
  validate_cube(g.axis2, r.q2);
  HaarSpectrum s = haar_forward(f);
  HaarSpectrum block(g);
  for (std::size_t i1 = 1; i1 < g.axis1.cells(); ++i1) {
    if (!inside(g.axis1, decode_basis(g.axis1, i1), r.q1)) continue;
    for (std::size_t i2 = 1; i2 < g.axis2.cells(); ++i2)
      if (inside(g.axis2, decode_basis(g.axis2, i2), r.q2)) block.coef(i1, i2) = s.coef(i1, i2);
  }
  auto [a1, b1] = cell_range(g.axis1, r.q1);
  auto [a2, b2] = cell_range(g.axis2, r.q2);
  GridFunction blockf = haar_inverse(block);
  const double avg = rectangle_average(f, r);
  AxisFunction m1 = slice_average(f, 1, r.q1);
  AxisFunction m2 = slice_average(f, 2, r.q2);
  OscillationSplit out{GridFunction(g), GridFunction(g), GridFunction(g)};
  for (std::size_t i = a1; i < b1; ++i)
    for (std::size_t j = a2; j < b2; ++j) {
      out.cancellative.at(i, j) = blockf.at(i, j);
      out.slice1.at(i, j) = m1[j] - avg;
      out.slice2.at(i, j) = m2[i] - avg;
    }
  return out;
}

MartingaleMask MartingaleMask::identity(const DyadicGrid& g) { return {g, std::vector<signed char>(g.cells(), 1)}; }

MartingaleMask MartingaleMask::signs_of(const HaarSpectrum& s) {
  std::vector<signed char> v(s.table().data.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.table().data[i] < 0.0 ? -1 : 1;
  v[0] = 1;
  return {s.grid(), std::move(v)};
}

MartingaleMask MartingaleMask::random(const DyadicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<signed char> v(g.cells());
  for (auto& x : v) x = coin(rng) ? 1 : -1;
  v[0] = 1;
  return {g, std::move(v)};
}

MartingaleMask MartingaleMask::per_parameter(const DyadicGrid& g, int t, const std::vector<int>& axis_signs) {
  if (axis_signs.size() != g.axis(t).cells()) throw StructuralError("per-parameter mask has wrong length");
  std::vector<signed char> v(g.cells());
  const std::size_t n2 = g.axis2.cells();
  for (std::size_t i = 0; i < g.axis1.cells(); ++i)
    for (std::size_t j = 0; j < n2; ++j) v[i * n2 + j] = axis_signs[t == 1 ? i : j] < 0 ? -1 : 1;
  v[0] = 1;
  return {g, std::move(v)};
}

GridFunction martingale_transform(const GridFunction& f, const MartingaleMask& mask) {
  if (!(f.grid() == mask.grid())) throw StructuralError("mask grid mismatch");
  HaarSpectrum s = haar_forward(f);
  auto& d = s.table().data;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (mask.sign(i / s.table().dim2, i % s.table().dim2) < 0) d[i] = -d[i];
  return haar_inverse(s);
}

GridFunction project_fully_cancellative(const GridFunction& f) {
  HaarSpectrum s = haar_forward(f);
  auto& t = s.table();
  for (std::size_t i = 0; i < t.dim1; ++i) t.at(i, 0) = 0.0;
  for (std::size_t j = 0; j < t.dim2; ++j) t.at(0, j) = 0.0;
  return haar_inverse(s);
}

bool is_fully_cancellative(const GridFunction& f, double tol) {
  HaarSpectrum s = haar_forward(f);
  const auto& t = s.table();
  const double scale = std::max(1.0, f.max_abs());
  for (std::size_t i = 0; i < t.dim1; ++i)
    if (std::abs(t.at(i, 0)) > tol * scale) return false;
  for (std::size_t j = 0; j < t.dim2; ++j)
    if (std::abs(t.at(0, j)) > tol * scale) return false;
  return true;
}

}  // namespace biparam
