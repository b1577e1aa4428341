#pragma once

#include <cstdint>
#include <vector>

#include "biparam/grid_function.hpp"

namespace biparam {

/// Per-axis representation of a table.
///  Haar: coefficients against the orthonormal basis {1, h_Q^eps}.
///  Box:  pairings with 1_Q/|Q| for every cube of levels 0..K (averages).
///  Cell: untouched cell values.
enum class Rep { Haar, Box, Cell };

std::size_t rep_size(const AxisGrid& a, Rep r);

// Contiguous 1D transforms. Analysis and synthesis are mutual transposes for the
// Lebesgue pairing on cells and the plain pairing on coefficients.
void axis_analyze(const AxisGrid& a, Rep r, const double* in, double* out);
void axis_synthesize(const AxisGrid& a, Rep r, const double* in, double* out);

/// Dense 2D table in a per-axis representation.
struct Table2D {
  DyadicGrid grid;
  Rep rep1 = Rep::Cell;
  Rep rep2 = Rep::Cell;
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;
  std::vector<double> data;

  Table2D() = default;
  Table2D(const DyadicGrid& g, Rep r1, Rep r2);

  double& at(std::size_t i, std::size_t j) { return data[i * dim2 + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * dim2 + j]; }
};

Table2D analyze(const GridFunction& f, Rep r1, Rep r2);
GridFunction synthesize(const Table2D& t);
/// Converts one axis of a table between representations (analysis of the synthesized axis).
Table2D reanalyze(const Table2D& t, Rep r1, Rep r2);

/// Biparameter Haar spectrum. Entry (i1, i2) pairs basis functions i1 and i2;
/// row 0 and column 0 hold the hybrid parts, (0,0) the mean.
class HaarSpectrum {
 public:
  HaarSpectrum() = default;
  explicit HaarSpectrum(const DyadicGrid& g) : table_(g, Rep::Haar, Rep::Haar) {}
  explicit HaarSpectrum(Table2D t);

  const DyadicGrid& grid() const { return table_.grid; }
  const Table2D& table() const { return table_; }
  Table2D& table() { return table_; }

  double& coef(std::size_t i1, std::size_t i2) { return table_.at(i1, i2); }
  double coef(std::size_t i1, std::size_t i2) const { return table_.at(i1, i2); }

  double cancellative(const Cube& q1, int e1, const Cube& q2, int e2) const;
  double& cancellative(const Cube& q1, int e1, const Cube& q2, int e2);
  /// <f, h_{Q1}^{e1} (x) 1>
  double hybrid1(const Cube& q1, int e1) const;
  /// <f, 1 (x) h_{Q2}^{e2}>
  double hybrid2(const Cube& q2, int e2) const;
  double mean() const { return table_.at(0, 0); }

  /// Sum of squares of every entry; equals ||f||_2^2 by Parseval.
  double energy() const;

 private:
  Table2D table_;
};

HaarSpectrum haar_forward(const GridFunction& f);
GridFunction haar_inverse(const HaarSpectrum& s);

/// Single basis function h_{Q1}^{e1} (x) h_{Q2}^{e2}.
GridFunction haar_tensor(const DyadicGrid& g, const Cube& q1, int e1, const Cube& q2, int e2);

// One-parameter transforms of AxisFunction.
std::vector<double> haar_forward(const AxisFunction& u);
AxisFunction haar_inverse(const AxisGrid& a, const std::vector<double>& coefs);
AxisFunction haar_function(const AxisGrid& a, const Cube& q, int eps);

/// <f>_R by direct cell summation.
double rectangle_average(const GridFunction& f, const Rectangle& r);
/// <f>_R reassembled from the spectrum: strict-ancestor Haar values plus hybrid and mean parts.
double rectangle_average_series(const HaarSpectrum& s, const Rectangle& r);

double cube_average(const AxisFunction& u, const Cube& q);
/// <u>_Q - <u>_R for Q strictly inside R, summed over the Haar terms of cubes P with Q < P <= R.
double average_difference_series(const AxisGrid& a, const std::vector<double>& coefs, const Cube& q, const Cube& r);

/// m_Q f as a function of the other variable: t = 1 averages x1 over Q, t = 2 averages x2.
AxisFunction slice_average(const GridFunction& f, int t, const Cube& q);

struct OscillationSplit {
  GridFunction cancellative;  // 1_R times the Haar block over P1 in Q1, P2 in Q2
  GridFunction slice1;        // 1_R (m_{Q1} f(x2) - <f>_R)
  GridFunction slice2;        // 1_R (m_{Q2} f(x1) - <f>_R)
};

OscillationSplit local_mean_oscillation_expansion(const GridFunction& f, const Rectangle& r);

/// Sign multiplier on the spectrum. The mean entry is always +1.
class MartingaleMask {
 public:
  static MartingaleMask identity(const DyadicGrid& g);
  static MartingaleMask signs_of(const HaarSpectrum& s);
  static MartingaleMask random(const DyadicGrid& g, std::uint64_t seed);
  /// tau depends only on the parameter-t cube and signature.
  static MartingaleMask per_parameter(const DyadicGrid& g, int t, const std::vector<int>& axis_signs);

  const DyadicGrid& grid() const { return grid_; }
  int sign(std::size_t i1, std::size_t i2) const { return signs_[i1 * grid_.axis2.cells() + i2]; }

 private:
  MartingaleMask(const DyadicGrid& g, std::vector<signed char> s) : grid_(g), signs_(std::move(s)) {}
  DyadicGrid grid_;
  std::vector<signed char> signs_;
};

GridFunction martingale_transform(const GridFunction& f, const MartingaleMask& mask);

/// Removes hybrid and mean parts so every slice average vanishes.
GridFunction project_fully_cancellative(const GridFunction& f);
bool is_fully_cancellative(const GridFunction& f, double tol = 1e-12);

}  // namespace biparam
