#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "biparam/complexity.hpp"
#include "biparam/haar.hpp"
#include "biparam/operator.hpp"
#include "biparam/weights.hpp"
#include "json.hpp"

namespace biparam {

/// One parameter of a shift: a cube R, P in (R)_i, Q in (R)_j and the
/// input/output signatures, resolved to Haar basis indices.
struct AxisShiftEntry {
  int r_level = 0;
  std::size_t r_pos = 0;
  std::size_t p_pos = 0;  // level r_level + i
  std::size_t q_pos = 0;  // level r_level + j
  int eps = 0;
  int delta = 0;
  std::size_t in = 0;   // basis index of h_P^eps
  std::size_t out = 0;  // basis index of h_Q^delta
};

std::vector<AxisShiftEntry> axis_shift_entries(const AxisGrid& a, int i, int j);

enum class CoefficientMode { Uniform, Adversarial };

/// Cancellative biparameter shift. Coefficients are stored as a dense
/// entries1 x entries2 table.
class CancellativeShift {
 public:
  CancellativeShift(const DyadicGrid& g, const ShiftComplexity& c, std::vector<double> coefficients);

  /// Keyed coefficients: the same cube data gives the same coefficient at any depth.
  static CancellativeShift random(const DyadicGrid& g, const ShiftComplexity& c, std::uint64_t seed,
                                  CoefficientMode mode = CoefficientMode::Uniform);
  /// Complexity zero with a = 1 when eps = delta: the orthogonal projection onto the cancellative part.
  static CancellativeShift diagonal(const DyadicGrid& g);

  const DyadicGrid& grid() const { return grid_; }
  const ShiftComplexity& complexity() const { return c_; }
  double bound() const { return bound_; }
  const std::vector<AxisShiftEntry>& entries1() const { return e1_; }
  const std::vector<AxisShiftEntry>& entries2() const { return e2_; }
  double coefficient(std::size_t k1, std::size_t k2) const { return a_[k1 * e2_.size() + k2]; }
  const std::vector<double>& coefficients() const { return a_; }

  HaarSpectrum apply_spectrum(const HaarSpectrum& f) const;
  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_transpose(const GridFunction& g) const;

 private:
  DyadicGrid grid_;
  ShiftComplexity c_;
  double bound_ = 1.0;
  std::vector<AxisShiftEntry> e1_, e2_;
  std::vector<double> a_;
};

/// 2^{-(n1/2)(i1+j1)} 2^{-(n2/2)(i2+j2)}
double shift_coefficient_bound(const DyadicGrid& g, const ShiftComplexity& c);

/// Fully cancellative symbol for the non-cancellative shifts.
class ProductBmoSymbol {
 public:
  /// Stores a / (2 * estimate) when normalize is set, so the estimated norm is at most 1/2.
  ProductBmoSymbol(GridFunction a, bool normalize = true, std::string id = "a");

  static ProductBmoSymbol random(const DyadicGrid& g, std::uint64_t seed, int depth1 = 3, int depth2 = 3);

  const GridFunction& function() const { return a_; }
  double raw_estimate() const { return raw_estimate_; }
  double estimate() const { return estimate_; }
  bool normalized() const { return normalized_; }
  const std::string& id() const { return id_; }

 private:
  GridFunction a_;
  double raw_estimate_ = 0.0;
  double estimate_ = 0.0;
  bool normalized_ = false;
  std::string id_;
};

GridFunction apply_full_standard(const ProductBmoSymbol& a, const GridFunction& f, bool adjoint = false);

enum class Orientation { P01, P10 };
std::string to_string(Orientation o);

GridFunction apply_full_mixed(const ProductBmoSymbol& a, Orientation o, const GridFunction& f);

/// Partial paraproduct symbols a_{P1 Q1 R1}: one fully cancellative function of the
/// second parameter per (R1, P1, Q1). For orientation P10 the roles of the
/// parameters swap and the data lives on the transposed grid.
class PartialSymbolSequence {
 public:
  struct Entry {
    int r_level;
    std::size_t r_pos, p_pos, q_pos;
    std::vector<double> coefs;  // Haar coefficients on the sequence parameter's partner axis
  };

  /// `functions` holds one function per entry of entries(), in order.
  PartialSymbolSequence(const DyadicGrid& g, int i, int j, Orientation o, const std::vector<AxisFunction>& functions);

  /// Keyed random symbols with one-parameter BMO norm equal to scale * bound.
  static PartialSymbolSequence random(const DyadicGrid& g, int i, int j, Orientation o, std::uint64_t seed,
                                      int depth = 3, double scale = 1.0);

  /// Cube data (R, P, Q) on the sequence axis, in storage order.
  static std::vector<Entry> skeleton(const DyadicGrid& g, int i, int j, Orientation o);

  const DyadicGrid& grid() const { return grid_; }
  int i() const { return i_; }
  int j() const { return j_; }
  Orientation orientation() const { return o_; }
  double bound() const { return bound_; }
  const std::vector<Entry>& entries() const { return entries_; }

  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_transpose(const GridFunction& g) const;

 private:
  GridFunction apply_native(const GridFunction& f) const;
  GridFunction transpose_native(const GridFunction& g) const;

  DyadicGrid grid_;    // user-facing grid
  DyadicGrid native_;  // grid with the sequence parameter first
  int i_ = 0, j_ = 0;
  Orientation o_ = Orientation::P01;
  double bound_ = 1.0;
  std::vector<Entry> entries_;
};

enum class ShiftKind { Cancellative, FullStandard, FullStandardAdjoint, FullMixed, Partial };
std::string to_string(ShiftKind k);
ShiftKind shift_kind_from_string(const std::string& s);

struct ShiftDescriptor {
  ShiftKind kind = ShiftKind::Cancellative;
  ShiftComplexity complexity;
  std::uint64_t seed = 0;
  Orientation orientation = Orientation::P01;
  CoefficientMode mode = CoefficientMode::Uniform;
  OperatorHandle op;
  double coef_min = 0.0, coef_max = 0.0, coef_sup = 0.0;
  std::string symbol_id;

  nlohmann::json to_json() const;
};

struct ShiftBuildOptions {
  CoefficientMode mode = CoefficientMode::Uniform;
  int symbol_depth = 3;
};

/// Builds a shift of any kind. Non-cancellative kinds validate the complexity
/// pattern they support.
ShiftDescriptor make_shift(const DyadicGrid& g, ShiftKind kind, const ShiftComplexity& c, Orientation o,
                           std::uint64_t seed, const ShiftBuildOptions& opts = {});

struct EnsembleConfig {
  int cap1 = 1;  // max(i1, j1) <= cap1
  int cap2 = 1;
  double delta = 0.5;
  int samples = 20;
  ShiftBuildOptions build;
  std::uint64_t seed = 0;
};

struct WeightedShift {
  double weight = 0.0;
  ShiftDescriptor shift;
};

/// 2^{-max(i1,j1) delta/2} 2^{-max(i2,j2) delta/2}
double ensemble_decay(const ShiftComplexity& c, double delta);
/// Sum of the decay weights over every complexity within the caps.
double ensemble_mass(int cap1, int cap2, double delta);
/// Same value from the closed form sum_m (2m+1) r^m per parameter.
double ensemble_mass_closed_form(int cap1, int cap2, double delta);
/// True when the kind is allowed for this complexity.
bool ensemble_pattern_allowed(ShiftKind k, const ShiftComplexity& c, Orientation o);

std::vector<WeightedShift> sample_shift_ensemble(const DyadicGrid& g, const EnsembleConfig& cfg);

/// sum_k weight_k S_k as one operator.
OperatorHandle ensemble_operator(const std::vector<WeightedShift>& shifts);

struct NormOptions;
/// Estimated ||S : L^p(w) -> L^p(w)||.
double shift_one_weight_ratio(const ShiftDescriptor& s, const Weight& w, double p, const NormOptions& opts);

}  // namespace biparam
