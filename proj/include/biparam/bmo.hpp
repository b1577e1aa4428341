#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biparam/maximal_square.hpp"
#include "biparam/weights.hpp"

namespace biparam {

/// Little bmo(w) in L^1 oscillation form: max_R (1/w(R)) int_R |b - <b>_R| dx.
double bmo_little_norm(const GridFunction& b, const Weight& w);

/// Generic oscillation supremum
///   max_R ( (1/den(R)) int_R |b - <b>_R|^q num(x) dx )^{1/q}.
/// A null pointer stands for Lebesgue measure.
double oscillation_sup(const GridFunction& b, const Weight* den, const GridFunction* num, double q);

/// bmo(w; p') = max_R ( (1/w(R)) int_R |b - <b>_R|^{p'} dw' )^{1/p'}.
double bmo_one_weight_jn(const GridFunction& b, const Weight& w, double p);

struct JohnNirenbergVariants {
  double bmo_nu = 0.0;        // L^1 form with the Bloom weight
  double mu_lambda_p = 0.0;   // (1/mu(R)) int |b-<b>|^p dlambda
  double dual_form = 0.0;     // (1/lambda'(R)) int |b-<b>|^{p'} dmu'
};

JohnNirenbergVariants john_nirenberg_variants(const GridFunction& b, const BloomTriple& t);

/// Max over cells of the other variable of the one-parameter weighted BMO norm
/// of each slice, taken over both parameters.
double bmo_slicewise_norm(const GridFunction& b, const Weight& w);

/// Weighted Carleson energy table: c(R) = sum_eps |b^(R^eps)|^2 / <w>_R on
/// Box x Box indices (level-K cubes carry 0).
std::vector<double> carleson_coefficients(const GridFunction& b, const Weight& w);

/// Rectangular BMO: max_R ( (1/w(R)) sum_{T subset R} c(T) )^{1/2}.
double bmo_rectangular_norm(const GridFunction& b, const Weight& w);

/// Union of grid cells standing in for an open set.
struct OpenSetApprox {
  DyadicGrid grid;
  std::vector<std::uint8_t> shadow;  // row-major over cells, 1 = inside
  std::string method;
  long iterations = 0;
  std::uint64_t seed = 0;

  std::size_t cell_count() const;
  bool contains(const Rectangle& r) const;
  std::string bitmap() const;
};

struct ProductSearchBudget {
  int top_singles = 24;          // pairs are formed among this many best rectangles
  int greedy_seeds = 6;          // number of starting sets for the grow phase
  long max_evaluations = 400000; // hard cap on tentative objective evaluations
  int exhaustive_cells = 16;     // exhaustive subset search at or below this cell count
  std::uint64_t seed = 0;
};

struct ProductBmoResult {
  double value = 0.0;  // certified lower bound of the open-set supremum
  OpenSetApprox witness;
};

/// Product BMO(w) objective evaluated on a fixed cell set.
double product_bmo_objective(const GridFunction& b, const Weight& w, const OpenSetApprox& omega);

ProductBmoResult bmo_product_norm(const GridFunction& b, const Weight& w, const ProductSearchBudget& budget = {});

/// Dyadic L^2-coefficient BMO on one parameter: max_Q ( (1/|Q|) sum_{P subset Q} |u^(P)|^2 )^{1/2}.
double bmo_one_parameter_norm(const AxisFunction& u);

enum class H1Scope { Biparameter, Parameter1, Parameter2 };

/// ||S phi||_{L^1(w)}.
double h1_norm(const GridFunction& phi, const Weight& w, H1Scope scope = H1Scope::Biparameter);

enum class DualityScope { Product, Little1, Little2 };

struct DualityRatio {
  double pairing = 0.0;
  double b_norm = 0.0;
  double h1 = 0.0;
  double ratio = 0.0;
};

/// |<b,phi>| / (||b|| * ||S phi||_{L^1(w)}); product scope uses the search value for ||b||.
DualityRatio duality_ratio(const GridFunction& b, const GridFunction& phi, const Weight& w, DualityScope scope,
                           const ProductSearchBudget& budget = {});

}  // namespace biparam
