#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biparam/paraproducts.hpp"
#include "biparam/shifts.hpp"
#include "biparam/weights.hpp"
#include "json.hpp"

namespace biparam {

/// b (T f) - T (b f)
GridFunction commutator_apply(const GridFunction& b, const LinearOperator& t, const GridFunction& f);

enum class NormMethod { Auto, DenseSVD, PowerIteration, ProjectedAscent };
std::string to_string(NormMethod m);

struct NormOptions {
  NormMethod method = NormMethod::Auto;
  std::size_t dense_limit = 256;  // Auto uses the dense path up to this dimension (hard cap 4096)
  int restarts = 8;
  int max_iterations = 500;
  double ascent_tolerance = 1e-9;
  double krylov_tolerance = 1e-8;
  int krylov_max_steps = 400;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct NormEstimate {
  double value = 0.0;
  NormMethod method = NormMethod::Auto;
  int restarts = 0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool lower_bound = false;  // true when the value comes from ascent

  nlohmann::json to_json() const;
};

/// ||T : L^p(mu) -> L^p(lambda)||.
NormEstimate operator_norm(const LinearOperator& t, const Weight& mu, const Weight& lambda, double p,
                           const NormOptions& opts = {});

enum class HilbertAxes { First, Second, Both };

/// Periodic discrete Hilbert transform with multiplier -i sign(k), zero at k = 0 and
/// at the Nyquist frequency. Needs n1 = n2 = 1 for the selected axes.
GridFunction hilbert_tensor(const GridFunction& f, HilbertAxes which = HilbertAxes::Both);
OperatorHandle hilbert_operator(const DyadicGrid& g, HilbertAxes which = HilbertAxes::Both);

struct RemainderReport {
  std::vector<std::pair<std::string, GridFunction>> terms;
  double operand_scale = 0.0;
  double residual = 0.0;  // max pointwise mismatch divided by the operand scale

  nlohmann::json to_json() const;
};

/// R f = Pi_{S f} b - S Pi_f b computed by definition, closed form and the split R^1 + R^2.
RemainderReport remainder_cancellative(const GridFunction& b, const CancellativeShift& s, const GridFunction& f);

/// [b, Pi_a] f against the paraproduct expansion minus Lambda + lambda01 + lambda10.
RemainderReport remainder_full_standard(const GridFunction& b, const ProductBmoSymbol& a, const GridFunction& f);

/// The remainder of [b, Pi_{a;o}] against its six-term expansion.
RemainderReport remainder_full_mixed(const GridFunction& b, const ProductBmoSymbol& a, Orientation o,
                                     const GridFunction& f);

struct BoundRatio {
  double norm = 0.0;
  double b_norm = 0.0;
  double factor = 1.0;
  double ratio = 0.0;
  NormEstimate estimate;
};

/// ||[b,T]||_{L^p(mu)->L^p(lambda)} / (factor * ||b||_{bmo(nu)}). A constant b gives 0.
BoundRatio upper_bound_ratio(const GridFunction& b, const OperatorHandle& t, const BloomTriple& triple,
                             double factor = 1.0, const NormOptions& opts = {});

/// (1 + max(i1,j1)) (1 + max(i2,j2))
double polynomial_factor(const ShiftComplexity& c);

/// ||b||_{bmo(nu)} / ||[b, H1 H2]||_{L^p(mu)->L^p(lambda)}.
BoundRatio lower_bound_ratio(const GridFunction& b, const BloomTriple& triple, const NormOptions& opts = {});

/// ||P_b||_{L^p(mu)->L^p(lambda)} divided by the product BMO(nu) norm (product kinds)
/// or the little bmo(nu) norm (little kinds).
BoundRatio paraproduct_norm_ratio(ParaproductKind kind, const GridFunction& b, const BloomTriple& triple,
                                  const NormOptions& opts = {});

}  // namespace biparam
