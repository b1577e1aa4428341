#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "biparam/haar.hpp"
#include "biparam/operator.hpp"

namespace biparam {

/// Biparameter paraproducts. PiF is f -> Pi_f b with b fixed, the sixteenth
/// term of the product decomposition.
enum class ParaproductKind {
  Pi, PiStar, Gamma,
  Pi01, Pi10, Gamma01, Gamma01Star, Gamma10, Gamma10Star,
  pi01, pi01Star, pi10, pi10Star, gamma01, gamma10,
  PiF
};

enum class OneParamKind { Pi, PiStar, Gamma, PiF };

inline constexpr std::array<ParaproductKind, 9> kProductKinds = {
    ParaproductKind::Pi,      ParaproductKind::PiStar,      ParaproductKind::Gamma,
    ParaproductKind::Pi01,    ParaproductKind::Pi10,        ParaproductKind::Gamma01,
    ParaproductKind::Gamma01Star, ParaproductKind::Gamma10, ParaproductKind::Gamma10Star};
inline constexpr std::array<ParaproductKind, 6> kLittleKinds = {
    ParaproductKind::pi01, ParaproductKind::pi01Star, ParaproductKind::pi10,
    ParaproductKind::pi10Star, ParaproductKind::gamma01, ParaproductKind::gamma10};

std::string tag(ParaproductKind k);
ParaproductKind paraproduct_from_tag(const std::string& s);
ParaproductKind adjoint(ParaproductKind k);
bool is_little_bmo_kind(ParaproductKind k);
std::string tag(OneParamKind k);
OneParamKind adjoint(OneParamKind k);

/// Symbol b with every coefficient family the paraproducts read:
/// spectrum, <b, h_{Q1} (x) 1_{Q2}/|Q2|>, <b, 1_{Q1}/|Q1| (x) h_{Q2}> and rectangle averages.
class Symbol {
 public:
  explicit Symbol(GridFunction b);

  const GridFunction& function() const { return b_; }
  const DyadicGrid& grid() const { return b_.grid(); }
  /// Table with the given per-axis representation (Haar or Box).
  const Table2D& table(Rep r1, Rep r2) const;
  const HaarSpectrum& spectrum() const { return spectrum_; }

 private:
  GridFunction b_;
  HaarSpectrum spectrum_;
  Table2D hb_, bh_, bb_;
};

GridFunction apply_paraproduct(ParaproductKind kind, const Symbol& b, const GridFunction& f);
AxisFunction apply_paraproduct(OneParamKind kind, const AxisFunction& b, const AxisFunction& f);

OperatorHandle paraproduct_operator(ParaproductKind kind, Symbol b);

struct ProductDecomposition {
  std::vector<std::pair<std::string, GridFunction>> terms;
  GridFunction sum() const;
};

/// b f split into the fifteen paraproducts plus Pi_f b. Both inputs must be fully cancellative.
ProductDecomposition product_decomposition(const Symbol& b, const GridFunction& f);

}  // namespace biparam
