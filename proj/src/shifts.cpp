#include "biparam/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "biparam/bmo.hpp"
#include "biparam/commutators.hpp"
#include "biparam/paraproducts.hpp"
#include "biparam/random.hpp"

namespace biparam {

std::vector<AxisShiftEntry> axis_shift_entries(const AxisGrid& a, int i, int j) {
  std::vector<AxisShiftEntry> out;
  const int top = a.K - 1 - std::max(i, j);
  for (int k = 0; k <= top; ++k)
    for (std::size_t r = 0; r < a.cubes_at(k); ++r)
      for (std::size_t po = 0; po < a.cubes_at(i); ++po)
        for (std::size_t qo = 0; qo < a.cubes_at(j); ++qo)
          for (int e = 0; e < a.signature_count(); ++e)
            for (int d = 0; d < a.signature_count(); ++d) {
              AxisShiftEntry x;
              x.r_level = k;
              x.r_pos = r;
              x.p_pos = a.first_descendant(r, i) + po;
              x.q_pos = a.first_descendant(r, j) + qo;
              x.eps = e;
              x.delta = d;
              x.in = a.basis_index(k + i, x.p_pos, e);
              x.out = a.basis_index(k + j, x.q_pos, d);
              out.push_back(x);
            }
  return out;
}

double shift_coefficient_bound(const DyadicGrid& g, const ShiftComplexity& c) {
  return std::pow(2.0, -0.5 * (g.axis1.n * (c.i1 + c.j1) + g.axis2.n * (c.i2 + c.j2)));
}

CancellativeShift::CancellativeShift(const DyadicGrid& g, const ShiftComplexity& c, std::vector<double> coefficients)
    : grid_(g), c_(c), a_(std::move(coefficients)) {
  require_admissible_shift(g, c);
  bound_ = shift_coefficient_bound(g, c);
  e1_ = axis_shift_entries(g.axis1, c.i1, c.j1);
  e2_ = axis_shift_entries(g.axis2, c.i2, c.j2);
  if (a_.size() != e1_.size() * e2_.size())
    throw StructuralError("shift needs " + std::to_string(e1_.size() * e2_.size()) + " coefficients, got " +
                          std::to_string(a_.size()));
  for (double v : a_)
    if (!std::isfinite(v) || std::abs(v) > bound_ * (1.0 + 1e-12))
      throw StructuralError("shift coefficient exceeds the admissible bound");
}

CancellativeShift CancellativeShift::random(const DyadicGrid& g, const ShiftComplexity& c, std::uint64_t seed,
                                            CoefficientMode mode) {
  require_admissible_shift(g, c);
  const double bound = shift_coefficient_bound(g, c);
  const auto e1 = axis_shift_entries(g.axis1, c.i1, c.j1);
  const auto e2 = axis_shift_entries(g.axis2, c.i2, c.j2);
  std::vector<double> a(e1.size() * e2.size());
  std::size_t k = 0;
  for (const auto& x : e1)
    for (const auto& y : e2) {
      const double u = keyed_uniform(seed, {static_cast<std::uint64_t>(x.r_level), x.r_pos, x.p_pos, x.q_pos,
                                            static_cast<std::uint64_t>(x.eps), static_cast<std::uint64_t>(x.delta),
                                            static_cast<std::uint64_t>(y.r_level), y.r_pos, y.p_pos, y.q_pos,
                                            static_cast<std::uint64_t>(y.eps), static_cast<std::uint64_t>(y.delta)});
      a[k++] = mode == CoefficientMode::Uniform ? bound * u : (u < 0.0 ? -bound : bound);
    }
  return CancellativeShift(g, c, std::move(a));
}

CancellativeShift CancellativeShift::diagonal(const DyadicGrid& g) {
  const ShiftComplexity c{};
  const auto e1 = axis_shift_entries(g.axis1, 0, 0);
  const auto e2 = axis_shift_entries(g.axis2, 0, 0);
  std::vector<double> a(e1.size() * e2.size(), 0.0);
  for (std::size_t x = 0; x < e1.size(); ++x)
    for (std::size_t y = 0; y < e2.size(); ++y)
      if (e1[x].eps == e1[x].delta && e2[y].eps == e2[y].delta) a[x * e2.size() + y] = 1.0;
  return CancellativeShift(g, c, std::move(a));
}

HaarSpectrum CancellativeShift::apply_spectrum(const HaarSpectrum& f) const {
  HaarSpectrum out(grid_);
  const std::size_t m = e2_.size();
  for (std::size_t x = 0; x < e1_.size(); ++x) {
    const double* ax = &a_[x * m];
    for (std::size_t y = 0; y < m; ++y) out.coef(e1_[x].out, e2_[y].out) += ax[y] * f.coef(e1_[x].in, e2_[y].in);
  }
  return out;
}

GridFunction CancellativeShift::apply(const GridFunction& f) const {
  if (!(f.grid() == grid_)) throw StructuralError("shift applied on another grid");
  return haar_inverse(apply_spectrum(haar_forward(f)));
}

GridFunction CancellativeShift::apply_transpose(const GridFunction& g) const {
  if (!(g.grid() == grid_)) throw StructuralError("shift applied on another grid");
  const HaarSpectrum s = haar_forward(g);
  HaarSpectrum out(grid_);
  const std::size_t m = e2_.size();
  for (std::size_t x = 0; x < e1_.size(); ++x) {
    const double* ax = &a_[x * m];
    for (std::size_t y = 0; y < m; ++y) out.coef(e1_[x].in, e2_[y].in) += ax[y] * s.coef(e1_[x].out, e2_[y].out);
  }
  return haar_inverse(out);
}

ProductBmoSymbol::ProductBmoSymbol(GridFunction a, bool normalize, std::string id) : a_(std::move(a)), id_(std::move(id)) {
  if (!is_fully_cancellative(a_, 1e-10)) throw StructuralError("product BMO symbol must be fully cancellative");
  const Weight one(GridFunction(a_.grid(), 1.0), "1");
  raw_estimate_ = bmo_product_norm(a_, one).value;
  estimate_ = raw_estimate_;
  if (normalize && raw_estimate_ > 0.0) {
    a_ *= 1.0 / (2.0 * raw_estimate_);
    estimate_ = 0.5;
    normalized_ = true;
  }
}

ProductBmoSymbol ProductBmoSymbol::random(const DyadicGrid& g, std::uint64_t seed, int depth1, int depth2) {
  return ProductBmoSymbol(keyed_cancellative(g, seed, std::min(depth1, g.axis1.K), std::min(depth2, g.axis2.K)), true,
                          "a#" + std::to_string(seed));
}

GridFunction apply_full_standard(const ProductBmoSymbol& a, const GridFunction& f, bool adjoint) {
  return apply_paraproduct(adjoint ? ParaproductKind::PiStar : ParaproductKind::Pi, Symbol(a.function()), f);
}

std::string to_string(Orientation o) { return o == Orientation::P01 ? "01" : "10"; }

GridFunction apply_full_mixed(const ProductBmoSymbol& a, Orientation o, const GridFunction& f) {
  return apply_paraproduct(o == Orientation::P01 ? ParaproductKind::Pi01 : ParaproductKind::Pi10, Symbol(a.function()), f);
}

// ---------------------------------------------------------------------------------------------
// Partial paraproducts

std::vector<PartialSymbolSequence::Entry> PartialSymbolSequence::skeleton(const DyadicGrid& g, int i, int j,
                                                                          Orientation o) {
  const DyadicGrid native = o == Orientation::P01 ? g : g.transposed();
  const AxisGrid& a = native.axis1;
  if (i < 0 || j < 0 || std::max(i, j) > a.K - 1) throw StructuralError("partial paraproduct complexity is not admissible");
  std::vector<Entry> out;
  for (int k = 0; k <= a.K - 1 - std::max(i, j); ++k)
    for (std::size_t r = 0; r < a.cubes_at(k); ++r)
      for (std::size_t po = 0; po < a.cubes_at(i); ++po)
        for (std::size_t qo = 0; qo < a.cubes_at(j); ++qo)
          out.push_back({k, r, a.first_descendant(r, i) + po, a.first_descendant(r, j) + qo, {}});
  return out;
}

PartialSymbolSequence::PartialSymbolSequence(const DyadicGrid& g, int i, int j, Orientation o,
                                             const std::vector<AxisFunction>& functions)
    : grid_(g), native_(o == Orientation::P01 ? g : g.transposed()), i_(i), j_(j), o_(o) {
  entries_ = skeleton(g, i, j, o);
  bound_ = std::pow(2.0, -0.5 * native_.axis1.n * (i + j));
  if (functions.size() != entries_.size())
    throw StructuralError("partial paraproduct needs " + std::to_string(entries_.size()) + " symbol functions");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (!(functions[k].axis == native_.axis2)) throw StructuralError("partial symbol lives on the wrong axis");
    if (bmo_one_parameter_norm(functions[k]) > bound_ * (1.0 + 1e-9))
      throw StructuralError("partial symbol exceeds its BMO bound");
    entries_[k].coefs = haar_forward(functions[k]);
  }
}

PartialSymbolSequence PartialSymbolSequence::random(const DyadicGrid& g, int i, int j, Orientation o,
                                                    std::uint64_t seed, int depth, double scale) {
  const DyadicGrid native = o == Orientation::P01 ? g : g.transposed();
  const AxisGrid& b = native.axis2;
  const double bound = std::pow(2.0, -0.5 * native.axis1.n * (i + j));
  const int levels = std::min(depth, b.K);
  std::vector<AxisFunction> fns;
  for (const auto& e : skeleton(g, i, j, o)) {
    std::vector<double> c(b.cells(), 0.0);
    for (int k = 0; k < levels; ++k)
      for (std::size_t p = 0; p < b.cubes_at(k); ++p)
        for (int s = 0; s < b.signature_count(); ++s)
          c[b.basis_index(k, p, s)] =
              std::pow(2.0, -0.5 * k * b.n) *
              keyed_uniform(seed, {static_cast<std::uint64_t>(e.r_level), e.r_pos, e.p_pos, e.q_pos,
                                   static_cast<std::uint64_t>(k), p, static_cast<std::uint64_t>(s)});
    AxisFunction u = haar_inverse(b, c);
    const double n = bmo_one_parameter_norm(u);
    if (n > 0.0)
      for (double& v : u.values) v *= scale * bound / n;
    fns.push_back(std::move(u));
  }
  return PartialSymbolSequence(g, i, j, o, fns);
}

GridFunction PartialSymbolSequence::apply_native(const GridFunction& f) const {
  const AxisGrid& a1 = native_.axis1;
  const AxisGrid& a2 = native_.axis2;
  const HaarSpectrum s = haar_forward(f);
  Table2D out(native_, Rep::Haar, Rep::Box);
  for (const auto& e : entries_)
    for (int e1 = 0; e1 < a1.signature_count(); ++e1)
      for (int d1 = 0; d1 < a1.signature_count(); ++d1) {
        const std::size_t in = a1.basis_index(e.r_level + i_, e.p_pos, e1);
        const std::size_t row = a1.basis_index(e.r_level + j_, e.q_pos, d1);
        for (int k2 = 0; k2 < a2.K; ++k2)
          for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
            double acc = 0.0;
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              const std::size_t c = a2.basis_index(k2, p2, e2);
              acc += e.coefs[c] * s.coef(in, c);
            }
            out.at(row, a2.cube_index(k2, p2)) += acc;
          }
      }
  return synthesize(out);
}

GridFunction PartialSymbolSequence::transpose_native(const GridFunction& g) const {
  const AxisGrid& a1 = native_.axis1;
  const AxisGrid& a2 = native_.axis2;
  const Table2D t = analyze(g, Rep::Haar, Rep::Box);
  HaarSpectrum out(native_);
  for (const auto& e : entries_)
    for (int e1 = 0; e1 < a1.signature_count(); ++e1)
      for (int d1 = 0; d1 < a1.signature_count(); ++d1) {
        const std::size_t in = a1.basis_index(e.r_level + i_, e.p_pos, e1);
        const std::size_t row = a1.basis_index(e.r_level + j_, e.q_pos, d1);
        for (int k2 = 0; k2 < a2.K; ++k2)
          for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
            const double v = t.at(row, a2.cube_index(k2, p2));
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              const std::size_t c = a2.basis_index(k2, p2, e2);
              out.coef(in, c) += e.coefs[c] * v;
            }
          }
      }
  return haar_inverse(out);
}

GridFunction PartialSymbolSequence::apply(const GridFunction& f) const {
  if (!(f.grid() == grid_)) throw StructuralError("partial paraproduct applied on another grid");
  if (o_ == Orientation::P01) return apply_native(f);
  return apply_native(f.transposed()).transposed();
}

GridFunction PartialSymbolSequence::apply_transpose(const GridFunction& g) const {
  if (!(g.grid() == grid_)) throw StructuralError("partial paraproduct applied on another grid");
  if (o_ == Orientation::P01) return transpose_native(g);
  return transpose_native(g.transposed()).transposed();
}

// ---------------------------------------------------------------------------------------------
// Descriptors and ensembles

std::string to_string(ShiftKind k) {
  switch (k) {
    case ShiftKind::Cancellative: return "cancellative";
    case ShiftKind::FullStandard: return "full-standard";
    case ShiftKind::FullStandardAdjoint: return "full-standard-adjoint";
    case ShiftKind::FullMixed: return "full-mixed";
    case ShiftKind::Partial: return "partial";
  }
  return "?";
}

ShiftKind shift_kind_from_string(const std::string& s) {
  for (auto k : {ShiftKind::Cancellative, ShiftKind::FullStandard, ShiftKind::FullStandardAdjoint, ShiftKind::FullMixed,
                 ShiftKind::Partial})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown shift kind '" + s + "'");
}

nlohmann::json ShiftDescriptor::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["complexity"] = {{"i1", complexity.i1}, {"i2", complexity.i2}, {"j1", complexity.j1}, {"j2", complexity.j2}};
  j["seed"] = seed;
  if (kind == ShiftKind::FullMixed || kind == ShiftKind::Partial) j["orientation"] = to_string(orientation);
  if (kind == ShiftKind::Cancellative) j["mode"] = mode == CoefficientMode::Uniform ? "uniform" : "adversarial";
  j["coefficients"] = {{"min", coef_min}, {"max", coef_max}, {"sup", coef_sup}};
  if (!symbol_id.empty()) j["symbol"] = symbol_id;
  return j;
}

namespace {

template <class It>
void set_stats(ShiftDescriptor& d, It begin, It end) {
  if (begin == end) return;
  auto [lo, hi] = std::minmax_element(begin, end);
  d.coef_min = *lo;
  d.coef_max = *hi;
  d.coef_sup = std::max(std::abs(*lo), std::abs(*hi));
}

bool zero_pair(int i, int j) { return i == 0 && j == 0; }

}  // namespace

bool ensemble_pattern_allowed(ShiftKind k, const ShiftComplexity& c, Orientation o) {
  switch (k) {
    case ShiftKind::Cancellative: return true;
    case ShiftKind::FullStandard:
    case ShiftKind::FullStandardAdjoint:
    case ShiftKind::FullMixed: return c.total() == 0;
    case ShiftKind::Partial: return o == Orientation::P01 ? zero_pair(c.i2, c.j2) : zero_pair(c.i1, c.j1);
  }
  return false;
}

ShiftDescriptor make_shift(const DyadicGrid& g, ShiftKind kind, const ShiftComplexity& c, Orientation o,
                           std::uint64_t seed, const ShiftBuildOptions& opts) {
  if (!ensemble_pattern_allowed(kind, c, o))
    throw StructuralError(to_string(kind) + " shifts do not support complexity " + c.str());
  require_admissible_shift(g, c);
  ShiftDescriptor d;
  d.kind = kind;
  d.complexity = c;
  d.seed = seed;
  d.orientation = o;
  d.mode = opts.mode;
  const std::string name = to_string(kind) + c.str();
  switch (kind) {
    case ShiftKind::Cancellative: {
      auto s = std::make_shared<CancellativeShift>(CancellativeShift::random(g, c, seed, opts.mode));
      set_stats(d, s->coefficients().begin(), s->coefficients().end());
      d.op = make_operator(
          name, [s](const GridFunction& f) { return s->apply(f); },
          [s](const GridFunction& f) { return s->apply_transpose(f); });
      break;
    }
    case ShiftKind::FullStandard:
    case ShiftKind::FullStandardAdjoint:
    case ShiftKind::FullMixed: {
      const ProductBmoSymbol a = ProductBmoSymbol::random(g, seed, opts.symbol_depth, opts.symbol_depth);
      const auto& vals = haar_forward(a.function()).table().data;
      set_stats(d, vals.begin(), vals.end());
      d.symbol_id = a.id();
      ParaproductKind pk = kind == ShiftKind::FullStandard          ? ParaproductKind::Pi
                           : kind == ShiftKind::FullStandardAdjoint ? ParaproductKind::PiStar
                           : o == Orientation::P01                  ? ParaproductKind::Pi01
                                                                    : ParaproductKind::Pi10;
      d.op = paraproduct_operator(pk, Symbol(a.function()));
      break;
    }
    case ShiftKind::Partial: {
      const int i = o == Orientation::P01 ? c.i1 : c.i2;
      const int j = o == Orientation::P01 ? c.j1 : c.j2;
      auto s = std::make_shared<PartialSymbolSequence>(PartialSymbolSequence::random(g, i, j, o, seed, opts.symbol_depth));
      std::vector<double> all;
      for (const auto& e : s->entries()) all.insert(all.end(), e.coefs.begin(), e.coefs.end());
      set_stats(d, all.begin(), all.end());
      d.symbol_id = "seq#" + std::to_string(seed);
      d.op = make_operator(
          name + to_string(o), [s](const GridFunction& f) { return s->apply(f); },
          [s](const GridFunction& f) { return s->apply_transpose(f); });
      break;
    }
  }
  return d;
}

double ensemble_decay(const ShiftComplexity& c, double delta) {
  return std::pow(2.0, -0.5 * delta * (c.max1() + c.max2()));
}

double ensemble_mass(int cap1, int cap2, double delta) {
  double s = 0.0;
  for (int i1 = 0; i1 <= cap1; ++i1)
    for (int j1 = 0; j1 <= cap1; ++j1)
      for (int i2 = 0; i2 <= cap2; ++i2)
        for (int j2 = 0; j2 <= cap2; ++j2) s += ensemble_decay({i1, i2, j1, j2}, delta);
  return s;
}

double ensemble_mass_closed_form(int cap1, int cap2, double delta) {
  const double r = std::pow(2.0, -0.5 * delta);
  auto part = [r](int cap) {
    double s = 0.0;
    for (int m = 0; m <= cap; ++m) s += (2.0 * m + 1.0) * std::pow(r, m);
    return s;
  };
  return part(cap1) * part(cap2);
}

std::vector<WeightedShift> sample_shift_ensemble(const DyadicGrid& g, const EnsembleConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("ensemble decay delta must be positive");
  if (cfg.cap1 < 0 || cfg.cap2 < 0 || cfg.cap1 > g.axis1.K - 1 || cfg.cap2 > g.axis2.K - 1)
    throw StructuralError("ensemble complexity caps are not admissible on " + g.describe());
  struct Option {
    ShiftKind kind;
    ShiftComplexity c;
    Orientation o;
  };
  std::vector<Option> options;
  for (int i1 = 0; i1 <= cfg.cap1; ++i1)
    for (int j1 = 0; j1 <= cfg.cap1; ++j1)
      for (int i2 = 0; i2 <= cfg.cap2; ++i2)
        for (int j2 = 0; j2 <= cfg.cap2; ++j2) {
          const ShiftComplexity c{i1, i2, j1, j2};
          for (auto k : {ShiftKind::Cancellative, ShiftKind::FullStandard, ShiftKind::FullStandardAdjoint,
                         ShiftKind::FullMixed, ShiftKind::Partial})
            for (auto o : {Orientation::P01, Orientation::P10}) {
              const bool orientation_matters = k == ShiftKind::FullMixed || k == ShiftKind::Partial;
              if (!orientation_matters && o == Orientation::P10) continue;
              if (ensemble_pattern_allowed(k, c, o)) options.push_back({k, c, o});
            }
        }
  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5eed));
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  std::vector<WeightedShift> out;
  out.reserve(static_cast<std::size_t>(std::max(0, cfg.samples)));
  for (int s = 0; s < cfg.samples; ++s) {
    const Option& op = options[pick(rng)];
    out.push_back({ensemble_decay(op.c, cfg.delta),
                   make_shift(g, op.kind, op.c, op.o, derive_seed(cfg.seed, static_cast<std::uint64_t>(s) + 1), cfg.build)});
  }
  return out;
}

OperatorHandle ensemble_operator(const std::vector<WeightedShift>& shifts) {
  std::vector<std::pair<double, OperatorHandle>> terms;
  for (const auto& s : shifts) terms.emplace_back(s.weight, s.shift.op);
  return linear_combination(std::move(terms));
}

double shift_one_weight_ratio(const ShiftDescriptor& s, const Weight& w, double p, const NormOptions& opts) {
  return operator_norm(*s.op, w, w, p, opts).value;
}

}  // namespace biparam
