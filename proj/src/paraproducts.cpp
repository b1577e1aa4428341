#include "biparam/paraproducts.hpp"

#include <cmath>
#include <stdexcept>

namespace biparam {

namespace {

// How one parameter of a paraproduct pairs b, f and the output on a cube Q:
//   SmallB : b^(Q,e) <f>_Q h_Q^e
//   Same   : b^(Q,e) f^(Q,e) 1_Q/|Q|
//   Mixed  : b^(Q,e) f^(Q,d) |Q|^{-1/2} h_Q^{e+d}, e != d
//   SmallF : <b>_Q f^(Q,e) h_Q^e
enum class Pattern { SmallB, Same, Mixed, SmallF };

struct KindInfo {
  ParaproductKind kind;
  const char* tag;
  Pattern p1, p2;
};

constexpr KindInfo kKinds[] = {
    {ParaproductKind::Pi, "Pi", Pattern::SmallB, Pattern::SmallB},
    {ParaproductKind::PiStar, "PiStar", Pattern::Same, Pattern::Same},
    {ParaproductKind::Gamma, "Gamma", Pattern::Mixed, Pattern::Mixed},
    {ParaproductKind::Pi01, "Pi01", Pattern::Same, Pattern::SmallB},
    {ParaproductKind::Pi10, "Pi10", Pattern::SmallB, Pattern::Same},
    {ParaproductKind::Gamma01, "Gamma01", Pattern::Mixed, Pattern::SmallB},
    {ParaproductKind::Gamma01Star, "Gamma01Star", Pattern::Mixed, Pattern::Same},
    {ParaproductKind::Gamma10, "Gamma10", Pattern::SmallB, Pattern::Mixed},
    {ParaproductKind::Gamma10Star, "Gamma10Star", Pattern::Same, Pattern::Mixed},
    {ParaproductKind::pi01, "pi01", Pattern::SmallB, Pattern::SmallF},
    {ParaproductKind::pi01Star, "pi01Star", Pattern::Same, Pattern::SmallF},
    {ParaproductKind::pi10, "pi10", Pattern::SmallF, Pattern::SmallB},
    {ParaproductKind::pi10Star, "pi10Star", Pattern::SmallF, Pattern::Same},
    {ParaproductKind::gamma01, "gamma01", Pattern::Mixed, Pattern::SmallF},
    {ParaproductKind::gamma10, "gamma10", Pattern::SmallF, Pattern::Mixed},
    {ParaproductKind::PiF, "PiF", Pattern::SmallF, Pattern::SmallF},
};

const KindInfo& info(ParaproductKind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i;
  throw std::logic_error("unknown paraproduct kind");
}

Pattern transpose(Pattern p) {
  if (p == Pattern::SmallB) return Pattern::Same;
  if (p == Pattern::Same) return Pattern::SmallB;
  return p;
}

Rep b_rep(Pattern p) { return p == Pattern::SmallF ? Rep::Box : Rep::Haar; }
Rep f_rep(Pattern p) { return p == Pattern::SmallB ? Rep::Box : Rep::Haar; }
Rep out_rep(Pattern p) { return p == Pattern::Same ? Rep::Box : Rep::Haar; }

struct Term {
  std::size_t b, f, out;
  double factor;
};

// Every (b, f, out) index triple of one parameter, grouped by cube.
std::vector<std::vector<Term>> axis_terms(const AxisGrid& a, Pattern p) {
  std::vector<std::vector<Term>> out;
  const int S = a.signature_count();
  for (int k = 0; k < a.K; ++k) {
    const double inv_sqrt = 1.0 / std::sqrt(a.volume(k));
    for (std::size_t q = 0; q < a.cubes_at(k); ++q) {
      std::vector<Term> ts;
      const std::size_t box = a.cube_index(k, q);
      for (int e = 0; e < S; ++e) {
        const std::size_t h = a.basis_index(k, q, e);
        switch (p) {
          case Pattern::SmallB: ts.push_back({h, box, h, 1.0}); break;
          case Pattern::Same: ts.push_back({h, h, box, 1.0}); break;
          case Pattern::SmallF: ts.push_back({box, h, h, 1.0}); break;
          case Pattern::Mixed:
            for (int d = 0; d < S; ++d)
              if (d != e) ts.push_back({h, a.basis_index(k, q, d), a.basis_index(k, q, signature_sum(e, d, a.n)), inv_sqrt});
            break;
        }
      }
      out.push_back(std::move(ts));
    }
  }
  return out;
}

GridFunction apply_patterns(Pattern p1, Pattern p2, const Symbol& b, const GridFunction& f) {
  require_same_grid(b.function(), f, "paraproduct");
  const DyadicGrid& g = f.grid();
  const Table2D& bt = b.table(b_rep(p1), b_rep(p2));
  Table2D ft = analyze(f, f_rep(p1), f_rep(p2));
  Table2D out(g, out_rep(p1), out_rep(p2));
  auto t1 = axis_terms(g.axis1, p1);
  auto t2 = axis_terms(g.axis2, p2);
  for (const auto& c1 : t1)
    for (const auto& c2 : t2)
      for (const Term& x : c1)
        for (const Term& y : c2) out.at(x.out, y.out) += x.factor * y.factor * bt.at(x.b, y.b) * ft.at(x.f, y.f);
  return synthesize(out);
}

Pattern one_param_pattern(OneParamKind k) {
  switch (k) {
    case OneParamKind::Pi: return Pattern::SmallB;
    case OneParamKind::PiStar: return Pattern::Same;
    case OneParamKind::Gamma: return Pattern::Mixed;
    case OneParamKind::PiF: return Pattern::SmallF;
  }
  throw std::logic_error("unknown one-parameter kind");
}

}  // namespace

std::string tag(ParaproductKind k) { return info(k).tag; }

ParaproductKind paraproduct_from_tag(const std::string& s) {
  for (const auto& i : kKinds)
    if (s == i.tag) return i.kind;
  throw StructuralError("unknown paraproduct tag '" + s + "'");
}

ParaproductKind adjoint(ParaproductKind k) {
  const KindInfo& i = info(k);
  Pattern a = transpose(i.p1), b = transpose(i.p2);
  for (const auto& j : kKinds)
    if (j.p1 == a && j.p2 == b) return j.kind;
  throw std::logic_error("paraproduct table is not closed under adjoints");
}

bool is_little_bmo_kind(ParaproductKind k) {
  const KindInfo& i = info(k);
  return k != ParaproductKind::PiF && (i.p1 == Pattern::SmallF || i.p2 == Pattern::SmallF);
}

std::string tag(OneParamKind k) {
  switch (k) {
    case OneParamKind::Pi: return "Pi";
    case OneParamKind::PiStar: return "PiStar";
    case OneParamKind::Gamma: return "Gamma";
    case OneParamKind::PiF: return "PiF";
  }
  return "?";
}

OneParamKind adjoint(OneParamKind k) {
  if (k == OneParamKind::Pi) return OneParamKind::PiStar;
  if (k == OneParamKind::PiStar) return OneParamKind::Pi;
  return k;
}

Symbol::Symbol(GridFunction b)
    : b_(std::move(b)),
      spectrum_(haar_forward(b_)),
      hb_(analyze(b_, Rep::Haar, Rep::Box)),
      bh_(analyze(b_, Rep::Box, Rep::Haar)),
      bb_(analyze(b_, Rep::Box, Rep::Box)) {}

const Table2D& Symbol::table(Rep r1, Rep r2) const {
  if (r1 == Rep::Haar && r2 == Rep::Haar) return spectrum_.table();
  if (r1 == Rep::Haar && r2 == Rep::Box) return hb_;
  if (r1 == Rep::Box && r2 == Rep::Haar) return bh_;
  if (r1 == Rep::Box && r2 == Rep::Box) return bb_;
  throw StructuralError("symbol tables exist only for Haar/Box representations");
}

GridFunction apply_paraproduct(ParaproductKind kind, const Symbol& b, const GridFunction& f) {
  const KindInfo& i = info(kind);
  return apply_patterns(i.p1, i.p2, b, f);
}

AxisFunction apply_paraproduct(OneParamKind kind, const AxisFunction& b, const AxisFunction& f) {
  if (!(b.axis == f.axis)) throw StructuralError("one-parameter paraproduct: grid mismatch");
  const AxisGrid& a = f.axis;
  Pattern p = one_param_pattern(kind);
  std::vector<double> bt(rep_size(a, b_rep(p))), ft(rep_size(a, f_rep(p))), out(rep_size(a, out_rep(p)), 0.0);
  axis_analyze(a, b_rep(p), b.values.data(), bt.data());
  axis_analyze(a, f_rep(p), f.values.data(), ft.data());
  for (const auto& cube : axis_terms(a, p))
    for (const Term& t : cube) out[t.out] += t.factor * bt[t.b] * ft[t.f];
  AxisFunction r(a);
  axis_synthesize(a, out_rep(p), out.data(), r.values.data());
  return r;
}

OperatorHandle paraproduct_operator(ParaproductKind kind, Symbol b) {
  auto sym = std::make_shared<const Symbol>(std::move(b));
  ParaproductKind adj = adjoint(kind);
  return make_operator(
      tag(kind), [sym, kind](const GridFunction& f) { return apply_paraproduct(kind, *sym, f); },
      [sym, adj](const GridFunction& g) { return apply_paraproduct(adj, *sym, g); });
}

GridFunction ProductDecomposition::sum() const {
  if (terms.empty()) throw StructuralError("empty decomposition");
  GridFunction s = terms.front().second;
  for (std::size_t i = 1; i < terms.size(); ++i) s += terms[i].second;
  return s;
}

ProductDecomposition product_decomposition(const Symbol& b, const GridFunction& f) {
  if (!is_fully_cancellative(b.function()) || !is_fully_cancellative(f))
    throw StructuralError("product decomposition needs fully cancellative inputs; project them first");
  ProductDecomposition d;
  for (const auto& i : kKinds) d.terms.emplace_back(i.tag, apply_paraproduct(i.kind, b, f));
  return d;
}

}  // namespace biparam
