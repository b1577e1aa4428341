#include "biparam/bmo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "biparam/haar.hpp"
#include "dyadic_sums.hpp"

namespace biparam {

using detail::subrectangle_sums;
using detail::subtree_sum_axis;

namespace {

// Cells of a cube at level k, as the half-open range of level-K positions.
struct CellRange {
  std::size_t lo;
  std::size_t hi;
};

CellRange cell_range(const AxisGrid& a, int k, std::size_t pos) {
  const std::size_t lo = a.first_descendant(pos, a.K - k);
  return {lo, lo + a.cubes_at(a.K - k)};
}

template <class Fn>
void for_each_rectangle(const DyadicGrid& g, Fn&& fn) {
  for (int k1 = 0; k1 <= g.axis1.K; ++k1)
    for (std::size_t p1 = 0; p1 < g.axis1.cubes_at(k1); ++p1)
      for (int k2 = 0; k2 <= g.axis2.K; ++k2)
        for (std::size_t p2 = 0; p2 < g.axis2.cubes_at(k2); ++p2) fn(Rectangle{{k1, p1}, {k2, p2}});
}

std::size_t rect_index(const DyadicGrid& g, const Rectangle& r) {
  return g.axis1.cube_index(r.q1.level, r.q1.pos) * g.axis2.cube_count() + g.axis2.cube_index(r.q2.level, r.q2.pos);
}

double slice_bmo(const GridFunction& b, const Weight& w, bool along_first) {
  const DyadicGrid& g = b.grid();
  const AxisGrid& a = along_first ? g.axis1 : g.axis2;
  const std::size_t others = along_first ? g.axis2.cells() : g.axis1.cells();
  double best = 0.0;
  std::vector<double> bs(a.cells()), ws(a.cells());
  for (std::size_t o = 0; o < others; ++o) {
    for (std::size_t i = 0; i < a.cells(); ++i) {
      bs[i] = along_first ? b.at(i, o) : b.at(o, i);
      ws[i] = along_first ? w.values().at(i, o) : w.values().at(o, i);
    }
    for (int k = 0; k <= a.K; ++k)
      for (std::size_t p = 0; p < a.cubes_at(k); ++p) {
        const auto [lo, hi] = cell_range(a, k, p);
        double m = 0.0, wq = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          m += bs[i];
          wq += ws[i];
        }
        m /= static_cast<double>(hi - lo);
        double osc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) osc += std::abs(bs[i] - m);
        best = std::max(best, osc / wq);  // the common cell factor cancels
      }
  }
  return best;
}

// Incremental state for the open-set search: per-rectangle counts of covered cells.
class CoverState {
 public:
  CoverState(const DyadicGrid& g, const std::vector<double>& coef, const GridFunction& w)
      : g_(g), coef_(coef), w_(w), count_(coef.size(), 0), in_(g.cells(), 0) {
    cell_w_ = g.cell_measure();
  }

  bool inside(std::size_t cell) const { return in_[cell] != 0; }
  double objective() const { return W_ > 0.0 ? std::sqrt(std::max(S_, 0.0) / W_) : 0.0; }
  const std::vector<std::uint8_t>& bitmap() const { return in_; }

  void add_cell(std::size_t cell) { toggle(cell, +1); }
  void remove_cell(std::size_t cell) { toggle(cell, -1); }

  // Adds every cell of r, returning the ones that were newly inserted.
  std::vector<std::size_t> add_rect(const Rectangle& r) {
    std::vector<std::size_t> added;
    const auto c1 = cell_range(g_.axis1, r.q1.level, r.q1.pos);
    const auto c2 = cell_range(g_.axis2, r.q2.level, r.q2.pos);
    for (std::size_t i1 = c1.lo; i1 < c1.hi; ++i1)
      for (std::size_t i2 = c2.lo; i2 < c2.hi; ++i2) {
        const std::size_t cell = i1 * g_.axis2.cells() + i2;
        if (!in_[cell]) {
          add_cell(cell);
          added.push_back(cell);
        }
      }
    return added;
  }

  void undo(const std::vector<std::size_t>& added) {
    for (auto it = added.rbegin(); it != added.rend(); ++it) remove_cell(*it);
  }

  void clear() {
    for (std::size_t c = 0; c < in_.size(); ++c)
      if (in_[c]) remove_cell(c);
  }

 private:
  void toggle(std::size_t cell, int dir) {
    const AxisGrid& a1 = g_.axis1;
    const AxisGrid& a2 = g_.axis2;
    const std::size_t x1 = cell / a2.cells(), x2 = cell % a2.cells();
    in_[cell] = dir > 0 ? 1 : 0;
    W_ += dir * w_[cell] * cell_w_;
    for (int k1 = 0; k1 <= a1.K; ++k1) {
      const std::size_t r1 = a1.cube_index(k1, a1.ancestor(x1, a1.K - k1));
      const std::size_t n1 = a1.cubes_at(a1.K - k1);
      for (int k2 = 0; k2 <= a2.K; ++k2) {
        const std::size_t r = r1 * a2.cube_count() + a2.cube_index(k2, a2.ancestor(x2, a2.K - k2));
        const std::size_t full = n1 * a2.cubes_at(a2.K - k2);
        if (dir > 0) {
          if (++count_[r] == full) S_ += coef_[r];
        } else {
          if (count_[r]-- == full) S_ -= coef_[r];
        }
      }
    }
  }

  const DyadicGrid& g_;
  const std::vector<double>& coef_;
  const GridFunction& w_;
  std::vector<std::size_t> count_;
  std::vector<std::uint8_t> in_;
  double cell_w_ = 0.0;
  double S_ = 0.0;
  double W_ = 0.0;
};

ProductBmoResult exhaustive_search(const DyadicGrid& g, const std::vector<double>& coef, const GridFunction& w) {
  const std::size_t n = g.cells();
  std::vector<std::pair<std::uint32_t, double>> rects;
  for_each_rectangle(g, [&](const Rectangle& r) {
    const double c = coef[rect_index(g, r)];
    if (c == 0.0) return;
    std::uint32_t mask = 0;
    const auto c1 = cell_range(g.axis1, r.q1.level, r.q1.pos);
    const auto c2 = cell_range(g.axis2, r.q2.level, r.q2.pos);
    for (std::size_t i1 = c1.lo; i1 < c1.hi; ++i1)
      for (std::size_t i2 = c2.lo; i2 < c2.hi; ++i2) mask |= 1u << (i1 * g.axis2.cells() + i2);
    rects.emplace_back(mask, c);
  });
  ProductBmoResult out;
  out.witness.grid = g;
  out.witness.method = "exhaustive";
  std::uint32_t best_mask = 0;
  for (std::uint32_t m = 1; m < (1u << n); ++m) {
    double W = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (m & (1u << c)) W += w[c];
    W *= g.cell_measure();
    double S = 0.0;
    for (const auto& [rm, c] : rects)
      if ((m & rm) == rm) S += c;
    const double v = std::sqrt(S / W);
    if (v > out.value) {
      out.value = v;
      best_mask = m;
    }
  }
  out.witness.iterations = (1L << n) - 1;
  out.witness.shadow.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) out.witness.shadow[c] = (best_mask >> c) & 1u;
  return out;
}

}  // namespace

double oscillation_sup(const GridFunction& b, const Weight* den, const GridFunction* num, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("oscillation exponent must be at least 1");
  const DyadicGrid& g = b.grid();
  if (den) require_same_grid(b, den->values(), "oscillation denominator");
  if (num) require_same_grid(b, *num, "oscillation numerator");
  const Table2D mean = analyze(b, Rep::Box, Rep::Box);
  const double cell = g.cell_measure();
  const std::size_t N2 = g.axis2.cells();
  double best = 0.0;
  for_each_rectangle(g, [&](const Rectangle& r) {
    const double m = mean.at(g.axis1.cube_index(r.q1.level, r.q1.pos), g.axis2.cube_index(r.q2.level, r.q2.pos));
    const auto c1 = cell_range(g.axis1, r.q1.level, r.q1.pos);
    const auto c2 = cell_range(g.axis2, r.q2.level, r.q2.pos);
    double acc = 0.0;
    for (std::size_t i1 = c1.lo; i1 < c1.hi; ++i1)
      for (std::size_t i2 = c2.lo; i2 < c2.hi; ++i2) {
        const double d = std::abs(b[i1 * N2 + i2] - m);
        const double v = q == 1.0 ? d : std::pow(d, q);
        acc += num ? v * (*num)[i1 * N2 + i2] : v;
      }
    acc *= cell;
    const double d = den ? den->measure(r) : g.axis1.volume(r.q1.level) * g.axis2.volume(r.q2.level);
    const double val = q == 1.0 ? acc / d : std::pow(acc / d, 1.0 / q);
    best = std::max(best, val);
  });
  return best;
}

double bmo_little_norm(const GridFunction& b, const Weight& w) { return oscillation_sup(b, &w, nullptr, 1.0); }

double bmo_one_weight_jn(const GridFunction& b, const Weight& w, double p) {
  const double q = dual_exponent(p);
  const Weight wd = conjugate_weight(w, p);
  return oscillation_sup(b, &w, &wd.values(), q);
}

JohnNirenbergVariants john_nirenberg_variants(const GridFunction& b, const BloomTriple& t) {
  JohnNirenbergVariants out;
  out.bmo_nu = bmo_little_norm(b, t.nu());
  out.mu_lambda_p = oscillation_sup(b, &t.mu, &t.lambda.values(), t.p);
  const Weight lambda_d = conjugate_weight(t.lambda, t.p);
  const Weight mu_d = conjugate_weight(t.mu, t.p);
  out.dual_form = oscillation_sup(b, &lambda_d, &mu_d.values(), dual_exponent(t.p));
  return out;
}

double bmo_slicewise_norm(const GridFunction& b, const Weight& w) {
  require_same_grid(b, w.values(), "slicewise bmo");
  return std::max(slice_bmo(b, w, true), slice_bmo(b, w, false));
}

std::vector<double> carleson_coefficients(const GridFunction& b, const Weight& w) {
  require_same_grid(b, w.values(), "Carleson coefficients");
  const DyadicGrid& g = b.grid();
  const HaarSpectrum s = haar_forward(b);
  const Table2D& avg = w.averages();
  const AxisGrid& a1 = g.axis1;
  const AxisGrid& a2 = g.axis2;
  std::vector<double> c(a1.cube_count() * a2.cube_count(), 0.0);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (int k2 = 0; k2 < a2.K; ++k2)
        for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
          double e = 0.0;
          for (int e1 = 0; e1 < a1.signature_count(); ++e1)
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              const double v = s.coef(a1.basis_index(k1, p1, e1), a2.basis_index(k2, p2, e2));
              e += v * v;
            }
          const std::size_t r1 = a1.cube_index(k1, p1), r2 = a2.cube_index(k2, p2);
          c[r1 * a2.cube_count() + r2] = e / avg.at(r1, r2);
        }
  return c;
}

double bmo_rectangular_norm(const GridFunction& b, const Weight& w) {
  const DyadicGrid& g = b.grid();
  const std::vector<double> u = subrectangle_sums(g, carleson_coefficients(b, w));
  double best = 0.0;
  for_each_rectangle(g, [&](const Rectangle& r) {
    best = std::max(best, std::sqrt(u[rect_index(g, r)] / w.measure(r)));
  });
  return best;
}

std::size_t OpenSetApprox::cell_count() const {
  return static_cast<std::size_t>(std::count(shadow.begin(), shadow.end(), std::uint8_t{1}));
}

bool OpenSetApprox::contains(const Rectangle& r) const {
  const auto c1 = cell_range(grid.axis1, r.q1.level, r.q1.pos);
  const auto c2 = cell_range(grid.axis2, r.q2.level, r.q2.pos);
  for (std::size_t i1 = c1.lo; i1 < c1.hi; ++i1)
    for (std::size_t i2 = c2.lo; i2 < c2.hi; ++i2)
      if (!shadow[i1 * grid.axis2.cells() + i2]) return false;
  return true;
}

std::string OpenSetApprox::bitmap() const {
  std::string s(shadow.size(), '0');
  for (std::size_t i = 0; i < shadow.size(); ++i)
    if (shadow[i]) s[i] = '1';
  return s;
}

double product_bmo_objective(const GridFunction& b, const Weight& w, const OpenSetApprox& omega) {
  const DyadicGrid& g = b.grid();
  if (!(omega.grid == g) || omega.shadow.size() != g.cells()) throw StructuralError("open set lives on another grid");
  double W = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c)
    if (omega.shadow[c]) W += w.values()[c];
  W *= g.cell_measure();
  if (W <= 0.0) throw std::domain_error("open set has zero measure");
  const std::vector<double> coef = carleson_coefficients(b, w);
  double S = 0.0;
  for_each_rectangle(g, [&](const Rectangle& r) {
    const double c = coef[rect_index(g, r)];
    if (c != 0.0 && omega.contains(r)) S += c;
  });
  return std::sqrt(S / W);
}

ProductBmoResult bmo_product_norm(const GridFunction& b, const Weight& w, const ProductSearchBudget& budget) {
  const DyadicGrid& g = b.grid();
  const std::vector<double> coef = carleson_coefficients(b, w);
  if (static_cast<int>(g.cells()) <= budget.exhaustive_cells) {
    ProductBmoResult r = exhaustive_search(g, coef, w.values());
    r.witness.seed = budget.seed;
    return r;
  }

  // Stage 1: every rectangle on its own.
  const std::vector<double> u = subrectangle_sums(g, coef);
  struct Scored {
    double value;
    Rectangle r;
  };
  std::vector<Scored> singles;
  for_each_rectangle(g, [&](const Rectangle& r) {
    const double s = u[rect_index(g, r)];
    if (s > 0.0) singles.push_back({std::sqrt(s / w.measure(r)), r});
  });
  std::stable_sort(singles.begin(), singles.end(), [](const Scored& a, const Scored& b2) { return a.value > b2.value; });

  CoverState st(g, coef, w.values());
  ProductBmoResult out;
  out.witness.grid = g;
  out.witness.seed = budget.seed;
  out.witness.method = "single";
  out.witness.shadow.assign(g.cells(), 0);
  if (singles.empty()) return out;

  long evals = static_cast<long>(singles.size());
  auto record = [&](const char* method) {
    const double v = st.objective();
    if (v > out.value) {
      out.value = v;
      out.witness.shadow = st.bitmap();
      out.witness.method = method;
    }
  };
  st.add_rect(singles.front().r);
  record("single");
  st.clear();

  // Stage 2: unions of two of the best rectangles.
  const std::size_t top = std::min<std::size_t>(singles.size(), static_cast<std::size_t>(std::max(1, budget.top_singles)));
  std::pair<std::size_t, std::size_t> best_pair{0, 0};
  double best_pair_value = -1.0;
  for (std::size_t a = 0; a < top && evals < budget.max_evaluations; ++a)
    for (std::size_t c = a + 1; c < top && evals < budget.max_evaluations; ++c) {
      st.add_rect(singles[a].r);
      st.add_rect(singles[c].r);
      ++evals;
      if (st.objective() > best_pair_value) {
        best_pair_value = st.objective();
        best_pair = {a, c};
      }
      record("pair");
      st.clear();
    }

  // Stage 3: greedy growth by rectangles from the top list or single cells.
  std::vector<std::vector<Rectangle>> seeds;
  for (std::size_t a = 0; a < top && static_cast<int>(seeds.size()) < budget.greedy_seeds; ++a) seeds.push_back({singles[a].r});
  if (best_pair_value >= 0.0) seeds.push_back({singles[best_pair.first].r, singles[best_pair.second].r});
  std::mt19937_64 rng(budget.seed);
  if (singles.size() > top) {
    std::uniform_int_distribution<std::size_t> pick(top, singles.size() - 1);
    for (int extra = 0; extra < 2; ++extra) seeds.push_back({singles[pick(rng)].r});
  }

  long rounds = 0;
  for (const auto& seed : seeds) {
    if (evals >= budget.max_evaluations) break;
    st.clear();
    for (const auto& r : seed) st.add_rect(r);
    record("greedy");
    while (evals < budget.max_evaluations) {
      const double base = st.objective();
      double best = base;
      int kind = -1;
      std::size_t which = 0;
      for (std::size_t a = 0; a < top && evals < budget.max_evaluations; ++a) {
        auto added = st.add_rect(singles[a].r);
        if (added.empty()) continue;
        ++evals;
        if (st.objective() > best) {
          best = st.objective();
          kind = 0;
          which = a;
        }
        st.undo(added);
      }
      for (std::size_t c = 0; c < g.cells() && evals < budget.max_evaluations; ++c) {
        if (st.inside(c)) continue;
        st.add_cell(c);
        ++evals;
        if (st.objective() > best) {
          best = st.objective();
          kind = 1;
          which = c;
        }
        st.remove_cell(c);
      }
      if (kind < 0 || best <= base * (1.0 + 1e-14)) break;
      if (kind == 0)
        st.add_rect(singles[which].r);
      else
        st.add_cell(which);
      ++rounds;
      record("greedy");
    }
  }
  out.witness.iterations = rounds;
  return out;
}

double bmo_one_parameter_norm(const AxisFunction& u) {
  const AxisGrid& a = u.axis;
  const std::vector<double> coefs = haar_forward(u);
  std::vector<double> e(a.cube_count(), 0.0);
  for (int k = 0; k < a.K; ++k)
    for (std::size_t p = 0; p < a.cubes_at(k); ++p) {
      double s = 0.0;
      for (int sig = 0; sig < a.signature_count(); ++sig) {
        const double v = coefs[a.basis_index(k, p, sig)];
        s += v * v;
      }
      e[a.cube_index(k, p)] = s;
    }
  subtree_sum_axis(a, e, 1, 1, true);
  double best = 0.0;
  for (int k = 0; k <= a.K; ++k)
    for (std::size_t p = 0; p < a.cubes_at(k); ++p) best = std::max(best, std::sqrt(e[a.cube_index(k, p)] / a.volume(k)));
  return best;
}

double h1_norm(const GridFunction& phi, const Weight& w, H1Scope scope) {
  require_same_grid(phi, w.values(), "H1 norm");
  const SquareScope sc = scope == H1Scope::Biparameter ? SquareScope::Biparameter
                         : scope == H1Scope::Parameter1 ? SquareScope::Parameter1
                                                        : SquareScope::Parameter2;
  const GridFunction s = square_function(phi, sc);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * w.values()[i];
  return acc * phi.grid().cell_measure();
}

DualityRatio duality_ratio(const GridFunction& b, const GridFunction& phi, const Weight& w, DualityScope scope,
                           const ProductSearchBudget& budget) {
  require_same_grid(b, phi, "duality ratio");
  DualityRatio out;
  out.pairing = std::abs(b.inner(phi));
  switch (scope) {
    case DualityScope::Product:
      out.b_norm = bmo_product_norm(b, w, budget).value;
      out.h1 = h1_norm(phi, w, H1Scope::Biparameter);
      break;
    case DualityScope::Little1:
      out.b_norm = bmo_little_norm(b, w);
      out.h1 = h1_norm(phi, w, H1Scope::Parameter1);
      break;
    case DualityScope::Little2:
      out.b_norm = bmo_little_norm(b, w);
      out.h1 = h1_norm(phi, w, H1Scope::Parameter2);
      break;
  }
  if (out.b_norm <= 0.0 || out.h1 <= 0.0) throw std::domain_error("duality ratio has a zero denominator");
  out.ratio = out.pairing / (out.b_norm * out.h1);
  return out;
}

}  // namespace biparam
