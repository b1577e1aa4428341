#include "biparam/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biparam/random.hpp"

namespace biparam {

std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Cascade: return "cascade";
    case WeightKind::Power: return "power";
    case WeightKind::Constant: return "constant";
  }
  return "unknown";
}

WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "cascade") return WeightKind::Cascade;
  if (s == "power") return WeightKind::Power;
  if (s == "constant") return WeightKind::Constant;
  throw StructuralError("unknown weight kind '" + s + "'");
}

double dual_exponent(double p) { return p / (p - 1.0); }

void require_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw StructuralError("exponent p must lie in (1, inf)");
}

Weight::Weight(GridFunction values, std::string id) : state_(std::make_shared<State>()) {
  for (double v : values.values())
    if (!(v > 0.0) || !std::isfinite(v)) throw StructuralError("weight values must be finite and strictly positive");
  state_->avg = analyze(values, Rep::Box, Rep::Box);
  state_->values = std::move(values);
  state_->id = std::move(id);
  const auto& g = state_->values.grid();
  if (std::max(g.axis1.K, g.axis2.K) <= 6) conjugate_averages(2.0);
}

double Weight::average(const Rectangle& r) const {
  const auto& g = grid();
  validate_cube(g.axis1, r.q1);
  validate_cube(g.axis2, r.q2);
  return state_->avg.at(g.axis1.cube_index(r.q1.level, r.q1.pos), g.axis2.cube_index(r.q2.level, r.q2.pos));
}

double Weight::measure(const Rectangle& r) const {
  const auto& g = grid();
  return average(r) * g.axis1.volume(r.q1.level) * g.axis2.volume(r.q2.level);
}

std::shared_ptr<const Table2D> Weight::conjugate_averages(double p) const {
  require_exponent(p);
  std::lock_guard<std::mutex> lock(state_->mu);
  auto it = state_->conj.find(p);
  if (it != state_->conj.end()) return it->second;
  const double e = 1.0 - dual_exponent(p);
  auto t = std::make_shared<const Table2D>(
      analyze(state_->values.map([e](double v) { return std::pow(v, e); }), Rep::Box, Rep::Box));
  state_->conj.emplace(p, t);
  return t;
}

namespace {

// Cell average of |x - 1/2|^alpha over [a, b].
double power_cell_average(double a, double b, double alpha) {
  auto F = [alpha](double x) {
    double u = x - 0.5;
    return (u < 0 ? -1.0 : 1.0) * std::pow(std::abs(u), alpha + 1.0) / (alpha + 1.0);
  };
  return (F(b) - F(a)) / (b - a);
}

std::vector<double> power_axis(const AxisGrid& a, double alpha) {
  std::vector<double> out(a.cells(), 1.0);
  const double h = std::ldexp(1.0, -a.K);
  for (std::size_t c = 0; c < a.cells(); ++c) {
    // decode Morton coordinates of the cell
    std::size_t x[2] = {0, 0};
    for (int step = 0; step < a.K; ++step) {
      std::size_t grp = (c >> ((a.K - 1 - step) * a.n)) & static_cast<std::size_t>(a.child_count() - 1);
      for (int i = 0; i < a.n; ++i) x[i] = (x[i] << 1) | ((grp >> i) & 1u);
    }
    for (int i = 0; i < a.n; ++i) out[c] *= power_cell_average(x[i] * h, (x[i] + 1) * h, alpha);
  }
  return out;
}

GridFunction cascade(const DyadicGrid& g, const WeightFamilyConfig& cfg) {
  if (!(cfg.cascade_delta >= 0.0)) throw StructuralError("cascade delta must be non-negative");
  if (cfg.cascade_depth < 0) throw StructuralError("cascade depth must be non-negative");
  const int d1 = std::min(cfg.cascade_depth, g.axis1.K);
  const int d2 = std::min(cfg.cascade_depth, g.axis2.K);
  // Refinement chain alternating between the parameters; every step splits the
  // current rectangles and multiplies each child by its own factor.
  std::vector<std::pair<int, int>> chain;
  int k1 = 0, k2 = 0;
  while (k1 < d1 || k2 < d2) {
    if (k1 < d1 && (k1 <= k2 || k2 >= d2)) ++k1; else ++k2;
    chain.emplace_back(k1, k2);
  }
  const double logb = std::log1p(cfg.cascade_delta);
  return GridFunction::from(g, [&](std::size_t i, std::size_t j) {
    double log_w = 0.0;
    for (auto [l1, l2] : chain) {
      std::size_t p1 = g.axis1.ancestor(i, g.axis1.K - l1);
      std::size_t p2 = g.axis2.ancestor(j, g.axis2.K - l2);
      log_w += logb * keyed_uniform(cfg.seed, {std::uint64_t(l1), std::uint64_t(l2), p1, p2});
    }
    return std::exp(log_w);
  });
}

}  // namespace

Weight make_weight(const DyadicGrid& g, const WeightFamilyConfig& cfg, double p) {
  switch (cfg.kind) {
    case WeightKind::Constant:
      if (!(cfg.constant > 0.0)) throw StructuralError("constant weight must be positive");
      return Weight(GridFunction(g, cfg.constant), "constant");
    case WeightKind::Cascade:
      return Weight(cascade(g, cfg), "cascade-" + std::to_string(cfg.seed));
    case WeightKind::Power: {
      require_exponent(p);
      for (double a : {cfg.alpha1, cfg.alpha2})
        if (!(a > -1.0 + 1e-3 && a < p - 1.0 - 1e-3))
          throw StructuralError("power exponent outside (-1, p-1) margin");
      auto u = power_axis(g.axis1, cfg.alpha1);
      auto v = power_axis(g.axis2, cfg.alpha2);
      return Weight(GridFunction::from(g, [&](std::size_t i, std::size_t j) { return u[i] * v[j]; }), "power");
    }
  }
  throw StructuralError("unhandled weight kind");
}

double ap_characteristic(const Weight& w, double p, ApScope scope) {
  require_exponent(p);
  if (scope == ApScope::Biparameter) {
    const Table2D& a = w.averages();
    auto c = w.conjugate_averages(p);
    double best = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) best = std::max(best, a.data[i] * std::pow(c->data[i], p - 1.0));
    return best;
  }
  const double e = 1.0 - dual_exponent(p);
  GridFunction wc = w.values().map([e](double v) { return std::pow(v, e); });
  Rep r1 = scope == ApScope::Parameter1 ? Rep::Box : Rep::Cell;
  Rep r2 = scope == ApScope::Parameter1 ? Rep::Cell : Rep::Box;
  Table2D a = analyze(w.values(), r1, r2), c = analyze(wc, r1, r2);
  double best = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) best = std::max(best, a.data[i] * std::pow(c.data[i], p - 1.0));
  return best;
}

double ap_characteristic(const AxisFunction& w, double p) {
  require_exponent(p);
  const double e = 1.0 - dual_exponent(p);
  std::vector<double> a(w.axis.cube_count()), c(w.axis.cube_count()), wc(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw StructuralError("weight values must be strictly positive");
    wc[i] = std::pow(w[i], e);
  }
  axis_analyze(w.axis, Rep::Box, w.values.data(), a.data());
  axis_analyze(w.axis, Rep::Box, wc.data(), c.data());
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, a[i] * std::pow(c[i], p - 1.0));
  return best;
}

Weight conjugate_weight(const Weight& w, double p) {
  require_exponent(p);
  const double e = 1.0 - dual_exponent(p);
  return Weight(w.values().map([e](double v) { return std::pow(v, e); }), w.id() + "'");
}

Weight BloomTriple::nu() const {
  require_exponent(p);
  require_same_grid(mu.values(), lambda.values(), "Bloom weight");
  GridFunction v(mu.grid());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(mu.values()[i] / lambda.values()[i], 1.0 / p);
  return Weight(std::move(v), "bloom(" + mu.id() + "," + lambda.id() + ")");
}

AxisFunction averaged_weight(const Weight& w, int t, const Cube& q) { return slice_average(w.values(), t, q); }

ReverseHolderReport reverse_holder_probe(const Weight& w, const std::vector<double>& eps_grid, std::uint64_t seed,
                                         int samples) {
  if (eps_grid.empty()) throw StructuralError("reverse Hoelder probe needs at least one epsilon");
  ReverseHolderReport rep;
  const Table2D& avg = w.averages();
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) throw StructuralError("reverse Hoelder epsilon must be positive");
    Table2D hi = analyze(w.values().map([eps](double v) { return std::pow(v, 1.0 + eps); }), Rep::Box, Rep::Box);
    double c = 0.0;
    for (std::size_t i = 0; i < hi.data.size(); ++i) c = std::max(c, std::pow(hi.data[i], 1.0 / (1.0 + eps)) / avg.data[i]);
    rep.rows.push_back({eps, c});
  }
  // Part (ii): random subsets E of random rectangles R.
  const auto& g = w.grid();
  Rng rng(seed);
  std::vector<double> xs, ys;
  for (int s = 0; s < samples; ++s) {
    int l1 = std::uniform_int_distribution<int>(0, g.axis1.K - 1)(rng);
    int l2 = std::uniform_int_distribution<int>(0, g.axis2.K - 1)(rng);
    std::size_t p1 = std::uniform_int_distribution<std::size_t>(0, g.axis1.cubes_at(l1) - 1)(rng);
    std::size_t p2 = std::uniform_int_distribution<std::size_t>(0, g.axis2.cubes_at(l2) - 1)(rng);
    double keep = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    std::bernoulli_distribution coin(keep);
    std::size_t a1 = g.axis1.first_descendant(p1, g.axis1.K - l1), n1 = g.axis1.cubes_at(g.axis1.K - l1);
    std::size_t a2 = g.axis2.first_descendant(p2, g.axis2.K - l2), n2 = g.axis2.cubes_at(g.axis2.K - l2);
    double wr = 0.0, we = 0.0;
    std::size_t ce = 0;
    for (std::size_t i = a1; i < a1 + n1; ++i)
      for (std::size_t j = a2; j < a2 + n2; ++j) {
        double v = w.values().at(i, j);
        wr += v;
        if (coin(rng)) { we += v; ++ce; }
      }
    if (ce == 0 || ce == n1 * n2) continue;
    xs.push_back(std::log(static_cast<double>(ce) / static_cast<double>(n1 * n2)));
    ys.push_back(std::log(we / wr));
  }
  if (xs.size() >= 2) {
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.delta_fit = sxx > 0 ? sxy / sxx : 0.0;
    double logc = -INFINITY;
    for (std::size_t i = 0; i < xs.size(); ++i) logc = std::max(logc, ys[i] - rep.delta_fit * xs[i]);
    rep.constant_fit = std::exp(logc);
  }
  return rep;
}

double weighted_lp_norm(const GridFunction& f, const Weight& w, double p) {
  if (!(p >= 1.0)) throw StructuralError("L^p norm needs p >= 1");
  require_same_grid(f, w.values(), "weighted norm");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * w.values()[i];
  return std::pow(s * f.grid().cell_measure(), 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw StructuralError("L^p norm needs p >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_measure(), 1.0 / p);
}

DualityGap duality_gap(const GridFunction& f, const Weight& w, double p, int trials, std::uint64_t seed) {
  require_exponent(p);
  const double q = dual_exponent(p);
  Weight wd = conjugate_weight(w, p);
  DualityGap out;
  out.norm = weighted_lp_norm(f, w, p);
  auto consider = [&](const GridFunction& g) {
    double n = weighted_lp_norm(g, wd, q);
    if (n > 0.0) out.best_pairing = std::max(out.best_pairing, std::abs(f.inner(g)) / n);
  };
  GridFunction star(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    star[i] = (f[i] < 0 ? -1.0 : 1.0) * std::pow(std::abs(f[i]), p - 1.0) * w.values()[i];
  consider(star);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) consider(random_function(f.grid(), rng));
  out.gap = out.norm - out.best_pairing;
  return out;
}

}  // namespace biparam
