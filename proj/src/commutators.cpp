#include "biparam/commutators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "biparam/bmo.hpp"
#include "biparam/random.hpp"
#include "dyadic_sums.hpp"

namespace biparam {

GridFunction commutator_apply(const GridFunction& b, const LinearOperator& t, const GridFunction& f) {
  require_same_grid(b, f, "commutator");
  GridFunction out = b.times(t.apply(f));
  out -= t.apply(b.times(f));
  return out;
}

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::Auto: return "auto";
    case NormMethod::DenseSVD: return "dense-svd";
    case NormMethod::PowerIteration: return "power-iteration";
    case NormMethod::ProjectedAscent: return "projected-ascent";
  }
  return "?";
}

nlohmann::json NormEstimate::to_json() const {
  return {{"value", value},         {"method", to_string(method)}, {"restarts", restarts},
          {"iterations", iterations}, {"residual", residual},       {"converged", converged},
          {"lower_bound", lower_bound}};
}

// ---------------------------------------------------------------------------------------------
// Operator norms

namespace {

// h -> lambda^{1/2} T (mu^{-1/2} h) and its transpose, on raw cell vectors.
struct ConjugatedMap {
  const LinearOperator& t;
  const DyadicGrid& g;
  std::vector<double> in_scale, out_scale;

  ConjugatedMap(const LinearOperator& op, const Weight& mu, const Weight& lambda)
      : t(op), g(mu.grid()), in_scale(mu.values().size()), out_scale(lambda.values().size()) {
    for (std::size_t i = 0; i < in_scale.size(); ++i) {
      in_scale[i] = 1.0 / std::sqrt(mu.values()[i]);
      out_scale[i] = std::sqrt(lambda.values()[i]);
    }
  }

  std::vector<double> scaled_apply(const std::vector<double>& h, const std::vector<double>& pre,
                                   const std::vector<double>& post, bool transposed) const {
    GridFunction f(g);
    for (std::size_t i = 0; i < h.size(); ++i) f[i] = h[i] * pre[i];
    GridFunction y = transposed ? t.apply_transpose(f) : t.apply(f);
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = y[i] * post[i];
    return out;
  }
  std::vector<double> apply(const std::vector<double>& h) const { return scaled_apply(h, in_scale, out_scale, false); }
  std::vector<double> apply_t(const std::vector<double>& h) const { return scaled_apply(h, out_scale, in_scale, true); }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

NormEstimate dense_norm(const ConjugatedMap& m) {
  const std::size_t n = m.in_scale.size();
  if (n > 4096) throw StructuralError("dense norm limited to dimension 4096");
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    const auto col = m.apply(e);
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = col[i];
    e[k] = 0.0;
  }
  Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata, Eigen::EigenvaluesOnly);
  NormEstimate out;
  out.method = NormMethod::DenseSVD;
  out.value = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  out.iterations = static_cast<long>(n);
  return out;
}

// Power iteration on A^t A, accelerated with a fully reorthogonalized Krylov basis.
NormEstimate krylov_norm(const ConjugatedMap& m, const NormOptions& opts) {
  const std::size_t n = m.in_scale.size();
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(n);
  for (auto& x : v) x = gauss(rng);
  double nv = std::sqrt(dot(v, v));
  for (auto& x : v) x /= nv;

  NormEstimate out;
  out.method = NormMethod::PowerIteration;
  out.converged = false;
  const int steps = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(opts.krylov_max_steps)));
  for (int k = 0; k < steps; ++k) {
    basis.push_back(v);
    std::vector<double> w = m.apply_t(m.apply(v));
    const double a = dot(w, v);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const double c = dot(w, q);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
      }
    const double b = std::sqrt(dot(w, w));
    // Largest Ritz pair of the tridiagonal matrix built so far.
    const int dim = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < dim) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index top = dim - 1;
    const double theta = es.eigenvalues()(top);
    const double resid = std::abs(b * es.eigenvectors()(dim - 1, top));
    out.iterations = dim;
    out.value = std::sqrt(std::max(0.0, theta));
    out.residual = theta > 0.0 ? resid / theta : resid;
    if (out.residual <= opts.krylov_tolerance || b <= 1e-300) {
      out.converged = true;
      break;
    }
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }
  return out;
}

struct AscentResult {
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

AscentResult ascent_restart(const LinearOperator& t, const Weight& mu, const Weight& lambda, double p,
                            const NormOptions& opts, std::uint64_t seed) {
  const DyadicGrid& g = mu.grid();
  const std::size_t n = g.cells();
  const auto& mw = mu.values();
  const auto& lw = lambda.values();
  auto objective = [&](const GridFunction& f) { return weighted_lp_norm(t.apply(f), lambda, p); };
  auto normalize = [&](GridFunction& f) {
    const double s = weighted_lp_norm(f, mu, p);
    if (s > 0.0) f *= 1.0 / s;
    return s > 0.0;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  GridFunction f(g);
  for (std::size_t i = 0; i < n; ++i) f[i] = gauss(rng);
  normalize(f);
  double val = objective(f);
  AscentResult r;
  double eta = 0.5;
  for (int it = 0; it < opts.max_iterations; ++it) {
    r.iterations = it + 1;
    const GridFunction tf = t.apply(f);
    GridFunction dual(g);
    for (std::size_t i = 0; i < n; ++i) dual[i] = lw[i] * std::pow(std::abs(tf[i]), p - 2.0) * tf[i];
    const GridFunction grad = t.apply_transpose(dual);
    // Fixed-point candidate from the stationarity condition, tried before gradient steps.
    GridFunction fixed(g);
    for (std::size_t i = 0; i < n; ++i)
      fixed[i] = std::copysign(std::pow(std::abs(grad[i]) / mw[i], 1.0 / (p - 1.0)), grad[i]);
    double best = val;
    GridFunction next;
    if (normalize(fixed)) {
      const double v = objective(fixed);
      if (v > best) {
        best = v;
        next = std::move(fixed);
      }
    }
    if (next.size() == 0) {
      const double gn = grad.l2_norm(), fn = f.l2_norm();
      if (gn <= 0.0) {
        r.converged = true;
        break;
      }
      for (int halving = 0; halving < 40; ++halving, eta *= 0.5) {
        GridFunction cand = f;
        cand.axpy(eta * fn / gn, grad);
        if (!normalize(cand)) continue;
        const double v = objective(cand);
        if (v > best) {
          best = v;
          next = std::move(cand);
          eta = std::min(1.0, eta * 2.0);
          break;
        }
      }
    }
    if (next.size() == 0) {
      r.converged = true;
      break;
    }
    const double improvement = (best - val) / std::max(best, 1e-300);
    f = std::move(next);
    val = best;
    r.residual = improvement;
    if (improvement < opts.ascent_tolerance) {
      r.converged = true;
      break;
    }
  }
  r.value = val;
  return r;
}

NormEstimate ascent_norm(const LinearOperator& t, const Weight& mu, const Weight& lambda, double p,
                         const NormOptions& opts) {
  const int restarts = std::max(8, opts.restarts);
  std::vector<AscentResult> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int k = next++; k < restarts; k = next++)
      results[static_cast<std::size_t>(k)] =
          ascent_restart(t, mu, lambda, p, opts, derive_seed(opts.seed, static_cast<std::uint64_t>(k)));
  };
  const int threads = std::clamp(opts.threads, 1, restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  NormEstimate out;
  out.method = NormMethod::ProjectedAscent;
  out.lower_bound = true;
  out.restarts = restarts;
  for (const auto& r : results) {
    out.iterations += r.iterations;
    if (r.value >= out.value) {
      out.value = r.value;
      out.residual = r.residual;
    }
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace

NormEstimate operator_norm(const LinearOperator& t, const Weight& mu, const Weight& lambda, double p,
                           const NormOptions& opts) {
  require_exponent(p);
  require_same_grid(mu.values(), lambda.values(), "operator norm weights");
  NormMethod m = opts.method;
  const std::size_t n = mu.grid().cells();
  if (m == NormMethod::Auto) {
    if (p != 2.0)
      m = NormMethod::ProjectedAscent;
    else
      m = n <= std::min<std::size_t>(opts.dense_limit, 4096) ? NormMethod::DenseSVD : NormMethod::PowerIteration;
  }
  if (m != NormMethod::ProjectedAscent && p != 2.0)
    throw std::invalid_argument(to_string(m) + " needs p = 2");
  switch (m) {
    case NormMethod::DenseSVD: return dense_norm(ConjugatedMap(t, mu, lambda));
    case NormMethod::PowerIteration: return krylov_norm(ConjugatedMap(t, mu, lambda), opts);
    default: return ascent_norm(t, mu, lambda, p, opts);
  }
}

// ---------------------------------------------------------------------------------------------
// Hilbert transforms

namespace {

std::vector<double> hilbert_matrix(std::size_t n) {
  std::vector<double> h(n * n, 0.0);
  std::vector<double> kernel(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    double s = 0.0;
    for (std::size_t k = 1; 2 * k < n; ++k)
      s += std::sin(2.0 * std::numbers::pi * static_cast<double>(k * d) / static_cast<double>(n));
    kernel[d] = 2.0 * s / static_cast<double>(n);
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) h[x * n + y] = kernel[(x + n - y) % n];
  return h;
}

GridFunction hilbert_axis(const GridFunction& f, int axis, double sign) {
  const DyadicGrid& g = f.grid();
  if (g.axis(axis).n != 1) throw StructuralError("discrete Hilbert transform needs n = 1 on the transformed axis");
  const std::size_t n = g.axis(axis).cells();
  const std::vector<double> h = hilbert_matrix(n);
  GridFunction out(g);
  const std::size_t rows = f.rows(), cols = f.cols();
  if (axis == 1) {
    for (std::size_t x = 0; x < rows; ++x)
      for (std::size_t y = 0; y < rows; ++y) {
        const double c = sign * h[x * n + y];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) out.at(x, j) += c * f.at(y, j);
      }
  } else {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t x = 0; x < cols; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < cols; ++y) s += h[x * n + y] * f.at(i, y);
        out.at(i, x) = sign * s;
      }
  }
  return out;
}

GridFunction hilbert_signed(const GridFunction& f, HilbertAxes which, double sign) {
  switch (which) {
    case HilbertAxes::First: return hilbert_axis(f, 1, sign);
    case HilbertAxes::Second: return hilbert_axis(f, 2, sign);
    case HilbertAxes::Both: return hilbert_axis(hilbert_axis(f, 1, sign), 2, sign);
  }
  return f;
}

}  // namespace

GridFunction hilbert_tensor(const GridFunction& f, HilbertAxes which) { return hilbert_signed(f, which, 1.0); }

OperatorHandle hilbert_operator(const DyadicGrid& g, HilbertAxes which) {
  for (int t : {1, 2})
    if ((which == HilbertAxes::Both || (which == HilbertAxes::First) == (t == 1)) && g.axis(t).n != 1)
      throw StructuralError("discrete Hilbert transform needs n = 1 on the transformed axis");
  const char* name = which == HilbertAxes::Both ? "H1H2" : which == HilbertAxes::First ? "H1" : "H2";
  return make_operator(
      name, [which](const GridFunction& f) { return hilbert_signed(f, which, 1.0); },
      [which](const GridFunction& f) { return hilbert_signed(f, which, -1.0); });
}

// ---------------------------------------------------------------------------------------------
// Remainder identities

nlohmann::json RemainderReport::to_json() const {
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [name, f] : terms) t[name] = f.max_abs();
  return {{"operand_scale", operand_scale}, {"residual", residual}, {"term_sup_norms", t}};
}

namespace {

double scale_of(std::initializer_list<const GridFunction*> fs) {
  double s = 1.0;
  for (auto* f : fs) s = std::max(s, f->max_abs());
  return s;
}

double mismatch(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double cube_volume(const AxisGrid& a, int level) { return a.volume(level); }

// Accumulates the split terms of (avg over the small cube - avg over R) for every shift term,
// where "small" is Q (use_q) or P.
struct SplitTerms {
  std::vector<GridFunction> a_terms, b01_terms, b10_terms;
};

SplitTerms split_terms(const Symbol& b, const CancellativeShift& s, const HaarSpectrum& fs, bool use_q) {
  const DyadicGrid& g = s.grid();
  const AxisGrid& a1 = g.axis1;
  const AxisGrid& a2 = g.axis2;
  const ShiftComplexity& c = s.complexity();
  const int d1 = use_q ? c.j1 : c.i1;
  const int d2 = use_q ? c.j2 : c.i2;
  const HaarSpectrum& bs = b.spectrum();
  const Table2D& hb = b.table(Rep::Haar, Rep::Box);
  const Table2D& bh = b.table(Rep::Box, Rep::Haar);

  std::vector<HaarSpectrum> A(static_cast<std::size_t>(d1 * d2), HaarSpectrum(g));
  std::vector<HaarSpectrum> B01(static_cast<std::size_t>(d1), HaarSpectrum(g));
  std::vector<HaarSpectrum> B10(static_cast<std::size_t>(d2), HaarSpectrum(g));
  const auto& e1 = s.entries1();
  const auto& e2 = s.entries2();
  for (std::size_t x = 0; x < e1.size(); ++x)
    for (std::size_t y = 0; y < e2.size(); ++y) {
      const double coef = s.coefficient(x, y) * fs.coef(e1[x].in, e2[y].in);
      if (coef == 0.0) continue;
      const auto& u = e1[x];
      const auto& v = e2[y];
      const int l1 = u.r_level + (use_q ? c.j1 : c.i1);
      const int l2 = v.r_level + (use_q ? c.j2 : c.i2);
      const std::size_t s1 = use_q ? u.q_pos : u.p_pos;
      const std::size_t s2 = use_q ? v.q_pos : v.p_pos;
      for (int k1 = 1; k1 <= d1; ++k1)
        for (int k2 = 1; k2 <= d2; ++k2) {
          double acc = 0.0;
          const std::size_t anc1 = a1.ancestor(s1, k1), anc2 = a2.ancestor(s2, k2);
          for (int t1 = 0; t1 < a1.signature_count(); ++t1)
            for (int t2 = 0; t2 < a2.signature_count(); ++t2)
              acc += bs.coef(a1.basis_index(l1 - k1, anc1, t1), a2.basis_index(l2 - k2, anc2, t2)) *
                     haar_value_on(a1, l1 - k1, t1, s1, l1) * haar_value_on(a2, l2 - k2, t2, s2, l2);
          A[static_cast<std::size_t>((k1 - 1) * d2 + (k2 - 1))].coef(u.out, v.out) += coef * acc;
        }
      const std::size_t r2 = a2.cube_index(v.r_level, v.r_pos);
      for (int k1 = 1; k1 <= d1; ++k1) {
        double acc = 0.0;
        const std::size_t anc1 = a1.ancestor(s1, k1);
        for (int t1 = 0; t1 < a1.signature_count(); ++t1)
          acc += hb.at(a1.basis_index(l1 - k1, anc1, t1), r2) * haar_value_on(a1, l1 - k1, t1, s1, l1);
        B01[static_cast<std::size_t>(k1 - 1)].coef(u.out, v.out) += coef * acc;
      }
      const std::size_t r1 = a1.cube_index(u.r_level, u.r_pos);
      for (int k2 = 1; k2 <= d2; ++k2) {
        double acc = 0.0;
        const std::size_t anc2 = a2.ancestor(s2, k2);
        for (int t2 = 0; t2 < a2.signature_count(); ++t2)
          acc += bh.at(r1, a2.basis_index(l2 - k2, anc2, t2)) * haar_value_on(a2, l2 - k2, t2, s2, l2);
        B10[static_cast<std::size_t>(k2 - 1)].coef(u.out, v.out) += coef * acc;
      }
    }
  SplitTerms out;
  for (auto& x : A) out.a_terms.push_back(haar_inverse(x));
  for (auto& x : B01) out.b01_terms.push_back(haar_inverse(x));
  for (auto& x : B10) out.b10_terms.push_back(haar_inverse(x));
  return out;
}

}  // namespace

RemainderReport remainder_cancellative(const GridFunction& b, const CancellativeShift& s, const GridFunction& f) {
  require_same_grid(b, f, "cancellative remainder");
  if (!(b.grid() == s.grid())) throw StructuralError("shift lives on another grid");
  const DyadicGrid& g = s.grid();
  const Symbol sb(b);
  const HaarSpectrum fs = haar_forward(f);

  // (a) definition
  const GridFunction def = apply_paraproduct(ParaproductKind::PiF, sb, s.apply(f)) -
                           s.apply(apply_paraproduct(ParaproductKind::PiF, sb, f));

  // (b) closed form with the average differences
  const Table2D& avg = sb.table(Rep::Box, Rep::Box);
  HaarSpectrum closed(g);
  const auto& e1 = s.entries1();
  const auto& e2 = s.entries2();
  const ShiftComplexity& c = s.complexity();
  for (std::size_t x = 0; x < e1.size(); ++x)
    for (std::size_t y = 0; y < e2.size(); ++y) {
      const auto& u = e1[x];
      const auto& v = e2[y];
      const double dq = avg.at(g.axis1.cube_index(u.r_level + c.j1, u.q_pos), g.axis2.cube_index(v.r_level + c.j2, v.q_pos));
      const double dp = avg.at(g.axis1.cube_index(u.r_level + c.i1, u.p_pos), g.axis2.cube_index(v.r_level + c.i2, v.p_pos));
      closed.coef(u.out, v.out) += s.coefficient(x, y) * fs.coef(u.in, v.in) * (dq - dp);
    }
  const GridFunction closed_f = haar_inverse(closed);

  // (c) R^1 + R^2 from the split of the average difference through R
  RemainderReport rep;
  GridFunction r1(g), r2(g);
  const SplitTerms sq = split_terms(sb, s, fs, true);
  const SplitTerms sp = split_terms(sb, s, fs, false);
  auto add_all = [&](GridFunction& acc, const SplitTerms& st, double sign, const std::string& tag) {
    for (std::size_t k = 0; k < st.a_terms.size(); ++k) {
      acc.axpy(sign, st.a_terms[k]);
      rep.terms.emplace_back(tag + ":A" + std::to_string(k), st.a_terms[k]);
    }
    for (std::size_t k = 0; k < st.b01_terms.size(); ++k) {
      acc.axpy(sign, st.b01_terms[k]);
      rep.terms.emplace_back(tag + ":B01_" + std::to_string(k + 1), st.b01_terms[k]);
    }
    for (std::size_t k = 0; k < st.b10_terms.size(); ++k) {
      acc.axpy(sign, st.b10_terms[k]);
      rep.terms.emplace_back(tag + ":B10_" + std::to_string(k + 1), st.b10_terms[k]);
    }
  };
  add_all(r1, sq, 1.0, "R1");
  add_all(r2, sp, -1.0, "R2");
  const GridFunction split = r1 + r2;

  rep.terms.emplace_back("definition", def);
  rep.terms.emplace_back("closed_form", closed_f);
  rep.terms.emplace_back("R1", r1);
  rep.terms.emplace_back("R2", r2);
  rep.terms.emplace_back("split", split);
  rep.operand_scale = scale_of({&def, &closed_f, &split});
  rep.residual = std::max({mismatch(def, closed_f), mismatch(def, split), mismatch(closed_f, split)}) / rep.operand_scale;
  return rep;
}

RemainderReport remainder_full_standard(const GridFunction& b, const ProductBmoSymbol& a, const GridFunction& f) {
  require_same_grid(b, f, "full standard remainder");
  require_same_grid(b, a.function(), "full standard remainder");
  const DyadicGrid& g = b.grid();
  const AxisGrid& a1 = g.axis1;
  const AxisGrid& a2 = g.axis2;
  const Symbol sb(b);
  const Symbol sa(a.function());
  RemainderReport rep;

  const GridFunction pif = apply_paraproduct(ParaproductKind::Pi, sa, f);
  const GridFunction lhs = b.times(pif) - apply_paraproduct(ParaproductKind::Pi, sa, b.times(f));

  GridFunction expansion(g);
  for (auto k : kProductKinds) expansion += apply_paraproduct(k, sb, pif);
  for (auto k : kLittleKinds) expansion += apply_paraproduct(k, sb, pif);

  const HaarSpectrum& bs = sb.spectrum();
  const HaarSpectrum fs = haar_forward(f);
  const HaarSpectrum& as = sa.spectrum();
  const std::size_t c1 = a1.cube_count(), c2 = a2.cube_count();

  // Lambda: (1/|Q|) sum_{P subset Q} b^(P) f^(P)
  std::vector<double> e(c1 * c2, 0.0);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (int k2 = 0; k2 < a2.K; ++k2)
        for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
          double s = 0.0;
          for (int t1 = 0; t1 < a1.signature_count(); ++t1)
            for (int t2 = 0; t2 < a2.signature_count(); ++t2) {
              const std::size_t i = a1.basis_index(k1, p1, t1), j = a2.basis_index(k2, p2, t2);
              s += bs.coef(i, j) * fs.coef(i, j);
            }
          e[a1.cube_index(k1, p1) * c2 + a2.cube_index(k2, p2)] = s;
        }
  e = detail::subrectangle_sums(g, std::move(e));

  // lambda01 / lambda10: one-sided sums of hybrid products
  const Table2D& bhb = sb.table(Rep::Haar, Rep::Box);
  const Table2D& bbh = sb.table(Rep::Box, Rep::Haar);
  const Table2D fhb = analyze(f, Rep::Haar, Rep::Box);
  const Table2D fbh = analyze(f, Rep::Box, Rep::Haar);
  std::vector<double> e01(c1 * c2, 0.0), e10(c1 * c2, 0.0);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (std::size_t q2 = 0; q2 < c2; ++q2) {
        double s = 0.0;
        for (int t1 = 0; t1 < a1.signature_count(); ++t1) {
          const std::size_t i = a1.basis_index(k1, p1, t1);
          s += bhb.at(i, q2) * fhb.at(i, q2);
        }
        e01[a1.cube_index(k1, p1) * c2 + q2] = s;
      }
  for (std::size_t q1 = 0; q1 < c1; ++q1)
    for (int k2 = 0; k2 < a2.K; ++k2)
      for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
        double s = 0.0;
        for (int t2 = 0; t2 < a2.signature_count(); ++t2) {
          const std::size_t j = a2.basis_index(k2, p2, t2);
          s += bbh.at(q1, j) * fbh.at(q1, j);
        }
        e10[q1 * c2 + a2.cube_index(k2, p2)] = s;
      }
  detail::subtree_sum_axis(a1, e01, c2, c2, true);
  detail::subtree_sum_axis(a2, e10, c2, c1, false);

  HaarSpectrum lam(g), l01(g), l10(g);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t q1 = 0; q1 < a1.cubes_at(k1); ++q1)
      for (int k2 = 0; k2 < a2.K; ++k2)
        for (std::size_t q2 = 0; q2 < a2.cubes_at(k2); ++q2) {
          const std::size_t r = a1.cube_index(k1, q1) * c2 + a2.cube_index(k2, q2);
          const double vol1 = cube_volume(a1, k1), vol2 = cube_volume(a2, k2);
          for (int d1 = 0; d1 < a1.signature_count(); ++d1)
            for (int d2 = 0; d2 < a2.signature_count(); ++d2) {
              const std::size_t i = a1.basis_index(k1, q1, d1), j = a2.basis_index(k2, q2, d2);
              const double av = as.coef(i, j);
              lam.coef(i, j) = av * e[r] / (vol1 * vol2);
              l01.coef(i, j) = av * e01[r] / vol1;
              l10.coef(i, j) = av * e10[r] / vol2;
            }
        }
  const GridFunction lam_f = haar_inverse(lam), l01_f = haar_inverse(l01), l10_f = haar_inverse(l10);
  GridFunction rhs = expansion;
  rhs -= lam_f;
  rhs -= l01_f;
  rhs -= l10_f;

  rep.terms = {{"commutator", lhs}, {"paraproducts", expansion}, {"Lambda", lam_f},
               {"lambda01", l01_f}, {"lambda10", l10_f},          {"expansion", rhs}};
  rep.operand_scale = scale_of({&lhs, &expansion, &lam_f, &l01_f, &l10_f});
  rep.residual = mismatch(lhs, rhs) / rep.operand_scale;
  return rep;
}

namespace {

// The (0,1) remainder, its six terms, and their sum.
struct MixedParts {
  GridFunction remainder;
  std::vector<std::pair<std::string, GridFunction>> terms;
  GridFunction sum;
};

MixedParts mixed_parts_01(const GridFunction& b, const GridFunction& a, const GridFunction& f) {
  const DyadicGrid& g = b.grid();
  const AxisGrid& a1 = g.axis1;
  const AxisGrid& a2 = g.axis2;
  const Symbol sb(b), sa(a);
  auto P = [](ParaproductKind k, const Symbol& s, const GridFunction& x) { return apply_paraproduct(k, s, x); };
  MixedParts out;
  const GridFunction mf = P(ParaproductKind::Pi01, sa, f);
  out.remainder = P(ParaproductKind::PiF, sb, mf) - P(ParaproductKind::Pi01, sa, P(ParaproductKind::PiF, sb, f));

  const GridFunction t1 = P(ParaproductKind::Pi01, sa, P(ParaproductKind::pi10, sb, f));
  const GridFunction t2 = P(ParaproductKind::Pi01, sa, P(ParaproductKind::gamma10, sb, f));
  const GridFunction t3 = P(ParaproductKind::pi01Star, sb, mf);
  const GridFunction t4 = P(ParaproductKind::gamma01, sb, mf);

  const HaarSpectrum& as = sa.spectrum();
  const HaarSpectrum fs = haar_forward(f);
  const Table2D fhb = analyze(f, Rep::Haar, Rep::Box);
  const Table2D& bhb = sb.table(Rep::Haar, Rep::Box);
  const Table2D& bbh = sb.table(Rep::Box, Rep::Haar);
  const std::size_t c1 = a1.cube_count(), n2 = a2.cells();

  // T01: E(P1, P2 eps2) = sum_eps1 a^(P1 x P2) <f, h_P1 x 1_P2/|P2|>, strict subtree sums in x1.
  std::vector<double> e(c1 * n2, 0.0);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (int k2 = 0; k2 < a2.K; ++k2)
        for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2)
          for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
            const std::size_t j = a2.basis_index(k2, p2, e2);
            double s = 0.0;
            for (int e1 = 0; e1 < a1.signature_count(); ++e1) {
              const std::size_t i = a1.basis_index(k1, p1, e1);
              s += as.coef(i, j) * fhb.at(i, a2.cube_index(k2, p2));
            }
            e[a1.cube_index(k1, p1) * n2 + j] = s;
          }
  std::vector<double> sub = e;
  detail::subtree_sum_axis(a1, sub, n2, n2, true);
  HaarSpectrum t01(g);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t q1 = 0; q1 < a1.cubes_at(k1); ++q1) {
      const std::size_t row = a1.cube_index(k1, q1);
      for (int k2 = 0; k2 < a2.K; ++k2)
        for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2)
          for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
            const std::size_t j = a2.basis_index(k2, p2, e2);
            const double strict = sub[row * n2 + j] - e[row * n2 + j];
            for (int d1 = 0; d1 < a1.signature_count(); ++d1) {
              const std::size_t i = a1.basis_index(k1, q1, d1);
              t01.coef(i, j) = bhb.at(i, a2.cube_index(k2, p2)) * strict / a1.volume(k1);
            }
          }
    }
  const GridFunction t01_f = haar_inverse(t01);

  // T10: output 1_P1/|P1| x h_P2 with ancestors Q2 of P2.
  Table2D t10(g, Rep::Box, Rep::Haar);
  for (int k1 = 0; k1 < a1.K; ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (int e1 = 0; e1 < a1.signature_count(); ++e1) {
        const std::size_t i = a1.basis_index(k1, p1, e1);
        const std::size_t box1 = a1.cube_index(k1, p1);
        for (int k2 = 1; k2 < a2.K; ++k2)
          for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2) {
            double u = 0.0;
            for (int up = 1; up <= k2; ++up) {
              const int l = k2 - up;
              const std::size_t q2 = a2.ancestor(p2, up);
              for (int d2 = 0; d2 < a2.signature_count(); ++d2) {
                const std::size_t j = a2.basis_index(l, q2, d2);
                u += bbh.at(box1, j) * fs.coef(i, j) / a2.volume(l);
              }
            }
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              const std::size_t j = a2.basis_index(k2, p2, e2);
              t10.at(box1, j) += as.coef(i, j) * u;
            }
          }
      }
  const GridFunction t10_f = synthesize(t10);

  out.terms = {{"Pi01_pi10", t1}, {"Pi01_gamma10", t2}, {"pi01Star_Pi01", t3},
               {"gamma01_Pi01", t4}, {"T10", t10_f}, {"T01", t01_f}};
  out.sum = t1 + t2 - t3 - t4 + t10_f - t01_f;
  return out;
}

}  // namespace

RemainderReport remainder_full_mixed(const GridFunction& b, const ProductBmoSymbol& a, Orientation o,
                                     const GridFunction& f) {
  require_same_grid(b, f, "full mixed remainder");
  require_same_grid(b, a.function(), "full mixed remainder");
  RemainderReport rep;
  MixedParts parts;
  GridFunction direct;
  if (o == Orientation::P01) {
    parts = mixed_parts_01(b, a.function(), f);
    direct = parts.remainder;
  } else {
    parts = mixed_parts_01(b.transposed(), a.function().transposed(), f.transposed());
    parts.remainder = parts.remainder.transposed();
    parts.sum = parts.sum.transposed();
    for (auto& [name, t] : parts.terms) t = t.transposed();
    const Symbol sb(b), sa(a.function());
    direct = apply_paraproduct(ParaproductKind::PiF, sb, apply_paraproduct(ParaproductKind::Pi10, sa, f)) -
             apply_paraproduct(ParaproductKind::Pi10, sa, apply_paraproduct(ParaproductKind::PiF, sb, f));
  }
  rep.terms = parts.terms;
  rep.terms.emplace_back("remainder", direct);
  rep.terms.emplace_back("expansion", parts.sum);
  std::vector<const GridFunction*> ops{&direct, &parts.remainder};
  rep.operand_scale = 1.0;
  for (const auto& [name, t] : rep.terms) rep.operand_scale = std::max(rep.operand_scale, t.max_abs());
  rep.residual = std::max(mismatch(direct, parts.sum), mismatch(direct, parts.remainder)) / rep.operand_scale;
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Ratios

double polynomial_factor(const ShiftComplexity& c) { return (1.0 + c.max1()) * (1.0 + c.max2()); }

BoundRatio upper_bound_ratio(const GridFunction& b, const OperatorHandle& t, const BloomTriple& triple, double factor,
                             const NormOptions& opts) {
  BoundRatio r;
  r.factor = factor;
  r.b_norm = bmo_little_norm(b, triple.nu());
  if (r.b_norm <= 1e-14 * std::max(1.0, b.max_abs())) {
    r.b_norm = 0.0;
    return r;
  }
  const auto comm = commutator_operator(b, t);
  r.estimate = operator_norm(*comm, triple.mu, triple.lambda, triple.p, opts);
  r.norm = r.estimate.value;
  r.ratio = r.norm / (factor * r.b_norm);
  return r;
}

BoundRatio lower_bound_ratio(const GridFunction& b, const BloomTriple& triple, const NormOptions& opts) {
  BoundRatio r;
  r.b_norm = bmo_little_norm(b, triple.nu());
  if (r.b_norm <= 1e-14 * std::max(1.0, b.max_abs())) {
    r.b_norm = 0.0;
    return r;
  }
  const auto comm = commutator_operator(b, hilbert_operator(b.grid()));
  r.estimate = operator_norm(*comm, triple.mu, triple.lambda, triple.p, opts);
  r.norm = r.estimate.value;
  if (r.norm <= 1e-14 * r.b_norm) throw std::domain_error("commutator with the Hilbert transforms is degenerate");
  r.ratio = r.b_norm / r.norm;
  return r;
}

BoundRatio paraproduct_norm_ratio(ParaproductKind kind, const GridFunction& b, const BloomTriple& triple,
                                  const NormOptions& opts) {
  BoundRatio r;
  const Weight nu = triple.nu();
  r.b_norm = is_little_bmo_kind(kind) ? bmo_little_norm(b, nu) : bmo_product_norm(b, nu).value;
  if (r.b_norm <= 0.0) throw std::domain_error("paraproduct symbol has zero norm");
  const auto op = paraproduct_operator(kind, Symbol(b));
  r.estimate = operator_norm(*op, triple.mu, triple.lambda, triple.p, opts);
  r.norm = r.estimate.value;
  r.ratio = r.norm / r.b_norm;
  return r;
}

}  // namespace biparam
