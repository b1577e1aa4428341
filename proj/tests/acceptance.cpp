// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   acceptance            all criteria
//   acceptance 3 9        selected criteria

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "biparam/bmo.hpp"
#include "biparam/harness.hpp"
#include "biparam/maximal_square.hpp"
#include "biparam/random.hpp"
#include "naive_oracles.hpp"

using namespace biparam;
using namespace oracle::naive;
using nlohmann::json;

namespace {

// Pinned tolerances.
constexpr double kHaarTol = 1e-12;
constexpr double kDecompTol = 1e-12;
constexpr double kRemainderTol = 1e-10;
constexpr double kOracleTol = 1e-10;
constexpr double kDriftTol = 0.25;
constexpr double kUniformityFactor = 3.0;
constexpr double kMaxA2 = 8.0;
constexpr double kRatioCap = 10.0;    // bounded-ratio sanity cap for criteria 6 and 7
constexpr double kDualityCap = 100.0;  // same for the duality and John-Nirenberg ensembles

constexpr double kTime1 = 10.0, kTime2 = 30.0, kTime3 = 120.0, kTime6 = 900.0;

struct Result {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

ExperimentConfig config(const json& j) { return ExperimentConfig::from_json(j); }

std::string worst_check(const ExperimentReport& r) {
  for (const auto& c : r.checks)
    if (!c.pass) return fmt::format("{} = {:.4g} (limit {:.4g})", c.name, c.value, c.threshold);
  return "";
}

double max_metric(const ExperimentReport& r, const std::string& metric) {
  double m = 0.0;
  for (const auto& row : r.rows)
    if (row.metric == metric) m = std::max(m, row.value);
  return m;
}

std::string drift_summary(const ExperimentReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (c.name.rfind("drift", 0) == 0) s += fmt::format(" {}={:.3f}", c.name, c.value);
  return s;
}

// ---------------------------------------------------------------------------------------------
// 1. Haar algebra

Result criterion1() {
  const auto start = Clock::now();
  const std::vector<DyadicGrid> grids{DyadicGrid(1, 1, 4, 4), DyadicGrid(2, 1, 3, 3), DyadicGrid(2, 2, 2, 2)};
  Rng rng(101);
  double recon = 0, parseval = 0, avg = 0, diff = 0, slice = 0, split = 0, product = 0;
  for (const auto& g : grids)
    for (int t = 0; t < 100; ++t) {
      const GridFunction f = random_function(g, rng);
      const HaarSpectrum s = haar_forward(f);
      recon = std::max(recon, relative_residual(haar_inverse(s), f));
      parseval = std::max(parseval, rel(s.energy(), f.inner(f)));

      // rectangle averages from the series, the direct sum and (a sample) the oracle
      std::uniform_int_distribution<int> l1(0, g.axis1.K), l2(0, g.axis2.K);
      for (int k = 0; k < 6; ++k) {
        const int k1 = l1(rng), k2 = l2(rng);
        const Cube q1{k1, std::uniform_int_distribution<std::size_t>(0, g.axis1.cubes_at(k1) - 1)(rng)};
        const Cube q2{k2, std::uniform_int_distribution<std::size_t>(0, g.axis2.cubes_at(k2) - 1)(rng)};
        const double ref = oracle::average(f, q1, q2);
        avg = std::max({avg, rel(rectangle_average_series(s, {q1, q2}), ref), rel(rectangle_average(f, {q1, q2}), ref)});

        auto parts = local_mean_oscillation_expansion(f, {q1, q2});
        const GridFunction expect = GridFunction::from(g, [&](std::size_t i, std::size_t j) {
          return oracle::indicator(g.axis1, q1, i) * oracle::indicator(g.axis2, q2, j) * (f.at(i, j) - ref);
        });
        const GridFunction got = parts.cancellative + parts.slice1 + parts.slice2;
        split = std::max(split, (got - expect).max_abs() / std::max(1.0, f.max_abs()));

        // slice averages in both variables
        const AxisFunction m1 = slice_average(f, 1, q1);
        for (std::size_t j = 0; j < f.cols(); ++j) {
          double acc = 0.0, n = 0.0;
          for (std::size_t i = 0; i < f.rows(); ++i)
            if (oracle::contains(g.axis1, q1, i)) acc += f.at(i, j), n += 1.0;
          slice = std::max(slice, rel(m1[j], acc / n));
        }
        const AxisFunction m2 = slice_average(f, 2, q2);
        for (std::size_t i = 0; i < f.rows(); ++i) {
          double acc = 0.0, n = 0.0;
          for (std::size_t j = 0; j < f.cols(); ++j)
            if (oracle::contains(g.axis2, q2, j)) acc += f.at(i, j), n += 1.0;
          slice = std::max(slice, rel(m2[i], acc / n));
        }
      }

      // nested averages on each axis
      for (int axis : {1, 2}) {
        const AxisGrid& a = g.axis(axis);
        const AxisFunction u = random_axis_function(a, rng);
        const auto c = haar_forward(u);
        for (int k = 0; k <= a.K; ++k) {
          const Cube q{k, std::uniform_int_distribution<std::size_t>(0, a.cubes_at(k) - 1)(rng)};
          for (int up = 1; up <= k; ++up) {
            const Cube r{k - up, a.ancestor(q.pos, up)};
            diff = std::max(diff, rel(cube_average(u, q) - cube_average(u, r), average_difference_series(a, c, q, r)));
          }
        }
      }

      // signature product rule on a random cube of the first axis
      const AxisGrid& a = g.axis1;
      const int lv = std::uniform_int_distribution<int>(0, a.K - 1)(rng);
      const Cube q{lv, std::uniform_int_distribution<std::size_t>(0, a.cubes_at(lv) - 1)(rng)};
      for (int e = 0; e < a.signature_count(); ++e)
        for (int d = 0; d < a.signature_count(); ++d) {
          const AxisFunction he = haar_function(a, q, e), hd = haar_function(a, q, d);
          for (std::size_t x = 0; x < a.cells(); ++x) {
            const double rhs = e == d ? oracle::indicator(a, q, x) / oracle::volume(a, q)
                                      : oracle::haar(a, q, signature_sum(e, d, a.n), x) / std::sqrt(oracle::volume(a, q));
            product = std::max(product, std::abs(he[x] * hd[x] - rhs) * oracle::volume(a, q));
          }
        }
    }
  const double worst = std::max({recon, parseval, avg, diff, slice, split, product});
  const double secs = since(start);
  return {worst <= kHaarTol && secs < kTime1,
          fmt::format("max residual {:.2e} (recon {:.1e}, parseval {:.1e}, averages {:.1e}, nested {:.1e}, slices "
                      "{:.1e}, split {:.1e}, product rule {:.1e}) <= {:.0e}; {:.2f} s < {:.0f} s",
                      worst, recon, parseval, avg, diff, slice, split, product, kHaarTol, secs, kTime1)};
}

// ---------------------------------------------------------------------------------------------
// 2. Sixteen-term product decomposition

Result criterion2() {
  const auto start = Clock::now();
  std::vector<ParaproductKind> kinds(kProductKinds.begin(), kProductKinds.end());
  kinds.insert(kinds.end(), kLittleKinds.begin(), kLittleKinds.end());
  kinds.push_back(ParaproductKind::PiF);
  Rng rng(202);
  double lib = 0, naive = 0;
  std::size_t terms = 16;
  for (const auto& g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 3)})
    for (int t = 0; t < 50; ++t) {
      const GridFunction b = random_fully_cancellative(g, rng), f = random_fully_cancellative(g, rng);
      const GridFunction bf = b.times(f);
      const auto d = product_decomposition(Symbol(b), f);
      terms = std::min(terms, d.terms.size());
      lib = std::max(lib, relative_residual(d.sum(), bf));
      GridFunction sum(g);
      for (auto k : kinds) sum += oracle::paraproduct(k, b, f);
      naive = std::max(naive, relative_residual(sum, bf));
    }
  const double secs = since(start);
  return {kinds.size() == 16 && terms == 16 && std::max(lib, naive) <= kDecompTol && secs < kTime2,
          fmt::format("100 pairs; library sum {:.2e}, displayed-sum oracle {:.2e} <= {:.0e}; {} terms; {:.2f} s < {:.0f} s",
                      lib, naive, kDecompTol, terms, secs, kTime2)};
}

// ---------------------------------------------------------------------------------------------
// 3. Commutator remainder identities

Result criterion3() {
  const auto start = Clock::now();
  const auto cfg = config({{"suite", "identities"},
                           {"grid", {{"K1", 3}, {"K2", 3}}},
                           {"complexity", {{"max_total", 3}}},
                           {"trials", 50},
                           {"seed", 303},
                           {"tolerances", {{"identity", kRemainderTol}}}});
  const auto r = run_suite(cfg);
  std::set<std::string> complexities;
  for (const auto& row : r.rows)
    if (row.op == "remainder_cancellative") complexities.insert(fmt::format("{}{}{}{}", row.i1, row.i2, row.j1, row.j2));
  std::string detail;
  for (const char* op : {"remainder_cancellative", "remainder_full_standard", "remainder_full_mixed-01",
                         "remainder_full_mixed-10"}) {
    double m = 0.0;
    for (const auto& row : r.rows)
      if (row.op == op) m = std::max(m, row.value);
    detail += fmt::format("{} {:.1e}, ", op, m);
  }
  const double secs = since(start);
  return {r.passed() && secs < kTime3,
          fmt::format("50 trials, {} cancellative complexities; {}tolerance {:.0e}; {:.2f} s < {:.0f} s {}",
                      complexities.size(), detail, kRemainderTol, secs, kTime3, worst_check(r))};
}

// ---------------------------------------------------------------------------------------------
// 4. Oracle equivalence

Result criterion4() {
  const auto start = Clock::now();
  const DyadicGrid g(1, 1, 3, 3);
  std::vector<ParaproductKind> kinds(kProductKinds.begin(), kProductKinds.end());
  kinds.insert(kinds.end(), kLittleKinds.begin(), kLittleKinds.end());
  kinds.push_back(ParaproductKind::PiF);
  std::vector<ShiftComplexity> cs;
  for (int i1 = 0; i1 <= 2; ++i1)
    for (int i2 = 0; i2 <= 2; ++i2)
      for (int j1 = 0; j1 <= 2; ++j1)
        for (int j2 = 0; j2 <= 2; ++j2)
          if (i1 + i2 + j1 + j2 <= 3) cs.push_back({i1, i2, j1, j2});

  std::map<std::string, double> worst;
  auto note = [&](const std::string& k, double v) { worst[k] = std::max(worst[k], v); };
  Rng rng(404);
  for (int t = 0; t < 20; ++t) {
    const GridFunction b = random_function(g, rng), f = random_function(g, rng);
    const Symbol sb(b);
    for (auto k : kinds) note("paraproducts", relative_residual(apply_paraproduct(k, sb, f), oracle::paraproduct(k, b, f)));

    const auto c = cs[static_cast<std::size_t>(t) % cs.size()];
    const auto sh = CancellativeShift::random(g, c, 4000 + t);
    note("cancellative shift", relative_residual(sh.apply(f), shift_oracle(sh, f)));
    const auto a = ProductBmoSymbol::random(g, 5000 + t);
    note("full standard", relative_residual(apply_full_standard(a, f), oracle::paraproduct(ParaproductKind::Pi, a.function(), f)));
    note("full standard adjoint", relative_residual(apply_full_standard(a, f, true),
                                                    oracle::paraproduct(ParaproductKind::PiStar, a.function(), f)));
    note("full mixed", relative_residual(apply_full_mixed(a, Orientation::P01, f),
                                         oracle::paraproduct(ParaproductKind::Pi01, a.function(), f)));
    note("full mixed", relative_residual(apply_full_mixed(a, Orientation::P10, f),
                                         oracle::paraproduct(ParaproductKind::Pi10, a.function(), f)));
    const int pi = t % 2, pj = (t / 2) % 3;
    const auto ps = PartialSymbolSequence::random(g, pi, pj, Orientation::P01, 6000 + t);
    note("partial", relative_residual(ps.apply(f), partial_oracle(g, pi, pj, symbol_functions(ps, g.axis2), f)));
    const auto pt = PartialSymbolSequence::random(g, pi, pj, Orientation::P10, 7000 + t);
    note("partial", relative_residual(pt.apply(f), partial_oracle(g, pi, pj, symbol_functions(pt, g.axis2),
                                                                  f.transposed()).transposed()));

    note("strong maximal", relative_residual(maximal_dyadic(f, MaxScope::Strong), naive_strong_max(f)));
    note("square function", relative_residual(square_function(f, SquareScope::Biparameter), naive_shifted(f, {})));
    note("shifted square", relative_residual(shifted_square_function(f, c), naive_shifted(f, c)));
    const int si = t % 2, sj = (t / 2) % 2;
    note("square-maximal", relative_residual(mixed_square_maximal(f, MixedOrder::SM, std::pair{si, sj}), naive_sm(f, si, sj)));
    note("square-maximal", relative_residual(mixed_square_maximal(f, MixedOrder::MS),
                                             naive_sm(f.transposed(), 0, 0).transposed()));

    WeightFamilyConfig wc;
    wc.kind = WeightKind::Cascade;
    wc.cascade_delta = 0.5;
    wc.seed = 8000 + t;
    const Weight w = make_weight(g, wc);
    const double p = 1.5 + 0.25 * (t % 7);
    note("little bmo", rel(bmo_little_norm(b, w), naive_osc(b, &w.values(), nullptr, 1.0)));
    note("one-weight JN bmo",
         rel(bmo_one_weight_jn(b, w, p), naive_osc(b, &w.values(), &conjugate_weight(w, p).values(), dual_exponent(p))));
    note("rectangular BMO", rel(bmo_rectangular_norm(b, w), naive_rectangular(b, w.values())));
    note("A_p", rel(ap_characteristic(w, p), naive_ap(w.values(), p)));
    const AxisFunction aw = averaged_weight(w, 1, {1, static_cast<std::size_t>(t % 2)});
    note("A_p one-parameter", rel(ap_characteristic(aw, p), naive_ap_1d(aw, p)));

    // every open set of a 4 x 4 grid is enumerable; 8 x 8 is not
    const DyadicGrid small(1, 1, 2, 2);
    const GridFunction bs = random_fully_cancellative(small, rng);
    const Weight ws = make_weight(small, wc);
    note("product BMO (K=(2,2))", rel(bmo_product_norm(bs, ws).value, naive_product(bs, ws.values())));
  }
  double m = 0.0;
  std::string detail;
  for (const auto& [k, v] : worst) {
    m = std::max(m, v);
    detail += fmt::format("{} {:.1e}; ", k, v);
  }
  return {m <= kOracleTol, fmt::format("20 trials each, max {:.2e} <= {:.0e}: {}{:.2f} s", m, kOracleTol, detail, since(start))};
}

// ---------------------------------------------------------------------------------------------
// 5-8. Statistical suites through the harness

Result criterion5() {
  const auto cfg = config({{"suite", "shift-one-weight"},
                           {"K_sweep", {4, 5, 6}},
                           {"p", {2.0}},
                           {"weights", {{"w", {{"kind", "cascade"}, {"seed", 7}}}}},
                           {"complexity", {{"cap1", 3}, {"cap2", 3}, {"max_total", 3}}},
                           {"trials", 30},
                           {"seed", 505},
                           {"tolerances",
                            {{"drift", kDriftTol}, {"uniformity", kUniformityFactor}, {"max_weight_characteristic", kMaxA2}}}});
  const auto r = run_suite(cfg);
  double uni = 0.0;
  for (const auto& c : r.checks)
    if (c.name.rfind("uniformity", 0) == 0) uni = std::max(uni, c.value);
  return {r.passed(), fmt::format("[w]_A2 {:.3f} <= {}; {} ratios; worst uniformity {:.3f} <= {};{}; {:.1f} s {}",
                                  max_metric(r, "A_p"), kMaxA2, r.rows.size() - 3, uni, kUniformityFactor,
                                  drift_summary(r), r.runtime_seconds, worst_check(r))};
}

Result criterion6() {
  const auto cfg = config({{"suite", "upper-bound"},
                           {"K_sweep", {4, 5, 6}},
                           {"p", {2.0, 3.0}},
                           {"complexity", {{"cap1", 2}, {"cap2", 2}, {"max_total", 3}}},
                           {"trials", 50},
                           {"seed", 606},
                           {"tolerances", {{"drift", kDriftTol}, {"ratio_cap", kRatioCap}}}});
  const auto r = run_suite(cfg);
  return {r.passed() && r.runtime_seconds < kTime6,
          fmt::format("ensemble max ratio {:.3f} <= {};{}; {:.1f} s < {:.0f} s {}", max_metric(r, "ratio"), kRatioCap,
                      drift_summary(r), r.runtime_seconds, kTime6, worst_check(r))};
}

Result criterion7() {
  const auto cfg = config({{"suite", "lower-bound"},
                           {"K_sweep", {4, 5, 6}},
                           {"p", {2.0}},
                           {"trials", 50},
                           {"seed", 707},
                           {"tolerances", {{"drift", kDriftTol}, {"ratio_cap", kRatioCap}}}});
  const auto r = run_suite(cfg);
  return {r.passed(), fmt::format("ensemble max ratio {:.3f} <= {};{}; {:.1f} s {}", max_metric(r, "ratio"), kRatioCap,
                                  drift_summary(r), r.runtime_seconds, worst_check(r))};
}

Result criterion8() {
  const json base = {{"grid", {{"K1", 3}, {"K2", 3}}},
                     {"p", {2.0, 3.0}},
                     {"weights", {{"mu", {{"kind", "cascade"}}}, {"lambda", {{"kind", "cascade"}}}}},
                     {"trials", 500},
                     {"tolerances", {{"ratio_cap", kDualityCap}}}};
  json d = base, j = base;
  d["suite"] = "duality";
  d["seed"] = 808;
  j["suite"] = "jn-equivalence";
  j["seed"] = 809;
  const auto rd = run_suite(config(d));
  const auto rj = run_suite(config(j));
  double viol = 0.0, dual_hi = 0.0, jn_lo = INFINITY, jn_hi = 0.0;
  for (const auto& row : rd.rows) {
    if (row.metric == "averaged_characteristic_violations" || row.metric == "A_p_below_one") viol += row.value;
    if (row.metric == "ratio") dual_hi = std::max(dual_hi, row.value);
  }
  // a pairing can vanish, so duality ratios are only bounded above; the norm equivalences are two-sided
  for (const auto& row : rj.rows)
    if (row.metric == "ratio") jn_lo = std::min(jn_lo, row.value), jn_hi = std::max(jn_hi, row.value);
  return {rd.passed() && rj.passed(),
          fmt::format("500 trials each; duality ratios <= {:.3g} (cap {}); John-Nirenberg ratios in [{:.3g}, {:.3g}] "
                      "(caps 1/{} and {}); {} violations of the averaged characteristic and A_p >= 1 bounds; {:.1f} s {}{}",
                      dual_hi, kDualityCap, jn_lo, jn_hi, kDualityCap, kDualityCap, viol,
                      rd.runtime_seconds + rj.runtime_seconds, worst_check(rd), worst_check(rj))};
}

// ---------------------------------------------------------------------------------------------
// 9. Determinism

Result criterion9() {
  std::vector<json> cfgs = {
      {{"suite", "identities"}, {"trials", 10}, {"seed", 909}},
      {{"suite", "upper-bound"}, {"K_sweep", {4}}, {"p", {2.0, 3.0}}, {"trials", 4}, {"seed", 910}},
      {{"suite", "lower-bound"}, {"grid", {{"K1", 4}, {"K2", 4}}}, {"p", {2.5}}, {"trials", 3}, {"seed", 911}},
      {{"suite", "journe-ensemble"}, {"grid", {{"K1", 4}, {"K2", 4}}}, {"trials", 3}, {"seed", 912}},
      {{"suite", "square-sweeps"}, {"p", {1.5, 3.0}}, {"trials", 3}, {"seed", 913}}};
  std::size_t same = 0, rows = 0;
  for (auto& j : cfgs) {
    j["threads"] = 1;
    const auto a = run_suite(config(j));
    j["threads"] = 4;
    const auto b = run_suite(config(j));
    // replay from the echoed config
    json echo = a.summary()["config"];
    const auto c = run_suite(config(echo));
    if (a.csv() == b.csv() && a.csv() == c.csv() && !a.rows.empty()) ++same;
    rows += a.rows.size();
  }
  return {same == cfgs.size(),
          fmt::format("{}/{} suites byte-identical across reruns, thread counts and config replay ({} rows)", same,
                      cfgs.size(), rows)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"exact Haar algebra", criterion1},
      {"sixteen-term product decomposition", criterion2},
      {"commutator remainder identities", criterion3},
      {"brute-force oracle equivalence", criterion4},
      {"one-weight shift bound", criterion5},
      {"two-weight upper bound ratio", criterion6},
      {"lower bound ratio", criterion7},
      {"duality and John-Nirenberg ensembles", criterion8},
      {"determinism", criterion9}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Result r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    fmt::print("{} [{}] {}: {}\n", r.pass ? "PASS" : "FAIL", id, criteria[k].first, r.detail);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
