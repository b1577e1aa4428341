#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "naive_oracles.hpp"

#include "biparam/random.hpp"
#include "biparam/weights.hpp"

using namespace biparam;
using namespace oracle::naive;

namespace {

Weight cascade_weight(const DyadicGrid& g, std::uint64_t seed, double delta = 0.5, int depth = 3) {
  WeightFamilyConfig c;
  c.kind = WeightKind::Cascade;
  c.cascade_delta = delta;
  c.cascade_depth = depth;
  c.seed = seed;
  return make_weight(g, c);
}

}  // namespace

TEST_CASE("constant weight has characteristic one") {
  DyadicGrid g(1, 1, 3, 3);
  Weight w(GridFunction(g, 1.0));
  for (double p : {1.5, 2.0, 3.0}) CHECK(ap_characteristic(w, p) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ap_characteristic(w, 1.0), StructuralError);
  CHECK_THROWS_AS(Weight(GridFunction(g, 0.0)), StructuralError);
}

TEST_CASE("A_p characteristic matches exhaustive rectangles") {
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 3)})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Weight w = cascade_weight(g, seed);
      for (double p : {1.5, 2.0, 3.0}) {
        double a = ap_characteristic(w, p);
        CHECK(std::abs(a - naive_ap(w.values(), p)) <= 1e-10 * a);
        CHECK(a >= 1.0);
      }
      CHECK(ap_characteristic(w, 2.0) == doctest::Approx(ap_characteristic(conjugate_weight(w, 2.0), 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("cached averages equal recomputation") {
  DyadicGrid g(1, 1, 3, 3);
  Weight w = cascade_weight(g, 9);
  for (auto q1 : oracle::cubes(g.axis1, 0, 3))
    for (auto q2 : oracle::cubes(g.axis2, 0, 3)) {
      CHECK(std::abs(w.average({q1, q2}) - oracle::average(w.values(), q1, q2)) <= 1e-12);
      auto c = w.conjugate_averages(3.0);
      GridFunction wc = w.values().map([](double v) { return std::pow(v, -0.5); });
      double cached = c->at(g.axis1.cube_index(q1.level, q1.pos), g.axis2.cube_index(q2.level, q2.pos));
      CHECK(std::abs(cached - oracle::average(wc, q1, q2)) <= 1e-12);
    }
}

TEST_CASE("cascade ratio stays inside the configured bound and is depth-consistent") {
  DyadicGrid g(1, 1, 4, 4);
  Weight w = cascade_weight(g, 3, 0.25, 3);
  // every dyadic child rectangle of the chain stays within (1+d)^{#steps} of its parent;
  // adjacent chain steps differ by at most one factor
  DyadicGrid fine(1, 1, 6, 5);
  Weight wf = cascade_weight(fine, 3, 0.25, 3);
  for (auto q1 : oracle::cubes(g.axis1, 3, 3))
    for (auto q2 : oracle::cubes(g.axis2, 3, 3))
      CHECK(w.average({q1, q2}) == doctest::Approx(wf.average({q1, q2})).epsilon(1e-12));
  double lo = 1e300, hi = 0;
  for (double v : w.values().values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= std::pow(1.25, 2 * 6) + 1e-9);
  // level (1,0) rectangle against (0,0): a single factor
  for (std::size_t p = 0; p < 2; ++p) {
    double r = w.average({{1, p}, {0, 0}}) / w.average({{0, 0}, {0, 0}});
    CHECK(r <= std::pow(1.25, 6) + 1e-9);
  }
}

TEST_CASE("conjugate weight and the dual characteristic") {
  DyadicGrid g(1, 1, 3, 3);
  CHECK(relative_residual(conjugate_weight(Weight(GridFunction(g, 1.0)), 3.0).values(), GridFunction(g, 1.0)) <= 1e-15);
  Weight w = cascade_weight(g, 4);
  GridFunction recip = w.values().map([](double v) { return 1.0 / v; });
  CHECK(relative_residual(conjugate_weight(w, 2.0).values(), recip) <= 1e-14);
  for (double p : {1.5, 3.0, 4.0}) {
    double q = dual_exponent(p);
    Weight back = conjugate_weight(conjugate_weight(w, p), q);
    CHECK(relative_residual(back.values(), w.values()) <= 1e-12);
    double a = ap_characteristic(w, p);
    double b = ap_characteristic(conjugate_weight(w, p), q);
    CHECK(std::abs(b - std::pow(a, q - 1.0)) <= 1e-9 * b);
  }
}

TEST_CASE("Bloom weight") {
  DyadicGrid g(1, 1, 3, 3);
  Weight mu = cascade_weight(g, 5), lam = cascade_weight(g, 6);
  CHECK(relative_residual(BloomTriple{mu, mu, 2.0}.nu().values(), GridFunction(g, 1.0)) <= 1e-14);
  Weight one(GridFunction(g, 1.0));
  GridFunction root = mu.values().map([](double v) { return std::cbrt(v); });
  CHECK(relative_residual(BloomTriple{mu, one, 3.0}.nu().values(), root) <= 1e-14);
  Weight nu = BloomTriple{mu, lam, 2.0}.nu();
  double a = ap_characteristic(nu, 2.0);
  CHECK(std::isfinite(a));
  CHECK(a <= std::sqrt(ap_characteristic(mu, 2.0) * ap_characteristic(lam, 2.0)) + 1e-9);
}

TEST_CASE("slice characteristics are dominated and averaged weights obey the inequality") {
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 3)})
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
      Weight w = cascade_weight(g, seed, 0.6);
      for (double p : {1.5, 2.0, 3.0}) {
        double bi = ap_characteristic(w, p);
        double s1 = ap_characteristic(w, p, ApScope::Parameter1);
        double s2 = ap_characteristic(w, p, ApScope::Parameter2);
        CHECK(s1 <= bi * (1 + 1e-9));
        CHECK(s2 <= bi * (1 + 1e-9));
        // slice characteristic oracle
        double naive = 0.0;
        for (std::size_t j = 0; j < g.axis2.cells(); ++j) {
          AxisFunction slice(g.axis1);
          for (std::size_t i = 0; i < g.axis1.cells(); ++i) slice[i] = w.values().at(i, j);
          naive = std::max(naive, naive_ap_1d(slice, p));
        }
        CHECK(std::abs(s1 - naive) <= 1e-10 * s1);
        for (int t = 1; t <= 2; ++t)
          for (auto q : oracle::cubes(g.axis(t), 0, g.axis(t).K)) {
            AxisFunction m = averaged_weight(w, t, q);
            double a = ap_characteristic(m, p);
            CHECK(std::abs(a - naive_ap_1d(m, p)) <= 1e-10 * a);
            CHECK(a <= bi + 1e-9);
          }
      }
    }
}

TEST_CASE("averaged weight of a tensor") {
  DyadicGrid g(1, 1, 3, 3);
  Rng rng(3);
  AxisFunction u(g.axis1), v(g.axis2);
  std::uniform_real_distribution<double> d(0.2, 3.0);
  for (auto& x : u.values) x = d(rng);
  for (auto& x : v.values) x = d(rng);
  Weight w(GridFunction::tensor(u, v));
  AxisFunction m = averaged_weight(w, 1, {1, 1});
  double scale = cube_average(u, {1, 1});
  for (std::size_t j = 0; j < 8; ++j) CHECK(m[j] == doctest::Approx(scale * v[j]));
  CHECK(ap_characteristic(m, 2.0) == doctest::Approx(ap_characteristic(v, 2.0)));
  AxisFunction c = averaged_weight(Weight(GridFunction(g, 2.0)), 2, {2, 3});
  CHECK(ap_characteristic(c, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("power weights") {
  DyadicGrid g(1, 1, 4, 4);
  WeightFamilyConfig c;
  c.kind = WeightKind::Power;
  c.alpha1 = 0.5;
  c.alpha2 = -0.5;
  Weight w = make_weight(g, c, 2.0);
  CHECK(ap_characteristic(w, 2.0) > 1.0);
  c.alpha1 = 1.5;
  CHECK_THROWS_AS(make_weight(g, c, 2.0), StructuralError);
  // cell averages of |x-1/2|^alpha integrate to the exact total mass
  c.alpha1 = 0.5;
  c.alpha2 = 0.0;
  Weight w2 = make_weight(g, c, 2.0);
  CHECK(w2.average({{0, 0}, {0, 0}}) == doctest::Approx(2.0 * std::pow(0.5, 1.5) / 1.5));
}

TEST_CASE("reverse Hoelder probe") {
  DyadicGrid g(1, 1, 3, 3);
  auto flat = reverse_holder_probe(Weight(GridFunction(g, 1.0)), {0.1, 0.5}, 1);
  for (auto& r : flat.rows) CHECK(r.constant == doctest::Approx(1.0));
  // two-valued weight: 1 on the left half, M on the right
  const double M = 9.0;
  Weight two(GridFunction::from(g, [&](std::size_t i, std::size_t) { return i < 4 ? 1.0 : M; }));
  for (double eps : {0.05, 0.2, 1.0}) {
    auto rep = reverse_holder_probe(two, {eps}, 2, 10);
    double expect = std::pow((1.0 + std::pow(M, 1.0 + eps)) / 2.0, 1.0 / (1.0 + eps)) / ((1.0 + M) / 2.0);
    CHECK(rep.rows[0].constant == doctest::Approx(expect).epsilon(1e-12));
  }
  Weight w = cascade_weight(g, 21, 0.8);
  auto rep = reverse_holder_probe(w, {0.05, 0.1, 0.2, 0.5, 1.0}, 3, 300);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].constant >= rep.rows[i - 1].constant - 1e-12);
  CHECK(rep.delta_fit > 0.0);
  CHECK_THROWS_AS(reverse_holder_probe(w, {}, 1), StructuralError);
}

TEST_CASE("weighted norms and duality") {
  DyadicGrid g(1, 1, 3, 3);
  Weight one(GridFunction(g, 1.0));
  CHECK(weighted_lp_norm(GridFunction(g, 1.0), one, 3.0) == doctest::Approx(1.0));
  Rng rng(4);
  GridFunction f = random_function(g, rng);
  Weight w = cascade_weight(g, 7);
  CHECK(weighted_lp_norm(3.0 * f, w, 2.5) == doctest::Approx(3.0 * weighted_lp_norm(f, w, 2.5)));
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), 3.0) * w.values()[i] / 64.0;
  CHECK(weighted_lp_norm(f, w, 3.0) == doctest::Approx(std::cbrt(s)).epsilon(1e-13));
  CHECK_THROWS_AS(weighted_lp_norm(f, w, 0.5), StructuralError);

  CHECK(duality_gap(GridFunction(g), w, 2.0, 5, 1).best_pairing == 0.0);
  for (double p : {2.0, 2.5, 4.0}) {
    auto d = duality_gap(f, w, p, 20, 3);
    CHECK(std::abs(d.gap) <= 1e-9 * d.norm);
  }
  auto d = duality_gap(f, one, 2.0, 0, 3);
  CHECK(d.best_pairing == doctest::Approx(f.l2_norm()));
}
