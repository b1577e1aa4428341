#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "naive_oracles.hpp"

#include <random>

#include "biparam/bmo.hpp"
#include "biparam/random.hpp"

using namespace biparam;
using namespace oracle::naive;

namespace {

Weight cascade(const DyadicGrid& g, std::uint64_t seed) {
  WeightFamilyConfig c;
  c.kind = WeightKind::Cascade;
  c.cascade_delta = 0.5;
  c.seed = seed;
  return make_weight(g, c);
}

}  // namespace

TEST_CASE("little bmo matches exhaustive rectangles") {
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 2)}) {
    std::mt19937_64 rng(5);
    for (std::uint64_t s = 1; s <= 4; ++s) {
      GridFunction b = random_function(g, rng);
      Weight w = cascade(g, s);
      CHECK(bmo_little_norm(b, w) == doctest::Approx(naive_osc(b, &w.values(), nullptr, 1.0)).epsilon(1e-12));
      const double p = 1.5 + 0.5 * static_cast<double>(s);
      CHECK(bmo_one_weight_jn(b, w, p) ==
            doctest::Approx(naive_osc(b, &w.values(), &conjugate_weight(w, p).values(), dual_exponent(p))).epsilon(1e-12));
    }
  }
}

TEST_CASE("little bmo of a Haar tensor and scaling") {
  DyadicGrid g(1, 1, 3, 3);
  Weight one(GridFunction(g, 1.0));
  Cube q1{1, 1}, q2{2, 3};
  GridFunction h = haar_tensor(g, q1, 0, q2, 0);
  const double area = oracle::volume(g.axis1, q1) * oracle::volume(g.axis2, q2);
  CHECK(bmo_little_norm(h, one) == doctest::Approx(1.0 / std::sqrt(area)));
  CHECK(bmo_little_norm(GridFunction(g, 3.0), one) == doctest::Approx(0.0));
  std::mt19937_64 rng(2);
  GridFunction b = random_function(g, rng);
  Weight w = cascade(g, 9);
  Weight w2(2.0 * w.values());
  CHECK(bmo_little_norm(b, w2) == doctest::Approx(0.5 * bmo_little_norm(b, w)));
  CHECK(bmo_little_norm(3.0 * b, w) == doctest::Approx(3.0 * bmo_little_norm(b, w)));
}

TEST_CASE("John-Nirenberg variants against direct sums") {
  DyadicGrid g(1, 1, 3, 3);
  std::mt19937_64 rng(7);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    GridFunction b = random_function(g, rng);
    for (double p : {1.5, 3.0}) {
      BloomTriple t{cascade(g, 10 + s), cascade(g, 20 + s), p};
      auto jn = john_nirenberg_variants(b, t);
      CHECK(jn.bmo_nu == doctest::Approx(naive_osc(b, &t.nu().values(), nullptr, 1.0)).epsilon(1e-12));
      CHECK(jn.mu_lambda_p == doctest::Approx(naive_osc(b, &t.mu.values(), &t.lambda.values(), p)).epsilon(1e-12));
      const GridFunction ld = conjugate_weight(t.lambda, p).values(), md = conjugate_weight(t.mu, p).values();
      CHECK(jn.dual_form == doctest::Approx(naive_osc(b, &ld, &md, dual_exponent(p))).epsilon(1e-12));
    }
  }
  Weight one(GridFunction(g, 1.0));
  GridFunction b = random_function(g, rng);
  auto jn = john_nirenberg_variants(b, BloomTriple{one, one, 3.0});
  CHECK(jn.bmo_nu == doctest::Approx(bmo_little_norm(b, one)));
  CHECK(jn.mu_lambda_p == doctest::Approx(naive_osc(b, nullptr, nullptr, 3.0)));
  CHECK(jn.dual_form == doctest::Approx(naive_osc(b, nullptr, nullptr, 1.5)));
  CHECK(jn.mu_lambda_p >= jn.bmo_nu);
  auto zero = john_nirenberg_variants(GridFunction(g, 2.0), BloomTriple{one, one, 2.0});
  CHECK(zero.bmo_nu == 0.0);
  CHECK(zero.mu_lambda_p == 0.0);
  CHECK(zero.dual_form == 0.0);
}

TEST_CASE("slicewise bmo against direct slices") {
  DyadicGrid g(1, 2, 3, 2);
  std::mt19937_64 rng(3);
  GridFunction b = random_function(g, rng);
  Weight w = cascade(g, 4);
  double best = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const AxisGrid& a = g.axis(t);
    const std::size_t others = t == 1 ? g.axis2.cells() : g.axis1.cells();
    for (std::size_t o = 0; o < others; ++o)
      for (auto q : oracle::cubes(a, 0, a.K)) {
        auto cs = cells_of(a, q);
        double m = 0, wq = 0, osc = 0;
        for (auto i : cs) m += t == 1 ? b.at(i, o) : b.at(o, i);
        m /= static_cast<double>(cs.size());
        for (auto i : cs) {
          osc += std::abs((t == 1 ? b.at(i, o) : b.at(o, i)) - m);
          wq += t == 1 ? w.values().at(i, o) : w.values().at(o, i);
        }
        best = std::max(best, osc / wq);
      }
  }
  CHECK(bmo_slicewise_norm(b, w) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("rectangular BMO matches exhaustive sub-rectangle sums") {
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 1, 2)}) {
    std::mt19937_64 rng(11);
    for (std::uint64_t s = 1; s <= 3; ++s) {
      GridFunction b = random_fully_cancellative(g, rng);
      Weight w = cascade(g, s);
      CHECK(bmo_rectangular_norm(b, w) == doctest::Approx(naive_rectangular(b, w.values())).epsilon(1e-12));
    }
  }
  DyadicGrid g(1, 1, 3, 3);
  Weight one(GridFunction(g, 1.0));
  CHECK(bmo_rectangular_norm(haar_tensor(g, {0, 0}, 0, {0, 0}, 0), one) == doctest::Approx(1.0));
  CHECK(bmo_rectangular_norm(haar_tensor(g, {1, 0}, 0, {2, 1}, 0), one) == doctest::Approx(std::sqrt(8.0)));
  CHECK(bmo_rectangular_norm(GridFunction(g, 1.0), one) == 0.0);
}

TEST_CASE("product BMO search") {
  SUBCASE("exhaustive mode equals brute-force subsets") {
    for (auto g : {DyadicGrid(1, 1, 2, 2), DyadicGrid(2, 1, 1, 2), DyadicGrid(1, 1, 1, 3)}) {
      std::mt19937_64 rng(13);
      for (std::uint64_t s = 1; s <= 3; ++s) {
        GridFunction b = random_fully_cancellative(g, rng);
        Weight w = cascade(g, s);
        auto r = bmo_product_norm(b, w);
        CHECK(r.witness.method == "exhaustive");
        CHECK(r.value == doctest::Approx(naive_product(b, w.values())).epsilon(1e-12));
        CHECK(product_bmo_objective(b, w, r.witness) == doctest::Approx(r.value).epsilon(1e-12));
        CHECK(r.value >= bmo_rectangular_norm(b, w) * (1 - 1e-12));
      }
    }
  }
  SUBCASE("search mode is a lower bound with a valid witness") {
    DyadicGrid g(1, 1, 2, 2);
    ProductSearchBudget budget;
    budget.exhaustive_cells = 0;
    std::mt19937_64 rng(17);
    for (std::uint64_t s = 1; s <= 5; ++s) {
      GridFunction b = random_fully_cancellative(g, rng);
      Weight w = cascade(g, s);
      auto r = bmo_product_norm(b, w, budget);
      CHECK(r.value <= naive_product(b, w.values()) * (1 + 1e-12));
      CHECK(r.value >= bmo_rectangular_norm(b, w) * (1 - 1e-12));
      CHECK(product_bmo_objective(b, w, r.witness) == doctest::Approx(r.value).epsilon(1e-12));
    }
  }
  SUBCASE("larger grids") {
    DyadicGrid g(1, 1, 4, 4);
    std::mt19937_64 rng(19);
    GridFunction b = random_fully_cancellative(g, rng);
    Weight w = cascade(g, 3);
    auto r = bmo_product_norm(b, w);
    CHECK(r.value >= bmo_rectangular_norm(b, w) * (1 - 1e-12));
    CHECK(product_bmo_objective(b, w, r.witness) == doctest::Approx(r.value).epsilon(1e-12));
    CHECK(r.witness.bitmap().size() == g.cells());
    auto again = bmo_product_norm(b, w);
    CHECK(again.value == r.value);
    CHECK(again.witness.bitmap() == r.witness.bitmap());
  }
  SUBCASE("Haar tensor and constants") {
    DyadicGrid g(1, 1, 3, 3);
    Weight one(GridFunction(g, 1.0));
    CHECK(bmo_product_norm(haar_tensor(g, {0, 0}, 0, {0, 0}, 0), one).value == doctest::Approx(1.0));
    CHECK(bmo_product_norm(haar_tensor(g, {1, 1}, 0, {1, 0}, 0), one).value == doctest::Approx(2.0));
    CHECK(bmo_product_norm(GridFunction(g, 1.0), one).value == 0.0);
    OpenSetApprox empty{g, std::vector<std::uint8_t>(g.cells(), 0), "", 0, 0};
    CHECK_THROWS(product_bmo_objective(GridFunction(g, 1.0), one, empty));
  }
}

TEST_CASE("one-parameter BMO against exhaustive intervals") {
  AxisGrid a{1, 4};
  CHECK(bmo_one_parameter_norm(haar_function(a, {0, 0}, 0)) == doctest::Approx(1.0));
  CHECK(bmo_one_parameter_norm(haar_function(a, {2, 1}, 0)) == doctest::Approx(2.0));
  CHECK(bmo_one_parameter_norm(AxisFunction(a, 4.0)) == doctest::Approx(0.0));
  std::mt19937_64 rng(23);
  for (AxisGrid ax : {AxisGrid{1, 4}, AxisGrid{2, 3}}) {
    AxisFunction u = random_axis_function(ax, rng);
    double best = 0.0;
    for (auto q : oracle::cubes(ax, 0, ax.K)) {
      double s = 0.0;
      for (auto p : oracle::cubes(ax, q.level, ax.K - 1))
        if (oracle::subcube(ax, p, q))
          for (int e = 0; e < ax.signature_count(); ++e) {
            double c = 0.0;
            for (std::size_t i = 0; i < ax.cells(); ++i) c += u[i] * oracle::haar(ax, p, e, i) * ax.volume(ax.K);
            s += c * c;
          }
      best = std::max(best, std::sqrt(s / oracle::volume(ax, q)));
    }
    CHECK(bmo_one_parameter_norm(u) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("H1 norms") {
  DyadicGrid g(1, 1, 3, 3);
  Weight one(GridFunction(g, 1.0));
  CHECK(h1_norm(GridFunction(g), one) == 0.0);
  Cube q1{1, 0}, q2{2, 2};
  const double area = oracle::volume(g.axis1, q1) * oracle::volume(g.axis2, q2);
  CHECK(h1_norm(haar_tensor(g, q1, 0, q2, 0), one) == doctest::Approx(std::sqrt(area)));
  std::mt19937_64 rng(29);
  GridFunction phi = random_function(g, rng);
  Weight w = cascade(g, 2);
  for (auto [h, s] : {std::pair{H1Scope::Biparameter, SquareScope::Biparameter},
                      std::pair{H1Scope::Parameter1, SquareScope::Parameter1},
                      std::pair{H1Scope::Parameter2, SquareScope::Parameter2}}) {
    GridFunction sq = square_function(phi, s);
    CHECK(h1_norm(phi, w, h) == doctest::Approx(sq.times(w.values()).inner(GridFunction(g, 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("duality ratios stay bounded") {
  DyadicGrid g(1, 1, 3, 3);
  Weight one(GridFunction(g, 1.0));
  GridFunction b = haar_tensor(g, {1, 0}, 0, {1, 0}, 0);
  GridFunction phi = haar_tensor(g, {1, 1}, 0, {1, 1}, 0);
  CHECK(duality_ratio(b, phi, one, DualityScope::Product).ratio == 0.0);
  auto self = duality_ratio(b, b, one, DualityScope::Product);
  CHECK(self.pairing == doctest::Approx(1.0));
  CHECK(self.b_norm == doctest::Approx(2.0));
  CHECK(self.h1 == doctest::Approx(0.5));
  CHECK(self.ratio == doctest::Approx(1.0));
  CHECK_THROWS(duality_ratio(GridFunction(g, 1.0), phi, one, DualityScope::Little1));

  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    GridFunction bb = random_fully_cancellative(g, rng);
    GridFunction ph = random_fully_cancellative(g, rng);
    Weight w = cascade(g, 100 + trial);
    for (auto sc : {DualityScope::Product, DualityScope::Little1, DualityScope::Little2})
      worst = std::max(worst, duality_ratio(bb, ph, w, sc).ratio);
  }
  CHECK(worst > 0.0);
  CHECK(worst < 10.0);
}
