#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "paraproduct_oracle.hpp"

#include "biparam/random.hpp"

using namespace biparam;

namespace {
std::vector<ParaproductKind> all_kinds() {
  std::vector<ParaproductKind> v(kProductKinds.begin(), kProductKinds.end());
  v.insert(v.end(), kLittleKinds.begin(), kLittleKinds.end());
  v.push_back(ParaproductKind::PiF);
  return v;
}
}  // namespace

TEST_CASE("tags round trip and adjoint table") {
  for (auto k : all_kinds()) {
    CHECK(paraproduct_from_tag(tag(k)) == k);
    CHECK(adjoint(adjoint(k)) == k);
  }
  CHECK(adjoint(ParaproductKind::Pi) == ParaproductKind::PiStar);
  CHECK(adjoint(ParaproductKind::Pi01) == ParaproductKind::Pi10);
  CHECK(adjoint(ParaproductKind::Gamma01) == ParaproductKind::Gamma01Star);
  CHECK(adjoint(ParaproductKind::Gamma10) == ParaproductKind::Gamma10Star);
  CHECK(adjoint(ParaproductKind::pi01) == ParaproductKind::pi01Star);
  CHECK(adjoint(ParaproductKind::pi10) == ParaproductKind::pi10Star);
  CHECK(adjoint(ParaproductKind::Gamma) == ParaproductKind::Gamma);
  CHECK(adjoint(ParaproductKind::gamma01) == ParaproductKind::gamma01);
  CHECK(adjoint(ParaproductKind::gamma10) == ParaproductKind::gamma10);
  CHECK(is_little_bmo_kind(ParaproductKind::pi10Star));
  CHECK_FALSE(is_little_bmo_kind(ParaproductKind::Gamma01));
  CHECK_THROWS_AS(paraproduct_from_tag("Pi11"), StructuralError);
}

TEST_CASE("every kind matches its displayed sum") {
  Rng rng(1);
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 2), DyadicGrid(1, 2, 2, 2)}) {
    GridFunction b = random_function(g, rng), f = random_function(g, rng);
    Symbol s(b);
    for (auto k : all_kinds()) {
      INFO(tag(k) << " on " << g.describe());
      CHECK(relative_residual(apply_paraproduct(k, s, f), oracle::paraproduct(k, b, f)) <= 1e-12);
    }
  }
}

TEST_CASE("adjoint pairs under the unweighted pairing") {
  Rng rng(2);
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 2, 2, 2), DyadicGrid(2, 1, 2, 3)}) {
    Symbol s(random_function(g, rng));
    GridFunction f = random_function(g, rng), h = random_function(g, rng);
    for (auto k : all_kinds()) {
      double lhs = apply_paraproduct(k, s, f).inner(h);
      double rhs = f.inner(apply_paraproduct(adjoint(k), s, h));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("trivial symbols and single tensors") {
  DyadicGrid g(1, 1, 3, 3);
  Rng rng(3);
  GridFunction f = random_function(g, rng);
  Symbol c(project_fully_cancellative(GridFunction(g, 5.0)));
  for (auto k : all_kinds())
    if (k != ParaproductKind::PiF) CHECK(apply_paraproduct(k, c, f).max_abs() <= 1e-12);
  Cube q1{1, 1}, q2{2, 1};
  GridFunction h = haar_tensor(g, q1, 0, q2, 0);
  GridFunction expect = GridFunction::from(g, [&](std::size_t i, std::size_t j) {
    return oracle::indicator(g.axis1, q1, i) * oracle::indicator(g.axis2, q2, j) / (0.5 * 0.25);
  });
  CHECK(relative_residual(apply_paraproduct(ParaproductKind::PiStar, Symbol(h), h), expect) <= 1e-12);
  // mixed Gamma kinds vanish at n=(1,1)
  for (auto k : {ParaproductKind::Gamma, ParaproductKind::Gamma01, ParaproductKind::Gamma10Star, ParaproductKind::gamma01})
    CHECK(apply_paraproduct(k, Symbol(random_function(g, rng)), f).max_abs() == 0.0);
}

TEST_CASE("one-parameter decomposition") {
  Rng rng(4);
  for (AxisGrid a : {AxisGrid{1, 3}, AxisGrid{2, 3}}) {
    auto mean_free = [&] {
      auto c = haar_forward(random_axis_function(a, rng));
      c[0] = 0.0;
      return haar_inverse(a, c);
    };
    AxisFunction b = mean_free(), f = mean_free();
    std::vector<double> sum(a.cells(), 0.0);
    for (auto k : {OneParamKind::Pi, OneParamKind::PiStar, OneParamKind::Gamma, OneParamKind::PiF}) {
      AxisFunction t = apply_paraproduct(k, b, f);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += t[i];
    }
    for (std::size_t i = 0; i < sum.size(); ++i) CHECK(std::abs(sum[i] - b[i] * f[i]) <= 1e-12);
  }
}

TEST_CASE("sixteen-term product decomposition") {
  Rng rng(5);
  for (auto g : {DyadicGrid(1, 1, 3, 3), DyadicGrid(2, 1, 2, 3), DyadicGrid(1, 1, 4, 4), DyadicGrid(2, 1, 3, 2)})
    for (int t = 0; t < 5; ++t) {
      GridFunction b = random_fully_cancellative(g, rng), f = random_fully_cancellative(g, rng);
      auto d = product_decomposition(Symbol(b), f);
      CHECK(d.terms.size() == 16);
      CHECK(relative_residual(d.sum(), b.times(f)) <= 1e-12);
    }
  DyadicGrid g(1, 1, 3, 3);
  auto z = product_decomposition(Symbol(random_fully_cancellative(g, rng)), GridFunction(g));
  for (auto& [name, term] : z.terms) CHECK(term.max_abs() == 0.0);
  CHECK_THROWS_AS(product_decomposition(Symbol(GridFunction(g, 1.0)), GridFunction(g)), StructuralError);
}
