#pragma once
// Direct transcription of the displayed paraproduct sums, evaluated with
// explicit Haar functions and cell-sum pairings.

#include "oracles.hpp"

#include "biparam/grid.hpp"
#include "biparam/paraproducts.hpp"

namespace oracle {

using biparam::ParaproductKind;

struct Pairings {
  const GridFunction& fn;
  double hh(const Cube& q1, int e1, const Cube& q2, int e2) const { return coef(fn, q1, e1, q2, e2); }
  // <fn, h_{Q1}^{e} (x) 1_{Q2}/|Q2|>
  double hb(const Cube& q1, int e1, const Cube& q2) const {
    const auto& g = fn.grid();
    return pair(fn, [&](std::size_t i) { return haar(g.axis1, q1, e1, i); },
                [&](std::size_t j) { return indicator(g.axis2, q2, j) / volume(g.axis2, q2); });
  }
  // <fn, 1_{Q1}/|Q1| (x) h_{Q2}^{e}>
  double bh(const Cube& q1, const Cube& q2, int e2) const {
    const auto& g = fn.grid();
    return pair(fn, [&](std::size_t i) { return indicator(g.axis1, q1, i) / volume(g.axis1, q1); },
                [&](std::size_t j) { return haar(g.axis2, q2, e2, j); });
  }
  double bb(const Cube& q1, const Cube& q2) const { return average(fn, q1, q2); }
};

inline void add_hh(GridFunction& out, double c, const Cube& q1, int e1, const Cube& q2, int e2) {
  const auto& g = out.grid();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += c * haar(g.axis1, q1, e1, i) * haar(g.axis2, q2, e2, j);
}
inline void add_bh(GridFunction& out, double c, const Cube& q1, const Cube& q2, int e2) {
  const auto& g = out.grid();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) += c * indicator(g.axis1, q1, i) / volume(g.axis1, q1) * haar(g.axis2, q2, e2, j);
}
inline void add_hb(GridFunction& out, double c, const Cube& q1, int e1, const Cube& q2) {
  const auto& g = out.grid();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) += c * haar(g.axis1, q1, e1, i) * indicator(g.axis2, q2, j) / volume(g.axis2, q2);
}
inline void add_bb(GridFunction& out, double c, const Cube& q1, const Cube& q2) {
  const auto& g = out.grid();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out.at(i, j) += c * indicator(g.axis1, q1, i) / volume(g.axis1, q1) * indicator(g.axis2, q2, j) / volume(g.axis2, q2);
}

inline int sigsum(int e, int d, int n) { return biparam::signature_sum(e, d, n); }

inline GridFunction paraproduct(ParaproductKind kind, const GridFunction& bfun, const GridFunction& ffun) {
  const auto& g = ffun.grid();
  const int n1 = g.axis1.n, n2 = g.axis2.n;
  const int S1 = g.axis1.signature_count(), S2 = g.axis2.signature_count();
  Pairings b{bfun}, f{ffun};
  GridFunction out(g);
  for (auto q1 : cubes(g.axis1, 0, g.axis1.K - 1))
    for (auto q2 : cubes(g.axis2, 0, g.axis2.K - 1)) {
      const double r1 = 1.0 / std::sqrt(volume(g.axis1, q1)), r2 = 1.0 / std::sqrt(volume(g.axis2, q2));
      for (int e1 = 0; e1 < S1; ++e1)
        for (int e2 = 0; e2 < S2; ++e2) {
          switch (kind) {
            case ParaproductKind::Pi: add_hh(out, b.hh(q1, e1, q2, e2) * f.bb(q1, q2), q1, e1, q2, e2); break;
            case ParaproductKind::PiStar: add_bb(out, b.hh(q1, e1, q2, e2) * f.hh(q1, e1, q2, e2), q1, q2); break;
            case ParaproductKind::Gamma:
              for (int d1 = 0; d1 < S1; ++d1)
                for (int d2 = 0; d2 < S2; ++d2)
                  if (d1 != e1 && d2 != e2)
                    add_hh(out, b.hh(q1, e1, q2, e2) * f.hh(q1, d1, q2, d2) * r1 * r2, q1, sigsum(e1, d1, n1), q2,
                           sigsum(e2, d2, n2));
              break;
            case ParaproductKind::Pi01: add_bh(out, b.hh(q1, e1, q2, e2) * f.hb(q1, e1, q2), q1, q2, e2); break;
            case ParaproductKind::Pi10: add_hb(out, b.hh(q1, e1, q2, e2) * f.bh(q1, q2, e2), q1, e1, q2); break;
            case ParaproductKind::Gamma01:
              for (int d1 = 0; d1 < S1; ++d1)
                if (d1 != e1) add_hh(out, b.hh(q1, e1, q2, e2) * f.hb(q1, d1, q2) * r1, q1, sigsum(e1, d1, n1), q2, e2);
              break;
            case ParaproductKind::Gamma01Star:
              for (int d1 = 0; d1 < S1; ++d1)
                if (d1 != e1) add_hb(out, b.hh(q1, e1, q2, e2) * f.hh(q1, d1, q2, e2) * r1, q1, sigsum(e1, d1, n1), q2);
              break;
            case ParaproductKind::Gamma10:
              for (int d2 = 0; d2 < S2; ++d2)
                if (d2 != e2) add_hh(out, b.hh(q1, e1, q2, e2) * f.bh(q1, q2, d2) * r2, q1, e1, q2, sigsum(e2, d2, n2));
              break;
            case ParaproductKind::Gamma10Star:
              for (int d2 = 0; d2 < S2; ++d2)
                if (d2 != e2) add_bh(out, b.hh(q1, e1, q2, e2) * f.hh(q1, e1, q2, d2) * r2, q1, q2, sigsum(e2, d2, n2));
              break;
            case ParaproductKind::pi01: add_hh(out, b.hb(q1, e1, q2) * f.bh(q1, q2, e2), q1, e1, q2, e2); break;
            case ParaproductKind::pi01Star: add_bh(out, b.hb(q1, e1, q2) * f.hh(q1, e1, q2, e2), q1, q2, e2); break;
            case ParaproductKind::pi10: add_hh(out, b.bh(q1, q2, e2) * f.hb(q1, e1, q2), q1, e1, q2, e2); break;
            case ParaproductKind::pi10Star: add_hb(out, b.bh(q1, q2, e2) * f.hh(q1, e1, q2, e2), q1, e1, q2); break;
            case ParaproductKind::gamma01:
              for (int d1 = 0; d1 < S1; ++d1)
                if (d1 != e1) add_hh(out, b.hb(q1, d1, q2) * f.hh(q1, e1, q2, e2) * r1, q1, sigsum(e1, d1, n1), q2, e2);
              break;
            case ParaproductKind::gamma10:
              for (int d2 = 0; d2 < S2; ++d2)
                if (d2 != e2) add_hh(out, b.bh(q1, q2, d2) * f.hh(q1, e1, q2, e2) * r2, q1, e1, q2, sigsum(e2, d2, n2));
              break;
            case ParaproductKind::PiF: add_hh(out, f.hh(q1, e1, q2, e2) * b.bb(q1, q2), q1, e1, q2, e2); break;
          }
        }
    }
  return out;
}

}  // namespace oracle
