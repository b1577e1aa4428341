#pragma once
// Sums over dyadic descendants on cube-indexed tables. Private to the library.

#include <vector>

#include "biparam/grid.hpp"

namespace biparam::detail {

/// Adds child totals into parents along one axis of a flat cube-indexed table.
/// Rows index the first axis of the table and `stride` is its row length.
inline void subtree_sum_axis(const AxisGrid& a, std::vector<double>& t, std::size_t stride, std::size_t other,
                             bool axis_is_rows) {
  for (int k = a.K - 1; k >= 0; --k)
    for (std::size_t p = 0; p < a.cubes_at(k); ++p) {
      const std::size_t parent = a.cube_index(k, p);
      for (int c = 0; c < a.child_count(); ++c) {
        const std::size_t child = a.cube_index(k + 1, (p << a.n) + static_cast<std::size_t>(c));
        for (std::size_t o = 0; o < other; ++o) {
          if (axis_is_rows)
            t[parent * stride + o] += t[child * stride + o];
          else
            t[o * stride + parent] += t[o * stride + child];
        }
      }
    }
}

/// Sum over all dyadic sub-rectangles, for every rectangle (cube1 x cube2 layout).
inline std::vector<double> subrectangle_sums(const DyadicGrid& g, std::vector<double> c) {
  const std::size_t c1 = g.axis1.cube_count(), c2 = g.axis2.cube_count();
  subtree_sum_axis(g.axis2, c, c2, c1, false);
  subtree_sum_axis(g.axis1, c, c2, c2, true);
  return c;
}

}  // namespace biparam::detail
