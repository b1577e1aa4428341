#pragma once

#include <algorithm>
#include <string>

#include "biparam/grid.hpp"

namespace biparam {

/// Shift complexity: P in (R)_i feeds Q in (R)_j, per parameter.
struct ShiftComplexity {
  int i1 = 0;
  int i2 = 0;
  int j1 = 0;
  int j2 = 0;

  int total() const { return i1 + i2 + j1 + j2; }
  int max1() const { return std::max(i1, j1); }
  int max2() const { return std::max(i2, j2); }
  std::string str() const;
  bool operator==(const ShiftComplexity&) const = default;
};

/// Throws unless every R level range used by a shift of this complexity is non-empty.
void require_admissible_shift(const DyadicGrid& g, const ShiftComplexity& c);

}  // namespace biparam
