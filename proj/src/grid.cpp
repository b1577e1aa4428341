#include "biparam/grid.hpp"

#include <string>

namespace biparam {

void validate_axis(const AxisGrid& a) {
  if (a.n < 1 || a.n > 2) throw StructuralError("axis dimension must be 1 or 2, got " + std::to_string(a.n));
  if (a.K < 1) throw StructuralError("axis depth must be at least 1");
  if (a.K * a.n > 16) throw StructuralError("axis has too many cells (K*n > 16)");
}

DyadicGrid::DyadicGrid(int n1, int n2, int K1, int K2) : axis1{n1, K1}, axis2{n2, K2} {
  validate_axis(axis1);
  validate_axis(axis2);
  if (cells() > (std::size_t{1} << 22)) throw StructuralError("grid too large");
}

std::string DyadicGrid::describe() const {
  return "n=(" + std::to_string(axis1.n) + "," + std::to_string(axis2.n) + ") K=(" + std::to_string(axis1.K) +
         "," + std::to_string(axis2.K) + ")";
}

BasisEntry decode_basis(const AxisGrid& a, std::size_t index) {
  if (index == 0 || index >= a.cells()) throw StructuralError("basis index is not a cancellative entry");
  int k = 0;
  while (a.cubes_at(k + 1) <= index) ++k;
  std::size_t rel = index - a.cubes_at(k);
  auto s = static_cast<std::size_t>(a.signature_count());
  return {k, rel / s, static_cast<int>(rel % s)};
}

void validate_cube(const AxisGrid& a, const Cube& q) {
  if (q.level < 0 || q.level > a.K || q.pos >= a.cubes_at(q.level)) throw StructuralError("cube is not in the grid");
}

}  // namespace biparam
