#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace biparam {

/// Raised when inputs do not fit the grid they are used with.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One parameter of the product grid: the cube [0,1)^n cut into 2^{K n} cells.
///
/// Cubes at level k are stored in Morton order, so the children of cube q are
/// 2^n q + c where bit i of c selects the upper half along coordinate i.
struct AxisGrid {
  int n = 1;
  int K = 1;

  int child_count() const { return 1 << n; }
  int signature_count() const { return (1 << n) - 1; }
  int full_signature() const { return (1 << n) - 1; }

  std::size_t cubes_at(int k) const { return std::size_t{1} << (k * n); }
  std::size_t cells() const { return cubes_at(K); }
  double volume(int k) const { return std::ldexp(1.0, -k * n); }

  // Flat index of a cube among all cubes of levels 0..K.
  std::size_t cube_offset(int k) const {
    return ((std::size_t{1} << (k * n)) - 1) / ((std::size_t{1} << n) - 1);
  }
  std::size_t cube_count() const { return cube_offset(K + 1); }
  std::size_t cube_index(int k, std::size_t pos) const { return cube_offset(k) + pos; }

  // Haar basis index: 0 is the constant, level-k block starts at 2^{kn}.
  std::size_t basis_index(int k, std::size_t pos, int sig) const {
    return cubes_at(k) + pos * static_cast<std::size_t>(signature_count()) +
           static_cast<std::size_t>(sig);
  }

  std::size_t ancestor(std::size_t pos, int up) const { return pos >> (up * n); }
  std::size_t first_descendant(std::size_t pos, int down) const { return pos << (down * n); }

  bool operator==(const AxisGrid&) const = default;
};

struct BasisEntry {
  int level = 0;
  std::size_t pos = 0;
  int sig = 0;
};

/// Decodes a Haar basis index (must be >= 1).
BasisEntry decode_basis(const AxisGrid& a, std::size_t index);

/// Product grid on [0,1)^{n1} x [0,1)^{n2}.
struct DyadicGrid {
  AxisGrid axis1;
  AxisGrid axis2;

  DyadicGrid() = default;
  DyadicGrid(int n1, int n2, int K1, int K2);

  const AxisGrid& axis(int t) const { return t == 1 ? axis1 : axis2; }
  std::size_t cells() const { return axis1.cells() * axis2.cells(); }
  double cell_measure() const { return axis1.volume(axis1.K) * axis2.volume(axis2.K); }
  DyadicGrid transposed() const { return DyadicGrid(axis2.n, axis1.n, axis2.K, axis1.K); }
  std::string describe() const;

  bool operator==(const DyadicGrid&) const = default;
};

void validate_axis(const AxisGrid& a);

/// A dyadic cube of one parameter.
struct Cube {
  int level = 0;
  std::size_t pos = 0;
};

struct Rectangle {
  Cube q1;
  Cube q2;
};

void validate_cube(const AxisGrid& a, const Cube& q);

// Signature helpers. A signature is a bitmask over coordinates; bit i set
// means the non-cancellative factor 1_I/sqrt|I| in coordinate i.
inline int signature_sum(int eps, int delta, int n) { return ~(eps ^ delta) & ((1 << n) - 1); }

/// Sign of h^eps on child c of its cube, without the |Q|^{-1/2} factor.
inline double haar_sign(int eps, int child) {
  return (__builtin_popcount(static_cast<unsigned>(child & ~eps)) & 1) ? -1.0 : 1.0;
}

/// Which child of the level-k ancestor contains the cube at (level, pos).
inline int child_of_ancestor(const AxisGrid& a, std::size_t pos, int level, int k) {
  return static_cast<int>((pos >> ((level - k - 1) * a.n)) & static_cast<std::size_t>(a.child_count() - 1));
}

/// Value of h_{(k,anc)}^eps on a strict subcube at (level, pos).
inline double haar_value_on(const AxisGrid& a, int k, int eps, std::size_t pos, int level) {
  return haar_sign(eps, child_of_ancestor(a, pos, level, k)) / std::sqrt(a.volume(k));
}

}  // namespace biparam
