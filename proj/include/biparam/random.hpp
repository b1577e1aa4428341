#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "biparam/grid_function.hpp"

namespace biparam {

using Rng = std::mt19937_64;

/// Deterministic uniform value in [-1, 1) keyed by integers. Used where data must
/// agree across grid depths: the same key yields the same number at any K.
double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Mixes a base seed with a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

GridFunction random_function(const DyadicGrid& g, Rng& rng);
GridFunction random_fully_cancellative(const DyadicGrid& g, Rng& rng);
AxisFunction random_axis_function(const AxisGrid& a, Rng& rng);

/// Fully cancellative function whose Haar coefficients live on levels below
/// (depth1, depth2). Coefficients are keyed, so refining K leaves the function unchanged.
/// Coefficients at level (k1,k2) are scaled by 2^{-decay (k1 n1 + k2 n2)/2}.
GridFunction keyed_cancellative(const DyadicGrid& g, std::uint64_t seed, int depth1, int depth2, double decay = 1.0);

}  // namespace biparam
