#include "biparam/random.hpp"

#include <algorithm>
#include <cmath>

#include "biparam/haar.hpp"

namespace biparam {

namespace {
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix(seed);
  for (std::uint64_t k : keys) h = mix(h ^ mix(k));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return mix(mix(seed) ^ mix(stream + 1)); }

GridFunction random_function(const DyadicGrid& g, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

GridFunction random_fully_cancellative(const DyadicGrid& g, Rng& rng) {
  return project_fully_cancellative(random_function(g, rng));
}

AxisFunction random_axis_function(const AxisGrid& a, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AxisFunction f(a);
  for (auto& v : f.values) v = u(rng);
  return f;
}

GridFunction keyed_cancellative(const DyadicGrid& g, std::uint64_t seed, int depth1, int depth2, double decay) {
  HaarSpectrum s(g);
  const auto& a1 = g.axis1;
  const auto& a2 = g.axis2;
  for (int k1 = 0; k1 < std::min(depth1, a1.K); ++k1)
    for (std::size_t p1 = 0; p1 < a1.cubes_at(k1); ++p1)
      for (int e1 = 0; e1 < a1.signature_count(); ++e1)
        for (int k2 = 0; k2 < std::min(depth2, a2.K); ++k2)
          for (std::size_t p2 = 0; p2 < a2.cubes_at(k2); ++p2)
            for (int e2 = 0; e2 < a2.signature_count(); ++e2) {
              double scale = std::pow(2.0, -0.5 * decay * (k1 * a1.n + k2 * a2.n));
              s.cancellative({k1, p1}, e1, {k2, p2}, e2) =
                  scale * keyed_uniform(seed, {std::uint64_t(k1), p1, std::uint64_t(e1), std::uint64_t(k2), p2,
                                               std::uint64_t(e2)});
            }
  return haar_inverse(s);
}

}  // namespace biparam
