#pragma once

#include <optional>
#include <utility>

#include "biparam/complexity.hpp"
#include "biparam/grid_function.hpp"

namespace biparam {

enum class MaxScope { Parameter1, Parameter2, Strong };
enum class SquareScope { Biparameter, Parameter1, Parameter2 };
enum class MixedOrder { SM, MS };

GridFunction maximal_dyadic(const GridFunction& f, MaxScope scope);
AxisFunction maximal_dyadic(const AxisFunction& u);

/// Square functions. The biparameter one uses cancellative rectangle coefficients
/// only; the parameter-t versions use the partial Haar transform H_{Q_t} f.
GridFunction square_function(const GridFunction& f, SquareScope scope);
AxisFunction square_function(const AxisFunction& u);

/// Shifted square function. For each rectangle R and signature pair the absolute
/// coefficients over P in (R)_i are summed, squared, and spread over (R)_j.
GridFunction shifted_square_function(const GridFunction& f, const ShiftComplexity& c);
AxisFunction shifted_square_function(const AxisFunction& u, int i, int j);

/// [SM] f = (sum_{Q1} (M_{D2} H_{Q1} f)^2 1_{Q1}/|Q1|)^{1/2}; [MS] swaps the roles.
/// With a shift (i, j) the shifted variant on the square-function parameter is used.
GridFunction mixed_square_maximal(const GridFunction& f, MixedOrder order,
                                  std::optional<std::pair<int, int>> shift = std::nullopt);

}  // namespace biparam
