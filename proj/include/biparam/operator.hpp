#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "biparam/grid_function.hpp"

namespace biparam {

/// Linear map on grid functions with its transpose for the Lebesgue pairing,
/// so that <T f, g> = <f, T^t g>.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual GridFunction apply(const GridFunction& f) const = 0;
  virtual GridFunction apply_transpose(const GridFunction& g) const = 0;
  virtual std::string name() const = 0;
};

using OperatorHandle = std::shared_ptr<const LinearOperator>;
using GridMap = std::function<GridFunction(const GridFunction&)>;

OperatorHandle make_operator(std::string name, GridMap apply, GridMap transpose);
OperatorHandle transpose(const OperatorHandle& t);
OperatorHandle identity_operator();
OperatorHandle multiplication_operator(GridFunction m);
/// [b, T] f = b T f - T(b f).
OperatorHandle commutator_operator(GridFunction b, OperatorHandle t);
/// sum_k c_k T_k
OperatorHandle linear_combination(std::vector<std::pair<double, OperatorHandle>> terms);

}  // namespace biparam
