#include "biparam/operator.hpp"

namespace biparam {

namespace {

class FunctionOperator final : public LinearOperator {
 public:
  FunctionOperator(std::string name, GridMap a, GridMap t) : name_(std::move(name)), a_(std::move(a)), t_(std::move(t)) {}
  GridFunction apply(const GridFunction& f) const override { return a_(f); }
  GridFunction apply_transpose(const GridFunction& g) const override { return t_(g); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  GridMap a_, t_;
};

}  // namespace

OperatorHandle make_operator(std::string name, GridMap apply, GridMap transpose) {
  return std::make_shared<FunctionOperator>(std::move(name), std::move(apply), std::move(transpose));
}

OperatorHandle transpose(const OperatorHandle& t) {
  return make_operator(
      t->name() + "^t", [t](const GridFunction& f) { return t->apply_transpose(f); },
      [t](const GridFunction& f) { return t->apply(f); });
}

OperatorHandle identity_operator() {
  auto id = [](const GridFunction& f) { return f; };
  return make_operator("identity", id, id);
}

OperatorHandle multiplication_operator(GridFunction m) {
  auto mul = [m](const GridFunction& f) { return f.times(m); };
  return make_operator("multiply", mul, mul);
}

OperatorHandle commutator_operator(GridFunction b, OperatorHandle t) {
  std::string name = "[b," + t->name() + "]";
  // [b,T]^t = T^t b - b T^t
  return make_operator(
      name, [b, t](const GridFunction& f) { return b.times(t->apply(f)) - t->apply(b.times(f)); },
      [b, t](const GridFunction& g) { return t->apply_transpose(b.times(g)) - b.times(t->apply_transpose(g)); });
}

OperatorHandle linear_combination(std::vector<std::pair<double, OperatorHandle>> terms) {
  if (terms.empty()) throw std::invalid_argument("linear combination needs at least one term");
  auto run = [](const std::vector<std::pair<double, OperatorHandle>>& ts, const GridFunction& f, bool tr) {
    GridFunction out;
    bool first = true;
    for (const auto& [c, t] : ts) {
      GridFunction v = tr ? t->apply_transpose(f) : t->apply(f);
      if (first) {
        out = c * std::move(v);
        first = false;
      } else {
        out.axpy(c, v);
      }
    }
    return out;
  };
  return make_operator(
      "combination", [terms, run](const GridFunction& f) { return run(terms, f, false); },
      [terms, run](const GridFunction& f) { return run(terms, f, true); });
}

}  // namespace biparam
