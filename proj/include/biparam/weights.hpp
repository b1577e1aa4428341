#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "biparam/haar.hpp"

namespace biparam {

enum class WeightKind { Cascade, Power, Constant };

struct WeightFamilyConfig {
  WeightKind kind = WeightKind::Constant;
  double cascade_delta = 0.3;  // child/parent factor lies in [1/(1+d), 1+d]
  int cascade_depth = 3;       // refinement stops at this level in each parameter
  double alpha1 = 0.0;         // power exponents, one per parameter
  double alpha2 = 0.0;
  double constant = 1.0;
  std::uint64_t seed = 0;
};

std::string to_string(WeightKind k);
WeightKind weight_kind_from_string(const std::string& s);

/// Strictly positive grid function with cached rectangle averages.
/// Copies share the cache; every query is safe to call concurrently.
class Weight {
 public:
  explicit Weight(GridFunction values, std::string id = "custom");

  const GridFunction& values() const { return state_->values; }
  const DyadicGrid& grid() const { return state_->values.grid(); }
  const std::string& id() const { return state_->id; }

  /// Box x Box table of <w>_R.
  const Table2D& averages() const { return state_->avg; }
  double average(const Rectangle& r) const;
  double measure(const Rectangle& r) const;
  /// Box x Box table of <w^{1-p'}>_R, built on first request for each p.
  std::shared_ptr<const Table2D> conjugate_averages(double p) const;

 private:
  struct State {
    GridFunction values;
    std::string id;
    Table2D avg;
    mutable std::mutex mu;
    mutable std::map<double, std::shared_ptr<const Table2D>> conj;
  };
  std::shared_ptr<State> state_;
};

double dual_exponent(double p);
void require_exponent(double p);

Weight make_weight(const DyadicGrid& g, const WeightFamilyConfig& cfg, double p = 2.0);

enum class ApScope { Biparameter, Parameter1, Parameter2 };

/// Dyadic A_p characteristic. Parameter scopes take the sup over cubes of that
/// parameter, separately for every cell of the other parameter.
double ap_characteristic(const Weight& w, double p, ApScope scope = ApScope::Biparameter);
double ap_characteristic(const AxisFunction& w, double p);

Weight conjugate_weight(const Weight& w, double p);

struct BloomTriple {
  Weight mu;
  Weight lambda;
  double p = 2.0;

  /// nu = mu^{1/p} lambda^{-1/p}
  Weight nu() const;
};

/// m_Q w as a weight on the other parameter.
AxisFunction averaged_weight(const Weight& w, int t, const Cube& q);

struct ReverseHolderRow {
  double eps = 0.0;
  double constant = 0.0;
};

struct ReverseHolderReport {
  std::vector<ReverseHolderRow> rows;
  double delta_fit = 0.0;     // least-squares slope of log(w(E)/w(R)) against log(|E|/|R|)
  double constant_fit = 0.0;  // smallest C making the fitted power law an upper bound on samples
};

ReverseHolderReport reverse_holder_probe(const Weight& w, const std::vector<double>& eps_grid, std::uint64_t seed,
                                         int samples = 200);

double weighted_lp_norm(const GridFunction& f, const Weight& w, double p);
double lp_norm(const GridFunction& f, double p);

struct DualityGap {
  double norm = 0.0;          // ||f||_{L^p(w)}
  double best_pairing = 0.0;  // max |<f,g>| over tested g with ||g||_{L^{p'}(w')} = 1
  double gap = 0.0;
};

DualityGap duality_gap(const GridFunction& f, const Weight& w, double p, int trials, std::uint64_t seed);

}  // namespace biparam
