#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "biparam/commutators.hpp"
#include "biparam/weights.hpp"
#include "json.hpp"

namespace biparam {

/// Bad or inadmissible experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string suite;
  int n1 = 1, n2 = 1, K1 = 3, K2 = 3;
  std::vector<int> k_sweep;  // each entry k runs the suite at K1 = K2 = k
  std::vector<double> p{2.0};

  WeightFamilyConfig mu, lambda, w;
  bool randomize_weights = true;  // reseed mu and lambda per trial

  std::string symbol = "keyed";  // keyed | random | constant
  int symbol_depth = 3;
  double symbol_constant = 1.0;

  int cap1 = 1, cap2 = 1;  // max(i_t, j_t) <= cap_t
  int max_total = 3;       // i1 + i2 + j1 + j2 <= max_total
  std::vector<std::string> kinds;
  double ensemble_delta = 0.5;
  int ensemble_samples = 6;

  int trials = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  NormOptions norm;

  double identity_tolerance = 1e-10;
  double drift_tolerance = 0.25;
  double uniformity_factor = 3.0;
  double ratio_cap = 0.0;               // 0 disables the cap check
  double max_weight_characteristic = 0.0;  // 0 disables
  bool check_uniformity = false;

  std::string out_dir;
  std::string prefix;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON without output and thread settings.
  std::string hash() const;
  std::vector<DyadicGrid> grids() const;
};

std::vector<std::string> suite_names();

struct CsvRow {
  int trial = 0;
  std::string op;
  std::string metric;
  int i1 = 0, i2 = 0, j1 = 0, j2 = 0;
  double p = 2.0;
  std::string weight_id;
  int n1 = 1, n2 = 1, K1 = 0, K2 = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};

struct SuiteCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<CsvRow> rows;
  std::vector<SuiteCheck> checks;
  double runtime_seconds = 0.0;

  bool passed() const;
  std::string csv() const;
  nlohmann::json summary() const;
};

inline constexpr const char* kCsvHeader =
    "suite,trial,operator,metric,i1,i2,j1,j2,complexity,p,weight_id,n1,n2,K1,K2,seed,config_hash,value";

ExperimentReport run_suite(const ExperimentConfig& cfg);

/// Writes <prefix>.csv and <prefix>.json into dir; returns the CSV path.
std::filesystem::path write_report(const ExperimentReport& r, const std::filesystem::path& dir);

/// Long-format (x,y,series) rows from a report CSV. axes is "x,y" or "x,y,series"
/// naming report columns; filters are column=value pairs.
std::string emit_plot_data(const std::string& report_csv, const std::string& axes,
                           const std::vector<std::string>& filters = {});

}  // namespace biparam
