#include "biparam/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "biparam/bmo.hpp"
#include "biparam/maximal_square.hpp"
#include "biparam/random.hpp"
#include "biparam/shifts.hpp"

namespace biparam {

namespace {

constexpr const char* kVersion = "1.0.0";

using json = nlohmann::json;

// ---------------------------------------------------------------------------------------------
// Config parsing

WeightFamilyConfig default_cascade(std::uint64_t seed) {
  WeightFamilyConfig c;
  c.kind = WeightKind::Cascade;
  c.seed = seed;
  return c;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
      throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

WeightFamilyConfig weight_from_json(const json& j, WeightFamilyConfig c, const std::string& where) {
  reject_unknown(j, {"kind", "cascade_delta", "cascade_depth", "alpha1", "alpha2", "constant", "seed"}, where);
  if (j.contains("kind")) {
    try {
      c.kind = weight_kind_from_string(j.at("kind").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  read(j, "cascade_delta", c.cascade_delta);
  read(j, "cascade_depth", c.cascade_depth);
  read(j, "alpha1", c.alpha1);
  read(j, "alpha2", c.alpha2);
  read(j, "constant", c.constant);
  read(j, "seed", c.seed);
  return c;
}

json weight_to_json(const WeightFamilyConfig& c) {
  return {{"kind", to_string(c.kind)}, {"cascade_delta", c.cascade_delta}, {"cascade_depth", c.cascade_depth},
          {"alpha1", c.alpha1},        {"alpha2", c.alpha2},               {"constant", c.constant},
          {"seed", c.seed}};
}

NormMethod norm_method_from_string(const std::string& s) {
  for (auto m : {NormMethod::Auto, NormMethod::DenseSVD, NormMethod::PowerIteration, NormMethod::ProjectedAscent})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown norm method '" + s + "'");
}

int min_trials(const std::string& suite) { return suite == "identities" ? 1 : 3; }

std::vector<std::string> default_kinds(const std::string& suite) {
  if (suite == "paraproduct-bounds") {
    std::vector<std::string> v;
    for (auto k : kProductKinds) v.push_back(tag(k));
    for (auto k : kLittleKinds) v.push_back(tag(k));
    return v;
  }
  if (suite == "shift-one-weight" || suite == "upper-bound")
    return {"cancellative", "full-standard", "full-standard-adjoint", "full-mixed", "partial"};
  return {};
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"identities", "paraproduct-bounds", "square-sweeps", "duality", "jn-equivalence",
          "shift-one-weight", "upper-bound", "lower-bound", "journe-ensemble"};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, {"suite", "grid", "K_sweep", "p", "weights", "symbol", "complexity", "kinds", "ensemble", "trials",
                     "seed", "threads", "norm", "tolerances", "output", "config_hash"},
                 "config");
  ExperimentConfig c;
  c.mu = default_cascade(1);
  c.lambda = default_cascade(2);
  c.w = default_cascade(3);
  read(j, "suite", c.suite);
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end())
    throw ConfigError("unknown suite '" + c.suite + "'");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"n1", "n2", "K1", "K2"}, "grid");
    read(g, "n1", c.n1);
    read(g, "n2", c.n2);
    read(g, "K1", c.K1);
    read(g, "K2", c.K2);
  }
  read(j, "K_sweep", c.k_sweep);
  if (j.contains("p")) {
    if (j.at("p").is_array())
      read(j, "p", c.p);
    else {
      double one = 0.0;
      read(j, "p", one);
      c.p = {one};
    }
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    reject_unknown(w, {"mu", "lambda", "w", "randomize"}, "weights");
    if (w.contains("mu")) c.mu = weight_from_json(w.at("mu"), c.mu, "weights.mu");
    if (w.contains("lambda")) c.lambda = weight_from_json(w.at("lambda"), c.lambda, "weights.lambda");
    if (w.contains("w")) c.w = weight_from_json(w.at("w"), c.w, "weights.w");
    read(w, "randomize", c.randomize_weights);
  }
  if (j.contains("symbol")) {
    const auto& s = j.at("symbol");
    reject_unknown(s, {"family", "depth", "constant"}, "symbol");
    read(s, "family", c.symbol);
    read(s, "depth", c.symbol_depth);
    read(s, "constant", c.symbol_constant);
  }
  if (j.contains("complexity")) {
    const auto& s = j.at("complexity");
    reject_unknown(s, {"cap1", "cap2", "max_total"}, "complexity");
    read(s, "cap1", c.cap1);
    read(s, "cap2", c.cap2);
    read(s, "max_total", c.max_total);
  }
  read(j, "kinds", c.kinds);
  if (j.contains("ensemble")) {
    const auto& s = j.at("ensemble");
    reject_unknown(s, {"delta", "samples"}, "ensemble");
    read(s, "delta", c.ensemble_delta);
    read(s, "samples", c.ensemble_samples);
  }
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  if (j.contains("norm")) {
    const auto& s = j.at("norm");
    reject_unknown(s, {"method", "dense_limit", "restarts", "max_iterations", "ascent_tolerance", "krylov_tolerance",
                       "krylov_max_steps"},
                   "norm");
    if (s.contains("method")) c.norm.method = norm_method_from_string(s.at("method").get<std::string>());
    read(s, "dense_limit", c.norm.dense_limit);
    read(s, "restarts", c.norm.restarts);
    read(s, "max_iterations", c.norm.max_iterations);
    read(s, "ascent_tolerance", c.norm.ascent_tolerance);
    read(s, "krylov_tolerance", c.norm.krylov_tolerance);
    read(s, "krylov_max_steps", c.norm.krylov_max_steps);
  }
  if (j.contains("tolerances")) {
    const auto& s = j.at("tolerances");
    reject_unknown(s, {"identity", "drift", "uniformity", "ratio_cap", "max_weight_characteristic", "check_uniformity"},
                   "tolerances");
    read(s, "identity", c.identity_tolerance);
    read(s, "drift", c.drift_tolerance);
    read(s, "uniformity", c.uniformity_factor);
    read(s, "ratio_cap", c.ratio_cap);
    read(s, "max_weight_characteristic", c.max_weight_characteristic);
    read(s, "check_uniformity", c.check_uniformity);
  }
  if (j.contains("output")) {
    const auto& s = j.at("output");
    reject_unknown(s, {"dir", "prefix"}, "output");
    read(s, "dir", c.out_dir);
    read(s, "prefix", c.prefix);
  }
  if (c.kinds.empty()) c.kinds = default_kinds(c.suite);
  if (j.contains("config_hash")) {
    std::string h;
    read(j, "config_hash", h);
    if (h != c.hash()) throw ConfigError("config_hash " + h + " does not match the config (" + c.hash() + ")");
  }

  // validation
  if (c.trials < min_trials(c.suite))
    throw ConfigError("suite " + c.suite + " needs at least " + std::to_string(min_trials(c.suite)) + " trials");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  if (c.p.empty()) throw ConfigError("p list is empty");
  for (double p : c.p)
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must be finite and greater than 1");
  if (c.symbol != "keyed" && c.symbol != "random" && c.symbol != "constant")
    throw ConfigError("symbol family must be keyed, random or constant");
  if (c.symbol_depth < 1) throw ConfigError("symbol depth must be positive");
  if (c.cap1 < 0 || c.cap2 < 0 || c.max_total < 0) throw ConfigError("complexity caps must be non-negative");
  if (!(c.ensemble_delta > 0.0)) throw ConfigError("ensemble delta must be positive");
  if (c.ensemble_samples < 1) throw ConfigError("ensemble samples must be positive");
  for (int k : c.k_sweep)
    if (k < 1) throw ConfigError("K_sweep entries must be positive");
  std::vector<DyadicGrid> gs;
  try {
    gs = c.grids();
    for (const auto* w : {&c.mu, &c.lambda, &c.w}) make_weight(gs.front(), *w, c.p.front());
  } catch (const StructuralError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& g : gs) {
    if (c.suite == "lower-bound" && (g.axis1.n != 1 || g.axis2.n != 1))
      throw ConfigError("lower-bound needs n1 = n2 = 1");
    if ((c.suite == "journe-ensemble") && (c.cap1 > g.axis1.K - 1 || c.cap2 > g.axis2.K - 1))
      throw ConfigError("ensemble caps are not admissible on " + g.describe());
    if (g.cells() > (std::size_t{1} << 16)) throw ConfigError("grid " + g.describe() + " is too large");
  }
  for (const auto& k : c.kinds) {
    try {
      if (c.suite == "paraproduct-bounds") {
        if (paraproduct_from_tag(k) == ParaproductKind::PiF) throw ConfigError("PiF is not a bounded paraproduct kind");
      } else if (c.suite == "shift-one-weight" || c.suite == "upper-bound") {
        shift_kind_from_string(k);
      } else {
        throw ConfigError("suite " + c.suite + " takes no kinds");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["suite"] = suite;
  j["grid"] = {{"n1", n1}, {"n2", n2}, {"K1", K1}, {"K2", K2}};
  j["K_sweep"] = k_sweep;
  j["p"] = p;
  j["weights"] = {{"mu", weight_to_json(mu)},
                  {"lambda", weight_to_json(lambda)},
                  {"w", weight_to_json(w)},
                  {"randomize", randomize_weights}};
  j["symbol"] = {{"family", symbol}, {"depth", symbol_depth}, {"constant", symbol_constant}};
  j["complexity"] = {{"cap1", cap1}, {"cap2", cap2}, {"max_total", max_total}};
  j["kinds"] = kinds;
  j["ensemble"] = {{"delta", ensemble_delta}, {"samples", ensemble_samples}};
  j["trials"] = trials;
  j["seed"] = seed;
  j["threads"] = threads;
  j["norm"] = {{"method", to_string(norm.method)},
               {"dense_limit", norm.dense_limit},
               {"restarts", norm.restarts},
               {"max_iterations", norm.max_iterations},
               {"ascent_tolerance", norm.ascent_tolerance},
               {"krylov_tolerance", norm.krylov_tolerance},
               {"krylov_max_steps", norm.krylov_max_steps}};
  j["tolerances"] = {{"identity", identity_tolerance},
                     {"drift", drift_tolerance},
                     {"uniformity", uniformity_factor},
                     {"ratio_cap", ratio_cap},
                     {"max_weight_characteristic", max_weight_characteristic},
                     {"check_uniformity", check_uniformity}};
  j["output"] = {{"dir", out_dir}, {"prefix", prefix}};
  return j;
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("output");
  j.erase("threads");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

std::vector<DyadicGrid> ExperimentConfig::grids() const {
  std::vector<DyadicGrid> out;
  if (k_sweep.empty())
    out.emplace_back(n1, n2, K1, K2);
  else
    for (int k : k_sweep) out.emplace_back(n1, n2, k, k);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Report

bool ExperimentReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::string ExperimentReport::csv() const {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{:.17g},{},{},{},{},{},{},{},{:.17g}\n", config.suite, r.trial, r.op,
                       r.metric, r.i1, r.i2, r.j1, r.j2, r.i1 + r.i2 + r.j1 + r.j2, r.p, r.weight_id, r.n1, r.n2, r.K1,
                       r.K2, r.seed, config_hash, r.value);
  return out;
}

json ExperimentReport::summary() const {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.op, r.metric}].push_back(r.value);
  json stats = json::array();
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    stats.push_back({{"operator", key.first}, {"metric", key.second}, {"count", n}, {"min", v.front()},
                     {"max", v.back()}, {"median", median}});
  }
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  json echo = config.to_json();
  echo["config_hash"] = config_hash;
  return {{"suite", config.suite}, {"version", kVersion},   {"config_hash", config_hash},
          {"config", echo}, {"rows", rows.size()}, {"runtime_seconds", runtime_seconds},
          {"passed", passed()},         {"checks", cs},         {"statistics", stats}};
}

std::filesystem::path write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::string stem = r.config.prefix.empty() ? r.config.suite : r.config.prefix;
  const auto csv_path = dir / (stem + ".csv");
  const auto json_path = dir / (stem + ".json");
  {
    std::ofstream f(csv_path, std::ios::binary);
    f << r.csv();
    if (!f) throw std::runtime_error("cannot write " + csv_path.string());
  }
  {
    std::ofstream f(json_path, std::ios::binary);
    f << r.summary().dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + json_path.string());
  }
  return csv_path;
}

// ---------------------------------------------------------------------------------------------
// Suites

namespace {

// Rows produced by one task, tagged with the grid and trial.
struct Sink {
  DyadicGrid g;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<CsvRow> rows;

  void add(const std::string& op, const std::string& metric, double value, double p = 2.0,
           const std::string& weight_id = "none", const ShiftComplexity& c = {}) {
    CsvRow r;
    r.trial = trial;
    r.op = op;
    r.metric = metric;
    r.i1 = c.i1;
    r.i2 = c.i2;
    r.j1 = c.j1;
    r.j2 = c.j2;
    r.p = p;
    r.weight_id = weight_id;
    r.n1 = g.axis1.n;
    r.n2 = g.axis2.n;
    r.K1 = g.axis1.K;
    r.K2 = g.axis2.K;
    r.seed = seed;
    r.value = value;
    rows.push_back(std::move(r));
  }
};

using Task = std::function<Sink()>;

std::vector<CsvRow> run_tasks(const std::vector<Task>& tasks, int threads) {
  std::vector<Sink> out(tasks.size());
  std::vector<std::exception_ptr> err(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        out[k] = tasks[k]();
      } catch (...) {
        err[k] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  std::vector<CsvRow> rows;
  for (auto& s : out) rows.insert(rows.end(), s.rows.begin(), s.rows.end());
  return rows;
}

enum Stream : std::uint64_t { kSymbol = 1, kMu, kLambda, kShift, kInput, kOther, kPick, kSymbolA };

struct Ctx {
  const ExperimentConfig& cfg;
  std::uint64_t trial_seed(int t) const { return derive_seed(cfg.seed, static_cast<std::uint64_t>(t)); }
  std::uint64_t stream(int t, Stream s) const { return derive_seed(trial_seed(t), s); }

  GridFunction symbol(const DyadicGrid& g, int t) const {
    if (cfg.symbol == "constant") return GridFunction(g, cfg.symbol_constant);
    if (cfg.symbol == "random") {
      Rng rng(stream(t, kSymbol));
      return random_fully_cancellative(g, rng);
    }
    return keyed_cancellative(g, stream(t, kSymbol), std::min(cfg.symbol_depth, g.axis1.K),
                              std::min(cfg.symbol_depth, g.axis2.K));
  }
  Weight weight(const DyadicGrid& g, const WeightFamilyConfig& base, int t, Stream s, double p) const {
    WeightFamilyConfig c = base;
    if (cfg.randomize_weights && c.kind == WeightKind::Cascade) c.seed = stream(t, s);
    return make_weight(g, c, p);
  }
  BloomTriple triple(const DyadicGrid& g, int t, double p) const {
    return {weight(g, cfg.mu, t, kMu, p), weight(g, cfg.lambda, t, kLambda, p), p};
  }
  NormOptions norm(std::uint64_t seed) const {
    NormOptions o = cfg.norm;
    o.threads = 1;
    o.seed = seed;
    return o;
  }
};

std::string pair_id(const BloomTriple& t) { return t.mu.id() + "|" + t.lambda.id(); }

/// Complexities with max_t <= cap_t (and <= K_t - 1 on every grid) and total <= max_total.
std::vector<ShiftComplexity> complexities(const ExperimentConfig& cfg, int cap1, int cap2) {
  int k1 = 1 << 30, k2 = 1 << 30;
  for (const auto& g : cfg.grids()) {
    k1 = std::min(k1, g.axis1.K - 1);
    k2 = std::min(k2, g.axis2.K - 1);
  }
  cap1 = std::min(cap1, k1);
  cap2 = std::min(cap2, k2);
  std::vector<ShiftComplexity> out;
  for (int i1 = 0; i1 <= cap1; ++i1)
    for (int j1 = 0; j1 <= cap1; ++j1)
      for (int i2 = 0; i2 <= cap2; ++i2)
        for (int j2 = 0; j2 <= cap2; ++j2)
          if (i1 + i2 + j1 + j2 <= cfg.max_total) out.push_back({i1, i2, j1, j2});
  return out;
}

struct ShiftOption {
  ShiftKind kind;
  ShiftComplexity c;
  Orientation o;
  std::string name() const {
    std::string s = to_string(kind);
    if (kind == ShiftKind::FullMixed || kind == ShiftKind::Partial) s += "-" + to_string(o);
    return s;
  }
};

std::vector<ShiftOption> shift_options(const ExperimentConfig& cfg) {
  std::vector<ShiftOption> out;
  for (const auto& ks : cfg.kinds) {
    const ShiftKind k = shift_kind_from_string(ks);
    for (const auto& c : complexities(cfg, cfg.cap1, cfg.cap2))
      for (auto o : {Orientation::P01, Orientation::P10}) {
        const bool oriented = k == ShiftKind::FullMixed || k == ShiftKind::Partial;
        if (!oriented && o == Orientation::P10) continue;
        if (ensemble_pattern_allowed(k, c, o)) out.push_back({k, c, o});
      }
  }
  if (out.empty()) throw ConfigError("no admissible shift for the configured kinds and caps");
  return out;
}

// --- checks

void check_max(ExperimentReport& r, const std::string& name, const std::string& op, const std::string& metric,
               double threshold) {
  double m = 0.0;
  bool any = false, finite = true;
  for (const auto& row : r.rows)
    if ((op.empty() || row.op == op) && row.metric == metric) {
      any = true;
      if (!std::isfinite(row.value)) finite = false;
      m = std::max(m, row.value);
    }
  r.checks.push_back({name, finite ? m : INFINITY, threshold, any && finite && m <= threshold});
}

void check_finite(ExperimentReport& r) {
  std::size_t bad = 0;
  for (const auto& row : r.rows)
    if (!std::isfinite(row.value)) ++bad;
  r.checks.push_back({"all_values_finite", static_cast<double>(bad), 0.0, bad == 0 && !r.rows.empty()});
}

/// For each group key: max of metric per K, drift = max_K / min_K - 1.
void check_drift(ExperimentReport& r, const std::string& metric,
                 const std::function<std::string(const CsvRow&)>& group) {
  if (r.config.grids().size() < 2) return;
  std::map<std::string, std::map<int, double>> peak;
  for (const auto& row : r.rows)
    if (row.metric == metric) {
      auto& m = peak[group(row)];
      const int key = row.K1 * 1000 + row.K2;
      m[key] = std::max(m.count(key) ? m[key] : 0.0, row.value);
    }
  for (const auto& [g, m] : peak) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& [k, v] : m) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double drift = lo > 0.0 ? hi / lo - 1.0 : (hi == 0.0 ? 0.0 : INFINITY);
    r.checks.push_back({"drift[" + metric + (g.empty() ? "" : ":" + g) + "]", drift, r.config.drift_tolerance,
                        drift <= r.config.drift_tolerance});
  }
}

std::string p_key(const CsvRow& r) { return fmt::format("p={:g}", r.p); }

// --- suites

void suite_identities(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const auto cs = complexities(cfg, 1 << 20, 1 << 20);
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        Rng rng(ctx.stream(t, kInput));
        const GridFunction f = random_function(g, rng);
        const HaarSpectrum fs = haar_forward(f);
        s.add("haar", "residual", relative_residual(haar_inverse(fs), f));
        const double e = f.inner(f);
        s.add("parseval", "residual", std::abs(fs.energy() - e) / std::max(e, 1e-300));
        const GridFunction b = random_fully_cancellative(g, rng), h = random_fully_cancellative(g, rng);
        s.add("product_decomposition", "residual", relative_residual(product_decomposition(Symbol(b), h).sum(), b.times(h)));
        std::uint64_t k = 0;
        for (const auto& c : cs) {
          const auto sh = CancellativeShift::random(g, c, derive_seed(ctx.stream(t, kShift), k++));
          s.add("remainder_cancellative", "residual", remainder_cancellative(b, sh, h).residual, 2.0, "none", c);
        }
        const auto a = ProductBmoSymbol::random(g, ctx.stream(t, kSymbolA));
        s.add("remainder_full_standard", "residual", remainder_full_standard(b, a, h).residual);
        s.add("remainder_full_mixed-01", "residual", remainder_full_mixed(b, a, Orientation::P01, h).residual);
        s.add("remainder_full_mixed-10", "residual", remainder_full_mixed(b, a, Orientation::P10, h).residual);
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  for (const char* op : {"haar", "parseval", "product_decomposition", "remainder_cancellative", "remainder_full_standard",
                         "remainder_full_mixed-01", "remainder_full_mixed-10"})
    check_max(rep, std::string("max_residual[") + op + "]", op, "residual", cfg.identity_tolerance);
}

void suite_paraproduct_bounds(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        const GridFunction b = ctx.symbol(g, t);
        for (double p : cfg.p) {
          const BloomTriple tr = ctx.triple(g, t, p);
          for (const auto& k : cfg.kinds) {
            const auto r = paraproduct_norm_ratio(paraproduct_from_tag(k), b, tr, ctx.norm(ctx.stream(t, kOther)));
            s.add(k, "ratio", r.ratio, p, pair_id(tr));
            s.add(k, "norm", r.norm, p, pair_id(tr));
            s.add(k, "b_norm", r.b_norm, p, pair_id(tr));
          }
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
  check_drift(rep, "ratio", [](const CsvRow& r) { return r.op + "," + p_key(r); });
}

void suite_square_sweeps(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const auto cs = complexities(cfg, cfg.cap1, cfg.cap2);
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        Rng rng(ctx.stream(t, kInput));
        const GridFunction f = random_function(g, rng);
        const GridFunction sf = square_function(f, SquareScope::Biparameter);
        const GridFunction mt = martingale_transform(f, MartingaleMask::random(g, ctx.stream(t, kOther)));
        s.add("martingale_invariance", "residual", relative_residual(square_function(mt, SquareScope::Biparameter), sf));
        const GridFunction mf = maximal_dyadic(f, MaxScope::Strong);
        double viol = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
          if (mf[i] < std::abs(f[i]) * (1 - 1e-12)) viol += 1.0;
        s.add("M_S", "pointwise_violations", viol);
        for (double p : cfg.p) {
          const Weight w = ctx.weight(g, cfg.mu, t, kMu, p);
          const double fn = weighted_lp_norm(f, w, p);
          s.add("S_D", "ratio", weighted_lp_norm(sf, w, p) / fn, p, w.id());
          s.add("S_D1", "ratio", weighted_lp_norm(square_function(f, SquareScope::Parameter1), w, p) / fn, p, w.id());
          s.add("S_D2", "ratio", weighted_lp_norm(square_function(f, SquareScope::Parameter2), w, p) / fn, p, w.id());
          s.add("M_S", "ratio", weighted_lp_norm(mf, w, p) / fn, p, w.id());
          s.add("SM", "ratio", weighted_lp_norm(mixed_square_maximal(f, MixedOrder::SM), w, p) / fn, p, w.id());
          s.add("MS", "ratio", weighted_lp_norm(mixed_square_maximal(f, MixedOrder::MS), w, p) / fn, p, w.id());
          for (const auto& c : cs)
            s.add("S_shift", "ratio", weighted_lp_norm(shifted_square_function(f, c), w, p) / fn, p, w.id(), c);
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  check_max(rep, "martingale_invariance", "martingale_invariance", "residual", cfg.identity_tolerance);
  check_max(rep, "maximal_dominates_pointwise", "M_S", "pointwise_violations", 0.0);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
}

void suite_duality(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        const GridFunction b = ctx.symbol(g, t);
        Rng rng(ctx.stream(t, kInput));
        const GridFunction phi = random_fully_cancellative(g, rng);
        for (double p : cfg.p) {
          const Weight w = ctx.weight(g, cfg.mu, t, kMu, p);
          const std::pair<DualityScope, const char*> scopes[] = {
              {DualityScope::Product, "duality_product"}, {DualityScope::Little1, "duality_little1"},
              {DualityScope::Little2, "duality_little2"}};
          for (const auto& [scope, name] : scopes) s.add(name, "ratio", duality_ratio(b, phi, w, scope).ratio, p, w.id());
          // averaged weights keep the characteristic, and every characteristic is at least 1
          const double apw = ap_characteristic(w, p);
          double above = 0.0, low = apw < 1.0 - 1e-12 ? 1.0 : 0.0;
          for (int axis : {1, 2}) {
            const AxisGrid& a = g.axis(axis);
            for (int k = 0; k <= a.K; ++k)
              for (std::size_t q = 0; q < a.cubes_at(k); ++q) {
                const double am = ap_characteristic(averaged_weight(w, axis, {k, q}), p);
                if (am > apw + 1e-9) above += 1.0;
                if (am < 1.0 - 1e-12) low += 1.0;
              }
          }
          s.add("weight", "A_p", apw, p, w.id());
          s.add("weight", "averaged_characteristic_violations", above, p, w.id());
          s.add("weight", "A_p_below_one", low, p, w.id());
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  check_max(rep, "averaged_characteristic_violations", "weight", "averaged_characteristic_violations", 0.0);
  check_max(rep, "A_p_at_least_one", "weight", "A_p_below_one", 0.0);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
}

void suite_jn(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        const GridFunction b = ctx.symbol(g, t);
        for (double p : cfg.p) {
          const BloomTriple tr = ctx.triple(g, t, p);
          const Weight nu = tr.nu();
          const auto v = john_nirenberg_variants(b, tr);
          const double little_mu = bmo_little_norm(b, tr.mu);
          s.add("bloom", "bmo_nu", v.bmo_nu, p, pair_id(tr));
          s.add("bloom_mu_lambda_p", "ratio", v.mu_lambda_p / v.bmo_nu, p, pair_id(tr));
          s.add("bloom_dual_form", "ratio", v.dual_form / v.bmo_nu, p, pair_id(tr));
          s.add("one_weight_jn", "ratio", bmo_one_weight_jn(b, tr.mu, p) / little_mu, p, tr.mu.id());
          s.add("slicewise", "ratio", bmo_slicewise_norm(b, nu) / v.bmo_nu, p, pair_id(tr));
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  double lo = INFINITY;
  for (const auto& r : rep.rows)
    if (r.metric == "ratio") lo = std::min(lo, r.value);
  rep.checks.push_back({"ratios_positive", lo, 0.0, lo > 0.0});
  if (cfg.ratio_cap > 0.0) {
    check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
    rep.checks.push_back({"inverse_ratio_cap", 1.0 / lo, cfg.ratio_cap, 1.0 / lo <= cfg.ratio_cap});
  }
}

void suite_shift_one_weight(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const auto options = shift_options(cfg);
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids()) {
    for (double p : cfg.p)
      tasks.push_back([&, g, p]() {
        Sink s{g, -1, cfg.w.seed, {}};
        const Weight w = make_weight(g, cfg.w, p);
        s.add("weight", "A_p", ap_characteristic(w, p), p, w.id());
        return s;
      });
    for (std::size_t o = 0; o < options.size(); ++o)
      for (int t = 0; t < cfg.trials; ++t)
        tasks.push_back([&, g, o, t]() {
          const ShiftOption& op = options[o];
          const std::uint64_t seed = derive_seed(ctx.stream(t, kShift), o);
          Sink s{g, t, seed, {}};
          ShiftBuildOptions b;
          b.symbol_depth = cfg.symbol_depth;
          const auto d = make_shift(g, op.kind, op.c, op.o, seed, b);
          for (double p : cfg.p) {
            const Weight w = make_weight(g, cfg.w, p);
            s.add(op.name(), "ratio", shift_one_weight_ratio(d, w, p, ctx.norm(seed)), p, w.id(), op.c);
          }
          return s;
        });
  }
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  if (cfg.max_weight_characteristic > 0.0)
    check_max(rep, "weight_characteristic", "weight", "A_p", cfg.max_weight_characteristic);
  // uniformity in the complexity, per grid, kind and p
  std::map<std::string, std::pair<double, double>> peaks;  // key -> (baseline, max)
  for (const auto& r : rep.rows) {
    if (r.metric != "ratio") continue;
    const std::string key = fmt::format("{}:K={},{}:{}", r.op, r.K1, r.K2, p_key(r));
    auto& pk = peaks[key];
    if (r.i1 + r.i2 + r.j1 + r.j2 == 0) pk.first = std::max(pk.first, r.value);
    pk.second = std::max(pk.second, r.value);
  }
  for (const auto& [key, pk] : peaks) {
    if (pk.first <= 0.0) continue;  // kinds without a complexity-zero member
    const double u = pk.second / pk.first;
    rep.checks.push_back({"uniformity[" + key + "]", u, cfg.uniformity_factor, u <= cfg.uniformity_factor});
  }
  check_drift(rep, "ratio", [](const CsvRow& r) { return r.op + "," + p_key(r); });
}

void suite_upper_bound(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const auto options = shift_options(cfg);
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        Rng pick(ctx.stream(t, kPick));
        const ShiftOption& op = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(pick)];
        ShiftBuildOptions bo;
        bo.symbol_depth = cfg.symbol_depth;
        const auto d = make_shift(g, op.kind, op.c, op.o, ctx.stream(t, kShift), bo);
        const GridFunction b = ctx.symbol(g, t);
        for (double p : cfg.p) {
          const BloomTriple tr = ctx.triple(g, t, p);
          const auto r = upper_bound_ratio(b, d.op, tr, polynomial_factor(op.c), ctx.norm(ctx.stream(t, kOther)));
          s.add(op.name(), "ratio", r.ratio, p, pair_id(tr), op.c);
          s.add(op.name(), "norm", r.norm, p, pair_id(tr), op.c);
          s.add(op.name(), "b_norm", r.b_norm, p, pair_id(tr), op.c);
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  if (cfg.symbol == "constant") check_max(rep, "constant_symbol_gives_zero", "", "ratio", 0.0);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
  check_drift(rep, "ratio", p_key);
  if (cfg.check_uniformity) {
    std::map<std::string, std::pair<double, double>> peaks;
    for (const auto& r : rep.rows)
      if (r.metric == "ratio") {
        auto& pk = peaks[p_key(r)];
        (r.i1 + r.i2 + r.j1 + r.j2 == 0 ? pk.first : pk.second) = std::max(
            r.i1 + r.i2 + r.j1 + r.j2 == 0 ? pk.first : pk.second, r.value);
      }
    for (const auto& [key, pk] : peaks) {
      const double u = pk.first > 0.0 ? pk.second / pk.first : INFINITY;
      rep.checks.push_back({"uniformity[" + key + "]", u, cfg.uniformity_factor, u <= cfg.uniformity_factor});
    }
  }
}

void suite_lower_bound(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        const GridFunction b = ctx.symbol(g, t);
        for (double p : cfg.p) {
          const BloomTriple tr = ctx.triple(g, t, p);
          const auto r = lower_bound_ratio(b, tr, ctx.norm(ctx.stream(t, kOther)));
          s.add("H1H2", "ratio", r.ratio, p, pair_id(tr));
          s.add("H1H2", "norm", r.norm, p, pair_id(tr));
          s.add("H1H2", "b_norm", r.b_norm, p, pair_id(tr));
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
  check_drift(rep, "ratio", p_key);
}

void suite_journe(ExperimentReport& rep, const Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<Task> tasks;
  for (const auto& g : cfg.grids())
    for (int t = 0; t < cfg.trials; ++t)
      tasks.push_back([&, g, t]() {
        Sink s{g, t, ctx.trial_seed(t), {}};
        EnsembleConfig ec;
        ec.cap1 = cfg.cap1;
        ec.cap2 = cfg.cap2;
        ec.delta = cfg.ensemble_delta;
        ec.samples = cfg.ensemble_samples;
        ec.build.symbol_depth = cfg.symbol_depth;
        ec.seed = ctx.stream(t, kShift);
        const auto shifts = sample_shift_ensemble(g, ec);
        const auto ens = ensemble_operator(shifts);
        const GridFunction b = ctx.symbol(g, t);
        const NormOptions no = ctx.norm(ctx.stream(t, kOther));
        for (double p : cfg.p) {
          const BloomTriple tr = ctx.triple(g, t, p);
          double mass = 0.0, single = 0.0;
          for (const auto& w : shifts) {
            mass += w.weight;
            single = std::max(single, shift_one_weight_ratio(w.shift, tr.mu, p, no));
          }
          const double total = operator_norm(*ens, tr.mu, tr.mu, p, no).value;
          s.add("ensemble", "norm", total, p, tr.mu.id());
          s.add("ensemble", "triangle_bound", mass * single, p, tr.mu.id());
          if (p == 2.0)  // exact norms; for other p both sides are lower bounds and only recorded
            s.add("ensemble", "triangle_violation", total > mass * single * (1 + 1e-9) ? 1.0 : 0.0, p, tr.mu.id());
          const auto r = upper_bound_ratio(b, ens, tr, 1.0, no);
          s.add("ensemble_commutator", "ratio", r.ratio, p, pair_id(tr));
        }
        return s;
      });
  rep.rows = run_tasks(tasks, cfg.threads);
  check_finite(rep);
  if (std::find(cfg.p.begin(), cfg.p.end(), 2.0) != cfg.p.end())
    check_max(rep, "triangle_inequality", "ensemble", "triangle_violation", 0.0);
  if (cfg.ratio_cap > 0.0) check_max(rep, "ratio_cap", "", "ratio", cfg.ratio_cap);
  check_drift(rep, "ratio", p_key);
}

}  // namespace

ExperimentReport run_suite(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  const Ctx ctx{rep.config};
  const std::string& s = cfg.suite;
  if (s == "identities")
    suite_identities(rep, ctx);
  else if (s == "paraproduct-bounds")
    suite_paraproduct_bounds(rep, ctx);
  else if (s == "square-sweeps")
    suite_square_sweeps(rep, ctx);
  else if (s == "duality")
    suite_duality(rep, ctx);
  else if (s == "jn-equivalence")
    suite_jn(rep, ctx);
  else if (s == "shift-one-weight")
    suite_shift_one_weight(rep, ctx);
  else if (s == "upper-bound")
    suite_upper_bound(rep, ctx);
  else if (s == "lower-bound")
    suite_lower_bound(rep, ctx);
  else if (s == "journe-ensemble")
    suite_journe(rep, ctx);
  else
    throw ConfigError("unknown suite '" + s + "'");
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Plot data

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string emit_plot_data(const std::string& report_csv, const std::string& axes,
                           const std::vector<std::string>& filters) {
  std::istringstream in(report_csv);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("report is empty");
  const auto cols = split(header, ',');
  auto column = [&](const std::string& name) {
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (name.empty() || it == cols.end()) throw ConfigError("unknown axis '" + name + "'");
    return static_cast<std::size_t>(it - cols.begin());
  };
  const auto names = split(axes, ',');
  if (names.size() < 2 || names.size() > 3) throw ConfigError("axes must be x,y or x,y,series");
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
    throw ConfigError("duplicate axis names in '" + axes + "'");
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(column(n));
  std::vector<std::pair<std::size_t, std::string>> flt;
  for (const auto& f : filters) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw ConfigError("filter must be column=value: '" + f + "'");
    flt.emplace_back(column(f.substr(0, eq)), f.substr(eq + 1));
  }
  std::string out = "x,y,series\n";
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = split(line, ',');
    if (v.size() != cols.size()) throw ConfigError("malformed report row: " + line);
    if (std::any_of(flt.begin(), flt.end(), [&](const auto& f) { return v[f.first] != f.second; })) continue;
    out += v[idx[0]] + "," + v[idx[1]] + "," + (idx.size() == 3 ? v[idx[2]] : std::string("all")) + "\n";
  }
  return out;
}

}  // namespace biparam
