// Command-line runner for the experiment suites.
//
//   biparam run --config cfg.json [--seed N] [--out DIR] [--threads N]
//   biparam emit-plot --report out/x.csv --axes complexity,value[,series] [--filter col=value]... [--out plot.csv]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration or I/O.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "biparam/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw biparam::ConfigError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const std::string& config_path, const std::optional<std::uint64_t>& seed, std::string out,
        const std::optional<int>& threads) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw biparam::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  auto cfg = biparam::ExperimentConfig::from_json(j);
  if (seed) cfg.seed = *seed;
  if (threads) {
    if (*threads < 1) throw biparam::ConfigError("--threads must be at least 1");
    cfg.threads = *threads;
  }
  if (out.empty()) out = cfg.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("BIPARAM_OUT_DIR");
    out = env && *env ? env : "out";
  }

  const auto report = biparam::run_suite(cfg);
  const auto csv = biparam::write_report(report, out);
  for (const auto& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " threshold=" << c.threshold
              << "\n";
  std::cout << report.rows.size() << " rows, " << report.runtime_seconds << " s, hash " << report.config_hash << " -> "
            << csv.string() << "\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biparameter commutator experiment runner"};
  app.require_subcommand(1);

  std::string config, out, report, axes, plot_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> filters;

  auto* run_cmd = app.add_subcommand("run", "run one suite from a JSON config");
  run_cmd->add_option("--config", config, "config file")->required();
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--out", out, "output directory (default $BIPARAM_OUT_DIR, else ./out)");
  run_cmd->add_option("--threads", threads, "worker threads");

  auto* plot_cmd = app.add_subcommand("emit-plot", "long-format x,y,series CSV from a report");
  plot_cmd->add_option("--report", report, "report CSV")->required();
  plot_cmd->add_option("--axes", axes, "x,y or x,y,series column names")->required();
  plot_cmd->add_option("--filter", filters, "column=value, repeatable");
  plot_cmd->add_option("--out", plot_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(config, seed, out, threads);
    const std::string data = biparam::emit_plot_data(slurp(report), axes, filters);
    if (plot_out.empty()) {
      std::cout << data;
    } else {
      std::ofstream f(plot_out, std::ios::binary);
      f << data;
      if (!f) throw biparam::ConfigError("cannot write " + plot_out);
    }
    return 0;
  } catch (const biparam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
