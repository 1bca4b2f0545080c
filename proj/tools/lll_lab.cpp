// lll_lab: run verification suites and experiments from a JSON config.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lll/app.hpp"
#include "lll/errors.hpp"
#include "lll/operators.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Lowest-Landau-level coupled system: verification and experiments"};
  std::string config_path, out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  cli.add_option("--config", config_path, "JSON config (default: the verify suite)");
  auto* out_opt = cli.add_option("--out", out_dir, "Output directory");
  cli.add_option("--threads", threads, "Kernel threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = cli.add_option("--seed", seed, "Seed for randomized suites");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : lll::app::kConfigError;
  }

  lll::app::json doc = lll::app::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << '\n';
      return lll::app::kConfigError;
    }
    try {
      doc = lll::app::json::parse(in);
    } catch (const lll::app::json::exception& e) {
      std::cerr << "malformed config: " << e.what() << '\n';
      return lll::app::kConfigError;
    }
  }
  if (!doc.is_object()) {
    std::cerr << "malformed config: top level must be an object\n";
    return lll::app::kConfigError;
  }
  if (*out_opt) doc["out"] = out_dir;
  if (*seed_opt) doc["seed"] = seed;

  lll::app::ExperimentConfig config;
  try {
    config = lll::app::parse_config(doc);
  } catch (const lll::Error& e) {
    std::cerr << e.what() << '\n';
    return lll::app::kConfigError;
  }
  lll::set_thread_count(threads);

  const auto start = std::chrono::steady_clock::now();
  const int code = lll::app::run(config, std::cout);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (code == 0 ? "all checks passed" : "some checks failed") << " in " << secs << " s\n";
  return code;
}
