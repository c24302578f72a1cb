// qotto <experiment-kind> --config <path> [--out-dir <path>] [--seed <u64>]
//
// Exit status: 0 success, 1 output or other runtime failure, 2 invalid
// command line or configuration, 3 unsatisfiable physics.
#include "qotto/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kPhysics = 3 };

// QOTTO_THREADS caps worker threads; unset or 0 means one per core.
unsigned workers_from_env() {
  const char* raw = std::getenv("QOTTO_THREADS");
  if (!raw || !*raw)
    return 0;
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(raw, &used);
    if (used != std::string(raw).size() || v > 4096)
      throw std::out_of_range("");
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw qotto::ConfigError("QOTTO_THREADS", 0, "",
                             std::string("expected a thread count, got '") +
                                 raw + "'");
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level quantum Otto engine experiments"};
  std::string kind_text;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  app.add_option("kind", kind_text,
                 "thermal | montecarlo | daemon | cavity | region | sweep")
      ->required();
  app.add_option("--config", config_path, "TOML experiment description")
      ->required();
  app.add_option("--out-dir", out_dir, "directory for the output files");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  const auto kind = qotto::parse_kind(kind_text);
  if (!kind) {
    std::cerr << "qotto: unknown experiment kind '" << kind_text << "'\n";
    return kConfig;
  }

  try {
    const unsigned workers = workers_from_env();
    qotto::ExperimentConfig config = qotto::load_config(config_path, *kind);
    if (*seed_opt)
      config.seed = qotto::RngSeed{seed};
    if (!out_dir.empty())
      config.out_dir = out_dir;

    const qotto::ExperimentResult result = qotto::run_config(config, workers);
    qotto::write_outputs(config.out_dir, result.files);
    for (const auto& file : result.files)
      std::cout << (config.out_dir / file.name).string() << '\n';
    return kOk;
  } catch (const qotto::ConfigError& e) {
    std::cerr << "qotto: " << e.what() << '\n';
    return kConfig;
  } catch (const qotto::PhysicsError& e) {
    std::cerr << "qotto: " << config_path << ": " << e.what() << '\n';
    return kPhysics;
  } catch (const qotto::OutputError& e) {
    std::cerr << "qotto: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "qotto: " << e.what() << '\n';
    return kRuntime;
  }
}
