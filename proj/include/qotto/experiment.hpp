// Configuration-driven experiments: one TOML file describes one run, and
// running it yields CSV tables and, for the cavity kinds, SVG figures.
#pragma once

#include "qotto/cavity.hpp"
#include "qotto/result_table.hpp"
#include "qotto/stochastic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qotto {

enum class ExperimentKind { thermal, montecarlo, daemon, cavity, region, sweep };

std::optional<ExperimentKind> parse_kind(std::string_view name);
std::string_view kind_name(ExperimentKind kind);

/// Invalid configuration. what() reads "source:line: field: message", with
/// the line left out when there is none.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& source, int line, const std::string& field,
              const std::string& message);

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  int line_;
  std::string field_;
};

struct SweepAxis {
  std::string name; // gaps.delta1, gaps.delta2, bath1.temperature, bath2.temperature
  double min = 0.0;
  double max = 0.0;
  std::uint64_t steps = 0;

  /// min + (max - min) i / (steps - 1); the last value is exactly max.
  double value(std::uint64_t i) const;
};

/// Parameters are kept as read. Physical validity (delta1 > delta2 > 0,
/// positive temperatures, probabilities in [0, 1]) is checked by the
/// modules when the experiment runs.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::thermal;
  std::string source = "<config>";
  std::optional<RngSeed> seed;

  double delta1 = 0.0;
  double delta2 = 0.0;
  std::optional<double> temperature1;
  std::optional<double> temperature2;
  // alternative to the baths for montecarlo / daemon
  std::optional<double> p_excite;
  std::optional<double> p_deexcite_complement;

  std::uint64_t n_cycles = 1'000'000;
  std::uint64_t max_run = 4;

  std::uint64_t n_attempts = 100'000;
  std::optional<double> erase_temperature;
  std::uint64_t measurement_cap = kDefaultMeasurementCap;

  double coupling = 1.0;
  double trunc_eps = kDefaultTruncEps;
  double p0 = 0.0;
  double t_max = 50.0;
  std::uint64_t samples = 501;
  std::uint64_t grid = 512;
  double refine_tol = 1e-6;

  std::vector<SweepAxis> axes;
  std::vector<std::string> observables;

  std::filesystem::path out_dir = ".";
  std::string stem;
};

/// Parses and validates a configuration for `kind`. Unknown keys, sections
/// the kind does not use, wrong types and missing required values throw
/// ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentKind kind,
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentKind kind);

struct ExperimentResult {
  ResultTable table;              // the main table, also in files[0]
  std::vector<OutputFile> files;  // everything to write, CSV first
};

/// Runs the experiment. Throws ConfigError for settings that can only be
/// checked once overrides are applied (a missing seed), PhysicsError for
/// unsatisfiable physics. Output is a pure function of the config.
ExperimentResult run_config(const ExperimentConfig& config,
                            unsigned workers = 0);

/// Sweep names accepted in [sweep] observables.
const std::vector<std::string>& sweep_observables();

/// Cartesian grid over the configured axes, outer axis major. Columns are
/// delta1, delta2, temperature1, temperature2 followed by the observables.
ResultTable sweep(const ExperimentConfig& config, unsigned workers = 0);

} // namespace qotto
