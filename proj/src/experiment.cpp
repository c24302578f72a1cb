#include "qotto/experiment.hpp"

#include "qotto/figure.hpp"
#include "qotto/parallel.hpp"

#include <cmath>
#include <limits>

namespace qotto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GapSchedule gaps_of(const ExperimentConfig& c) {
  return GapSchedule(c.delta1, c.delta2);
}

BathSpec bath1_of(const ExperimentConfig& c) { return BathSpec(*c.temperature1); }
BathSpec bath2_of(const ExperimentConfig& c) { return BathSpec(*c.temperature2); }

CavityParams hot_of(const ExperimentConfig& c) {
  return CavityParams(c.delta1, *c.temperature1, c.coupling, c.trunc_eps);
}
CavityParams cold_of(const ExperimentConfig& c) {
  return CavityParams(c.delta2, *c.temperature2, c.coupling, c.trunc_eps);
}

CycleParams cycle_params_of(const ExperimentConfig& c) {
  const GapSchedule gaps = gaps_of(c);
  if (c.p_excite)
    return CycleParams{gaps, Occupation(*c.p_excite),
                       Occupation(*c.p_deexcite_complement)};
  return CycleParams::thermal(gaps, bath1_of(c), bath2_of(c));
}

RngSeed require_seed(const ExperimentConfig& c) {
  if (!c.seed)
    throw ConfigError(c.source, 0, "seed",
                      "required for the " + std::string(kind_name(c.kind)) +
                          " experiment (set it in the file or pass --seed)");
  return *c.seed;
}

double carnot_or_nan(BathSpec b1, BathSpec b2) {
  return b1.temperature() > b2.temperature() ? carnot_efficiency(b1, b2) : kNaN;
}

/// (observed - expected) / sd, with the sd = 0 case kept finite when the
/// observation matches.
double z_score(double observed, double expected, double sd) {
  if (sd > 0.0)
    return (observed - expected) / sd;
  if (observed == expected)
    return 0.0;
  return observed > expected ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
}

std::string csv_name(const ExperimentConfig& c, const char* suffix = "") {
  return c.stem + suffix + ".csv";
}

ExperimentResult single_table(const ExperimentConfig& c, ResultTable table) {
  std::vector<OutputFile> files{{csv_name(c), table.to_csv()}};
  return {std::move(table), std::move(files)};
}

ExperimentResult run_thermal(const ExperimentConfig& c) {
  const GapSchedule gaps = gaps_of(c);
  const BathSpec b1 = bath1_of(c), b2 = bath2_of(c);
  const Occupation p1 = gibbs_upper(gaps.delta1(), b1);
  const Occupation p2 = gibbs_upper(gaps.delta2(), b2);

  ResultTable t({"delta1", "delta2", "temperature1", "temperature2", "p1", "p2",
                 "work", "efficiency", "carnot_efficiency", "condition",
                 "threshold_temperature", "heat_from_bath1", "heat_to_bath2"});
  t.add_row({gaps.delta1(), gaps.delta2(), b1.temperature(), b2.temperature(),
             p1.p_upper(), p2.p_upper(), net_extracted_work(p1, p2, gaps),
             otto_efficiency(gaps), carnot_or_nan(b1, b2),
             extraction_condition(b1, b2, gaps), threshold_temperature(b2, gaps),
             stroke_heat(gaps.delta1(), p2, p1),
             -stroke_heat(gaps.delta2(), p1, p2)});
  return single_table(c, std::move(t));
}

ExperimentResult run_montecarlo(const ExperimentConfig& c, unsigned workers) {
  const RngSeed seed = require_seed(c);
  const CycleParams params = cycle_params_of(c);
  const EnsembleStats s = run_ensemble(seed, c.n_cycles, params, workers);
  const double p1 = params.p_excite, p2 = params.p_deexcite_complement;
  const double q = params.work_producing_probability();
  const double n = static_cast<double>(c.n_cycles);
  const double analytic = params.expected_work();

  ResultTable summary(
      {"seed", "n_cycles", "delta1", "delta2", "p1", "p2", "analytic_work",
       "mean_work", "stderr_work", "work_z_score", "violation_probability",
       "violation_frequency", "violation_z_score", "strict_violation_frequency",
       "mean_heat1", "mean_heat2", "n_productive", "n_wasteful"});
  summary.add_row(
      {seed.value, c.n_cycles, c.delta1, c.delta2, p1, p2, analytic,
       s.mean_work, s.stderr_work, z_score(s.mean_work, analytic, s.stderr_work),
       q, s.violation_frequency,
       z_score(static_cast<double>(s.n_productive), n * q,
               std::sqrt(n * q * (1.0 - q))),
       s.strict_violation_frequency, s.mean_heat1, s.mean_heat2,
       s.n_productive, s.n_wasteful});

  ResultTable runs({"n_c", "positions", "windows", "window_frequency",
                    "product_law", "expected_windows", "sd_windows", "z_score"});
  for (std::uint64_t n_c = 1; n_c <= c.max_run && n_c <= c.n_cycles; ++n_c) {
    const std::uint64_t positions = c.n_cycles - n_c + 1;
    const std::uint64_t windows = s.violation_windows(n_c);
    const double law = violation_run_probability(p1, p2, n_c);
    const double expected = law * static_cast<double>(positions);
    const double sd = std::sqrt(violation_window_variance(q, n_c, c.n_cycles));
    runs.add_row({n_c, positions, windows, s.violation_window_frequency(n_c),
                  law, expected, sd,
                  z_score(static_cast<double>(windows), expected, sd)});
  }

  std::vector<OutputFile> files{{csv_name(c), summary.to_csv()},
                                {csv_name(c, "_runs"), runs.to_csv()}};
  return {std::move(summary), std::move(files)};
}

ExperimentResult run_daemon_experiment(const ExperimentConfig& c,
                                       unsigned workers) {
  const RngSeed seed = require_seed(c);
  const CycleParams params = cycle_params_of(c);
  const BathSpec erase(c.erase_temperature ? *c.erase_temperature
                                           : *c.temperature2);
  const DaemonLedger d =
      run_daemon(seed, c.n_attempts, params, erase, workers, c.measurement_cap);

  const double done = static_cast<double>(d.completed_cycles);
  const double expected_bits = expected_daemon_bits(params);
  const double bits_sd =
      done > 0 ? std::sqrt(daemon_bits_variance(params) / done) : kNaN;
  const auto per_cycle = [&](double total) {
    return done > 0 ? total / done : kNaN;
  };

  ResultTable t({"seed", "n_attempts", "completed_cycles", "delta1", "delta2",
                 "p1", "p2", "measurement_bits", "bits_per_cycle",
                 "expected_bits_per_cycle", "bits_z_score", "gross_work",
                 "gross_work_per_cycle", "erase_temperature", "erasure_heat",
                 "net_work", "net_work_per_cycle"});
  t.add_row({seed.value, d.attempts, d.completed_cycles, c.delta1, c.delta2,
             params.p_excite.p_upper(), params.p_deexcite_complement.p_upper(),
             d.measurement_bits, d.bits_per_completed_cycle(), expected_bits,
             done > 0 ? z_score(d.bits_per_completed_cycle(), expected_bits, bits_sd)
                      : kNaN,
             d.gross_work, per_cycle(d.gross_work), d.erase_temperature,
             d.erasure_heat, d.net_work, per_cycle(d.net_work)});
  return single_table(c, std::move(t));
}

ExperimentResult run_cavity(const ExperimentConfig& c, unsigned workers) {
  const GapSchedule gaps = gaps_of(c);
  const CavityParams hot = hot_of(c), cold = cold_of(c);
  const Occupation p0(c.p0);

  ResultTable trace({"t", "rabi_hot", "p_hot", "rabi_cold", "p_cold"});
  const SweepAxis time{"t", 0.0, c.t_max, c.samples};
  for (std::uint64_t i = 0; i < c.samples; ++i) {
    const double t = time.value(i);
    trace.add_row({t, rabi_sum(t, hot), evolve_occupation(p0, t, hot),
                   rabi_sum(t, cold), evolve_occupation(p0, t, cold)});
  }

  ContactTimeOptions opts;
  opts.t_max = c.t_max;
  opts.grid = c.grid;
  opts.refine_tol = c.refine_tol;
  opts.workers = workers;
  const ContactTimeResult best = optimize_contact_times(hot, cold, gaps, opts);
  const RegionGeometry geom = region_geometry(hot, cold, gaps);

  ResultTable optimum({"tau1", "tau2", "p_a", "p_b", "work", "coarse_work",
                       "bound", "gap_to_bound", "thermal_work", "n_bar1",
                       "n_bar2"});
  optimum.add_row({best.point.tau1, best.point.tau2, best.point.p_a,
                   best.point.p_b, best.work, best.coarse_work, best.bound,
                   best.gap_to_bound, geom.thermal_work, geom.hot.n_bar,
                   geom.cold.n_bar});

  std::vector<OutputFile> files{
      {csv_name(c), trace.to_csv()},
      {csv_name(c, "_optimum"), optimum.to_csv()},
      {c.stem + ".svg",
       render_region_svg(geom, Point{best.point.p_a, best.point.p_b})}};
  return {std::move(trace), std::move(files)};
}

ExperimentResult run_region(const ExperimentConfig& c) {
  const GapSchedule gaps = gaps_of(c);
  const RegionGeometry g = region_geometry(hot_of(c), cold_of(c), gaps);

  ResultTable t({"n_bar1", "n_bar2", "ratio1", "ratio2", "gibbs1", "gibbs2",
                 "has_overlap", "overlap_area", "max_work", "thermal_work",
                 "corner_p_a", "corner_p_b"});
  t.add_row({g.hot.n_bar, g.cold.n_bar, g.hot.ratio, g.cold.ratio,
             g.hot.gibbs_point, g.cold.gibbs_point, g.has_overlap,
             g.overlap_area, g.max_work, g.thermal_work,
             g.has_overlap ? g.corner.first : kNaN,
             g.has_overlap ? g.corner.second : kNaN});

  ResultTable polys({"polygon", "vertex", "x", "y"});
  auto add = [&](const char* name, const Polygon& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i)
      polys.add_row({std::string(name), static_cast<std::uint64_t>(i),
                     poly[i].first, poly[i].second});
  };
  add("hot", g.hot_polygon);
  add("cold", g.cold_polygon);
  add("reflected_cold", g.reflected_cold_polygon);
  add("overlap", g.overlap);

  std::vector<OutputFile> files{{csv_name(c), t.to_csv()},
                                {csv_name(c, "_polygons"), polys.to_csv()},
                                {c.stem + ".svg", render_region_svg(g)}};
  return {std::move(t), std::move(files)};
}

Cell observable(const std::string& name, const ExperimentConfig& c) {
  const GapSchedule gaps = gaps_of(c);
  const BathSpec b1 = bath1_of(c), b2 = bath2_of(c);
  if (name == "thermal_work")
    return thermal_baseline_work(b1, b2, gaps);
  if (name == "efficiency")
    return otto_efficiency(gaps);
  if (name == "carnot_efficiency")
    return carnot_or_nan(b1, b2);
  if (name == "condition")
    return extraction_condition(b1, b2, gaps);
  if (name == "p1")
    return gibbs_upper(gaps.delta1(), b1).p_upper();
  if (name == "p2")
    return gibbs_upper(gaps.delta2(), b2).p_upper();
  if (name == "threshold_temperature")
    return threshold_temperature(b2, gaps);
  if (name == "max_work_bound")
    return max_cycle_work_bound(hot_of(c), cold_of(c), gaps);
  if (name == "n_bar1")
    return mean_photon(hot_of(c));
  if (name == "n_bar2")
    return mean_photon(cold_of(c));
  throw std::logic_error("unhandled observable " + name);
}

void set_parameter(ExperimentConfig& c, const std::string& name, double v) {
  if (name == "gaps.delta1")
    c.delta1 = v;
  else if (name == "gaps.delta2")
    c.delta2 = v;
  else if (name == "bath1.temperature")
    c.temperature1 = v;
  else if (name == "bath2.temperature")
    c.temperature2 = v;
  else
    throw std::logic_error("unhandled sweep parameter " + name);
}

} // namespace

const std::vector<std::string>& sweep_observables() {
  static const std::vector<std::string> names{
      "thermal_work", "efficiency", "carnot_efficiency", "condition",
      "p1",           "p2",         "threshold_temperature",
      "max_work_bound", "n_bar1",   "n_bar2"};
  return names;
}

ResultTable sweep(const ExperimentConfig& config, unsigned workers) {
  if (config.axes.empty() || config.axes.size() > 2)
    throw ConfigError(config.source, 0, "sweep.axis", "a sweep takes 1 or 2 axes");
  if (config.observables.empty())
    throw ConfigError(config.source, 0, "sweep.observables", "nothing to compute");

  const SweepAxis& outer = config.axes.front();
  const std::uint64_t inner_steps =
      config.axes.size() == 2 ? config.axes[1].steps : 1;
  const std::uint64_t n_rows = outer.steps * inner_steps;

  std::vector<std::string> columns{"delta1", "delta2", "temperature1",
                                   "temperature2"};
  columns.insert(columns.end(), config.observables.begin(),
                 config.observables.end());
  const std::size_t width = columns.size();

  // every row lands in its own slot; the first PhysicsError wins
  std::vector<std::vector<Cell>> rows(n_rows);
  parallel_for(n_rows, workers, [&](std::size_t r) {
    ExperimentConfig point = config;
    set_parameter(point, outer.name, outer.value(r / inner_steps));
    if (config.axes.size() == 2)
      set_parameter(point, config.axes[1].name,
                    config.axes[1].value(r % inner_steps));
    std::vector<Cell> row{point.delta1, point.delta2, *point.temperature1,
                          *point.temperature2};
    row.reserve(width);
    for (const auto& name : config.observables)
      row.emplace_back(observable(name, point));
    rows[r] = std::move(row);
  });

  ResultTable table(columns);
  for (auto& row : rows)
    table.add_row(std::move(row));
  return table;
}

ExperimentResult run_config(const ExperimentConfig& config, unsigned workers) {
  switch (config.kind) {
  case ExperimentKind::thermal:
    return run_thermal(config);
  case ExperimentKind::montecarlo:
    return run_montecarlo(config, workers);
  case ExperimentKind::daemon:
    return run_daemon_experiment(config, workers);
  case ExperimentKind::cavity:
    return run_cavity(config, workers);
  case ExperimentKind::region:
    return run_region(config);
  case ExperimentKind::sweep:
    return single_table(config, sweep(config, workers));
  }
  throw std::logic_error("unknown experiment kind");
}

} // namespace qotto
