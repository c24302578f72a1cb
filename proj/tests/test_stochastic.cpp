#include <catch2/catch_amalgamated.hpp>

#include "qotto/stochastic.hpp"

#include <cmath>
#include <numbers>

using namespace qotto;
using Catch::Approx;

namespace {

const GapSchedule kGaps(2.0, 1.0);

CycleParams probs(double p1, double p2, const GapSchedule& gaps = kGaps) {
  return CycleParams{gaps, Occupation(p1), Occupation(p2)};
}

bool same_stats(const EnsembleStats& a, const EnsembleStats& b) {
  return a.n_cycles == b.n_cycles && a.mean_work == b.mean_work &&
         a.stderr_work == b.stderr_work &&
         a.violation_frequency == b.violation_frequency &&
         a.strict_violation_frequency == b.strict_violation_frequency &&
         a.mean_heat1 == b.mean_heat1 && a.mean_heat2 == b.mean_heat2 &&
         a.n_productive == b.n_productive && a.n_wasteful == b.n_wasteful &&
         a.net_bath1_jumps == b.net_bath1_jumps && a.final_upper == b.final_upper &&
         a.run_lengths == b.run_lengths;
}

// Exact variance of the sliding-window count by enumerating every sequence.
double enumerated_window_variance(double q, unsigned n_c, unsigned n) {
  double mean = 0.0, second = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    for (unsigned i = 0; i < n; ++i)
      prob *= (mask >> i & 1u) ? q : 1.0 - q;
    unsigned count = 0;
    for (unsigned i = 0; i + n_c <= n; ++i) {
      bool all = true;
      for (unsigned k = 0; k < n_c; ++k)
        all = all && (mask >> (i + k) & 1u);
      count += all;
    }
    mean += prob * count;
    second += prob * count * count;
  }
  return second - mean * mean;
}

} // namespace

TEST_CASE("forced transitions turn one gap difference of heat into work",
          "[stochastic]") {
  CycleRng rng(1);
  const TrajectoryRecord rec = run_cycle(rng, probs(1.0, 0.0), false);
  CHECK(rec.after_bath1_upper);
  CHECK_FALSE(rec.after_bath2_upper);
  CHECK(rec.work_extracted == 1.0);
  CHECK(rec.heat_from_bath1 == 2.0);
  CHECK(rec.heat_to_bath2 == 1.0);
  CHECK(rec.violation);

  const TrajectoryRecord from_upper = run_cycle(rng, probs(1.0, 0.0), true);
  CHECK(from_upper.work_extracted == 1.0);
  CHECK(from_upper.heat_from_bath1 == 0.0);
  CHECK_FALSE(from_upper.violation);
  CHECK(from_upper.work_producing());
}

TEST_CASE("per-trajectory bookkeeping closes for every level history",
          "[stochastic][property]") {
  const GapSchedule gaps(3.5, 1.25);
  for (int bits = 0; bits < 8; ++bits) {
    const bool s = bits & 1, up1 = bits & 2, up2 = bits & 4;
    const TrajectoryRecord rec = make_trajectory(gaps, s, up1, up2);
    CHECK(rec.work_extracted == (int(up1) - int(up2)) * gaps.spread());
    CHECK(rec.heat_from_bath1 == gaps.delta1() * (int(up1) - int(s)));
    const double du = gaps.delta1() * (int(up2) - int(s));
    CHECK(rec.heat_from_bath1 - rec.heat_to_bath2 - rec.work_extracted == du);
    CHECK(rec.violation == (!s && up1 && !up2));
  }
}

TEST_CASE("ensemble mean work matches the analytic formula", "[stochastic]") {
  const CycleParams params =
      CycleParams::thermal(kGaps, BathSpec(6.952), BathSpec(1.4427));
  CHECK(params.expected_work() == Approx(2.0 / 21.0).margin(1e-4));

  const EnsembleStats stats = run_ensemble(RngSeed{2024}, 1'000'000, params);
  CHECK(stats.n_cycles == 1'000'000);
  CHECK(stats.stderr_work > 0.0);
  CHECK(std::abs(stats.mean_work - params.expected_work()) < 3.0 * stats.stderr_work);
  // heat balance in expectation: bath 1 supplies delta1 per net jump
  CHECK(stats.mean_heat2 == Approx(stats.mean_work * kGaps.delta2() / kGaps.spread()));
  CHECK(std::abs(stats.mean_heat1 - stats.mean_heat2 - stats.mean_work) <
        kGaps.delta1() * 2.0 / 1e6);
}

TEST_CASE("zero-work operating points average to zero", "[stochastic]") {
  const EnsembleStats equal = run_ensemble(RngSeed{5}, 200'000, probs(0.37, 0.37));
  CHECK(std::abs(equal.mean_work) < 3.0 * equal.stderr_work);

  const CycleParams threshold = CycleParams::thermal(kGaps, BathSpec(3.0), BathSpec(1.5));
  CHECK(threshold.expected_work() == 0.0);
  const EnsembleStats at = run_ensemble(RngSeed{6}, 500'000, threshold);
  CHECK(std::abs(at.mean_work) < 3.0 * at.stderr_work);
}

TEST_CASE("violation frequency and runs follow the product law", "[stochastic]") {
  // T1 < T2: every work-producing cycle breaks the Kelvin-Planck statement
  const CycleParams params = CycleParams::thermal(kGaps, BathSpec(1.0), BathSpec(2.0));
  const double q = params.work_producing_probability();
  const std::uint64_t n = 2'000'000;
  const EnsembleStats stats = run_ensemble(RngSeed{77}, n, params);

  const double sigma = std::sqrt(q * (1.0 - q) / n);
  CHECK(std::abs(stats.violation_frequency - q) < 3.0 * sigma);

  const double p2 = params.p_deexcite_complement.p_upper();
  const double strict = (1.0 - p2) * q;
  CHECK(std::abs(stats.strict_violation_frequency - strict) <
        3.0 * std::sqrt(strict * (1.0 - strict) / n) * 2.0);

  CHECK(stats.violation_windows(1) == stats.n_productive);
  for (std::uint64_t n_c = 2; n_c <= 4; ++n_c) {
    const double expected = violation_run_probability(
        params.p_excite.p_upper(), p2, n_c) * static_cast<double>(n - n_c + 1);
    const double sd = std::sqrt(violation_window_variance(q, n_c, n));
    INFO("n_c = " << n_c);
    CHECK(std::abs(static_cast<double>(stats.violation_windows(n_c)) - expected) <
          3.0 * sd);
  }
}

TEST_CASE("violation_run_probability", "[stochastic]") {
  CHECK(violation_run_probability(0.3, 0.4, 2) == Approx(0.0324).epsilon(1e-14));
  CHECK(violation_run_probability(0.3, 0.4, 5000) == 0.0);
  CHECK(violation_run_probability(1.0, 0.0, 17) == 1.0);
  CHECK_THROWS(violation_run_probability(0.3, 0.4, 0));
  CHECK_THROWS_AS(violation_run_probability(1.3, 0.4, 1), PhysicsError);
}

TEST_CASE("window-count variance matches exhaustive enumeration", "[stochastic]") {
  for (unsigned n_c : {1u, 2u, 3u, 4u}) {
    for (double q : {0.1, 0.3, 0.8}) {
      INFO("n_c = " << n_c << ", q = " << q);
      CHECK(violation_window_variance(q, n_c, 12) ==
            Approx(enumerated_window_variance(q, n_c, 12)).epsilon(1e-12));
    }
  }
  CHECK(violation_window_variance(0.3, 5, 3) == 0.0);
}

TEST_CASE("window counts derive from the maximal-run histogram", "[stochastic]") {
  EnsembleStats stats;
  stats.n_cycles = 20;
  stats.run_lengths = {0, 3, 1, 0, 1}; // three singles, one pair, one run of 4
  CHECK(stats.violation_windows(1) == 3 + 2 + 4);
  CHECK(stats.violation_windows(2) == 1 + 3);
  CHECK(stats.violation_windows(3) == 2);
  CHECK(stats.violation_windows(4) == 1);
  CHECK(stats.violation_windows(5) == 0);
  CHECK(stats.violation_window_frequency(2) == Approx(4.0 / 19.0));
}

TEST_CASE("ensemble output is identical for any worker count", "[stochastic]") {
  const CycleParams params = probs(0.42, 0.31);
  const std::uint64_t n = 3 * kEnsembleChunk * 64 + 12345; // several batches
  const EnsembleStats one = run_ensemble(RngSeed{99}, n, params, 1);
  const EnsembleStats two = run_ensemble(RngSeed{99}, n, params, 2);
  const EnsembleStats eight = run_ensemble(RngSeed{99}, n, params, 8);
  CHECK(same_stats(one, two));
  CHECK(same_stats(one, eight));

  const EnsembleStats other_seed = run_ensemble(RngSeed{100}, n, params, 8);
  CHECK_FALSE(same_stats(one, other_seed));
}

TEST_CASE("ensemble edge cases", "[stochastic]") {
  CHECK_THROWS_AS(run_ensemble(RngSeed{1}, 0, probs(0.5, 0.5)), std::invalid_argument);

  const EnsembleStats single = run_ensemble(RngSeed{1}, 1, probs(1.0, 0.0));
  CHECK(single.mean_work == 1.0);
  CHECK(single.stderr_work == 0.0);
  CHECK(single.strict_violation_frequency == 1.0);

  const EnsembleStats started_up = run_ensemble(RngSeed{1}, 1, probs(1.0, 0.0), 1, true);
  CHECK(started_up.strict_violation_frequency == 0.0);
  CHECK(started_up.mean_heat1 == 0.0);

  // forced always-productive engine: one run spanning everything
  const EnsembleStats forced = run_ensemble(RngSeed{3}, 1000, probs(1.0, 0.0));
  CHECK(forced.run_lengths.size() == 1001);
  CHECK(forced.run_lengths[1000] == 1);
  CHECK(forced.violation_windows(3) == 998);
}

TEST_CASE("geometric trial sampler", "[stochastic]") {
  CycleRng rng(12);
  CHECK(rng.trials_until_success(1.0, 10) == 1u);
  CHECK_FALSE(rng.trials_until_success(0.0, 10).has_value());
  CHECK_FALSE(rng.trials_until_success(0.5, 0).has_value());

  const double p = 0.2;
  const int n = 200'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += static_cast<double>(*rng.trials_until_success(p, kDefaultMeasurementCap));
  const double sd = std::sqrt((1.0 - p) / (p * p) / n);
  CHECK(std::abs(sum / n - 1.0 / p) < 4.0 * sd);

  int capped = 0;
  for (int i = 0; i < 10'000; ++i)
    capped += !rng.trials_until_success(0.5, 3).has_value();
  CHECK(std::abs(capped / 10'000.0 - 0.125) < 0.02);
}

TEST_CASE("daemon ledger identities and measurement counts", "[stochastic][daemon]") {
  const CycleParams params = probs(0.5, 0.5);
  const BathSpec erase(1.5);
  const DaemonLedger ledger = run_daemon(RngSeed{8}, 100'000, params, erase);

  CHECK(ledger.attempts == 100'000);
  CHECK(ledger.completed_cycles <= ledger.attempts);
  CHECK(ledger.completed_cycles == 100'000);
  CHECK(ledger.gross_work == static_cast<double>(ledger.completed_cycles) * kGaps.spread());
  CHECK(ledger.erasure_heat ==
        static_cast<double>(ledger.measurement_bits) * 1.5 * std::numbers::ln2);
  CHECK(ledger.net_work == ledger.gross_work - ledger.erasure_heat);
  CHECK(ledger.erase_temperature == 1.5);

  CHECK(expected_daemon_bits(params) == 4.0);
  const double sd = std::sqrt(daemon_bits_variance(params) / ledger.completed_cycles);
  CHECK(std::abs(ledger.bits_per_completed_cycle() - 4.0) < 3.0 * sd);
}

TEST_CASE("daemon abandons stages that never succeed", "[stochastic][daemon]") {
  const DaemonLedger stuck = run_daemon(RngSeed{1}, 50, probs(0.0, 0.5), BathSpec(1.0), 0, 10);
  CHECK(stuck.completed_cycles == 0);
  CHECK(stuck.measurement_bits == 500);
  CHECK(stuck.gross_work == 0.0);
  CHECK(stuck.net_work < 0.0);
  CHECK(std::isinf(stuck.bits_per_completed_cycle()));

  const DaemonLedger sure = run_daemon(RngSeed{1}, 50, probs(1.0, 0.0), BathSpec(1.0));
  CHECK(sure.completed_cycles == 50);
  CHECK(sure.measurement_bits == 100);

  CHECK_THROWS_AS(run_daemon(RngSeed{1}, 5, probs(0.5, 0.5), BathSpec(0.0)), PhysicsError);
}

TEST_CASE("daemon cannot beat Landauer when the hot bath is not hotter",
          "[stochastic][daemon]") {
  for (double t2 : {0.5, 1.0, 3.0}) {
    for (double ratio : {0.2, 0.6, 1.0}) {
      const BathSpec cold(t2), hot(t2 * ratio);
      const CycleParams params = CycleParams::thermal(kGaps, hot, cold);
      const DaemonLedger ledger = run_daemon(RngSeed{21}, 5000, params, cold);
      INFO("T2 = " << t2 << ", T1/T2 = " << ratio);
      CHECK(ledger.net_work <= 0.0);
    }
  }
}

TEST_CASE("daemon ledger is identical for any worker count", "[stochastic][daemon]") {
  const CycleParams params = probs(0.3, 0.6);
  const auto a = run_daemon(RngSeed{4}, 50'000, params, BathSpec(1.0), 1);
  const auto b = run_daemon(RngSeed{4}, 50'000, params, BathSpec(1.0), 8);
  CHECK(a.measurement_bits == b.measurement_bits);
  CHECK(a.completed_cycles == b.completed_cycles);
  CHECK(a.net_work == b.net_work);
}
