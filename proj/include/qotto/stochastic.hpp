// Stochastic (single-shot) operation of the two-level Otto engine.
//
// Each bath contact fully thermalizes the system: the post-contact level is
// drawn independently of the pre-contact level. A cycle is
//   stage 1  contact with bath 1 at gap delta1     (heat only)
//   stage 2  adiabatic expansion delta1 -> delta2  (work only)
//   stage 3  contact with bath 2 at gap delta2     (heat only)
//   stage 4  adiabatic compression delta2 -> delta1 (work only)
// and the next cycle starts in the level left by stage 3.
#pragma once

#include "qotto/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qotto {

struct RngSeed {
  std::uint64_t value = 0;
};

/// Deterministic random source. Streams are derived from (seed, stream id)
/// with a SplitMix64 mix, so each chunk of work owns an independent,
/// reproducible generator.
class CycleRng {
public:
  explicit CycleRng(std::uint64_t state);

  static CycleRng for_stream(RngSeed seed, std::uint64_t domain,
                             std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low();
  bool bernoulli(double p);
  /// Number of independent Bernoulli(p) trials up to and including the first
  /// success, or nullopt if the first `cap` trials all fail.
  std::optional<std::uint64_t> trials_until_success(double p,
                                                    std::uint64_t cap);

private:
  std::mt19937_64 engine_;
};

/// Engine probabilities: upper occupation after bath-1 contact (p_excite)
/// and after bath-2 contact (p_deexcite_complement).
struct CycleParams {
  GapSchedule gaps;
  Occupation p_excite;
  Occupation p_deexcite_complement;

  static CycleParams thermal(const GapSchedule& gaps, BathSpec bath1,
                             BathSpec bath2);

  /// Ensemble mean of work_extracted.
  double expected_work() const;
  /// Probability that a cycle absorbs at bath 1 and releases at bath 2,
  /// p1 * (1 - p2).
  double work_producing_probability() const;
};

struct TrajectoryRecord {
  bool start_upper = false;
  bool after_bath1_upper = false;
  bool after_bath2_upper = false;
  double heat_from_bath1 = 0.0;
  double heat_to_bath2 = 0.0;
  double work_extracted = 0.0;
  /// Started low, absorbed at bath 1, released at bath 2: the only net
  /// effect is heat from bath 1 turned into work (plus delta2 into bath 2).
  bool violation = false;

  bool work_producing() const noexcept {
    return after_bath1_upper && !after_bath2_upper;
  }
};

/// Fills the energy fields for the given level history.
TrajectoryRecord make_trajectory(const GapSchedule& gaps, bool start_upper,
                                 bool after_bath1_upper,
                                 bool after_bath2_upper);

/// One stochastic cycle.
TrajectoryRecord run_cycle(CycleRng& rng, const CycleParams& params,
                           bool start_upper);

struct EnsembleStats {
  std::uint64_t n_cycles = 0;
  double mean_work = 0.0;
  double stderr_work = 0.0;
  /// Fraction of work-producing cycles (up at bath 1, down at bath 2).
  double violation_frequency = 0.0;
  /// Fraction of cycles with TrajectoryRecord::violation set.
  double strict_violation_frequency = 0.0;
  double mean_heat1 = 0.0;
  double mean_heat2 = 0.0;

  // Exact integer tallies behind the means.
  std::uint64_t n_productive = 0; // work = +(delta1 - delta2)
  std::uint64_t n_wasteful = 0;   // work = -(delta1 - delta2)
  std::uint64_t n_strict_violations = 0;
  std::int64_t net_bath1_jumps = 0; // sum of (after_bath1 - start)
  bool final_upper = false;

  /// run_lengths[L] counts maximal runs of exactly L consecutive
  /// work-producing cycles; index 0 is unused.
  std::vector<std::uint64_t> run_lengths;

  /// Number of length-n_c windows (out of n_cycles - n_c + 1 sliding
  /// positions) made only of work-producing cycles. Derived from the
  /// maximal-run histogram.
  std::uint64_t violation_windows(std::uint64_t n_c) const;
  double violation_window_frequency(std::uint64_t n_c) const;
};

/// Runs n_cycles chained cycles. Cycle i uses a generator owned by chunk
/// i / kEnsembleChunk, so the output is bit-identical for any worker count.
/// The first cycle starts in the lower level unless initial_upper is set.
EnsembleStats run_ensemble(RngSeed seed, std::uint64_t n_cycles,
                           const CycleParams& params, unsigned workers = 0,
                           bool initial_upper = false);

inline constexpr std::uint64_t kEnsembleChunk = 1u << 16;

/// (p1 * (1 - p2))^n_c: probability that n_c given consecutive cycles are
/// all work-producing.
double violation_run_probability(double p1, double p2, std::uint64_t n_c);

/// Null-hypothesis variance of EnsembleStats::violation_windows(n_c) for
/// n_cycles independent cycles, each work-producing with probability q.
/// Overlapping windows are correlated; the covariance terms are included.
double violation_window_variance(double q, std::uint64_t n_c,
                                 std::uint64_t n_cycles);

struct DaemonLedger {
  std::uint64_t attempts = 0;
  std::uint64_t completed_cycles = 0;
  std::uint64_t measurement_bits = 0;
  double gross_work = 0.0;
  double erasure_heat = 0.0;
  double net_work = 0.0;
  double erase_temperature = 0.0;

  double bits_per_completed_cycle() const;
};

inline constexpr std::uint64_t kDefaultMeasurementCap = std::uint64_t{1} << 40;

/// Measurement-conditioned operation. Every attempt starts in the lower
/// level. At bath 1 the system is contacted and measured (one bit each) until
/// found upper; it then expands. At bath 2 it is contacted and measured until
/// found lower; it then compresses and the cycle completes with work
/// delta1 - delta2. A stage that needs more than `measurement_cap`
/// measurements abandons the attempt. After all attempts the register is
/// erased at kT = erase_bath.temperature(), costing kT ln 2 per bit.
DaemonLedger run_daemon(RngSeed seed, std::uint64_t n_attempts,
                        const CycleParams& params, BathSpec erase_bath,
                        unsigned workers = 0,
                        std::uint64_t measurement_cap = kDefaultMeasurementCap);

inline constexpr std::uint64_t kDaemonChunk = 1u << 12;

/// Mean bits per completed cycle with unlimited retries:
/// 1/p1 + 1/(1 - p2).
double expected_daemon_bits(const CycleParams& params);

/// Variance of the bit count of a single completed cycle.
double daemon_bits_variance(const CycleParams& params);

} // namespace qotto
