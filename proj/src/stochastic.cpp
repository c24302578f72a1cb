#include "qotto/stochastic.hpp"

#include "qotto/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qotto {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kEnsembleDomain = 0x656e73656d626c65ull; // "ensemble"
constexpr std::uint64_t kDaemonDomain = 0x6461656d6f6e0000ull;   // "daemon"

// Chunks held in memory at once by run_ensemble.
constexpr std::uint64_t kChunksPerBatch = 64;

constexpr std::uint8_t kUpAfterBath1 = 1;
constexpr std::uint8_t kUpAfterBath2 = 2;

Occupation level(bool upper) { return Occupation(upper ? 1.0 : 0.0); }

} // namespace

CycleRng::CycleRng(std::uint64_t state) : engine_(state) {}

CycleRng CycleRng::for_stream(RngSeed seed, std::uint64_t domain,
                              std::uint64_t stream) {
  const std::uint64_t base = splitmix64(seed.value ^ splitmix64(domain));
  return CycleRng(splitmix64(base + stream));
}

double CycleRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double CycleRng::uniform_open_low() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

bool CycleRng::bernoulli(double p) { return uniform() < p; }

std::optional<std::uint64_t> CycleRng::trials_until_success(double p,
                                                            std::uint64_t cap) {
  if (cap == 0 || !(p > 0.0))
    return std::nullopt;
  if (p >= 1.0)
    return 1;
  // Inverse transform of the geometric distribution.
  const double failures =
      std::floor(std::log(uniform_open_low()) / std::log1p(-p));
  if (!(failures < static_cast<double>(cap)))
    return std::nullopt;
  return static_cast<std::uint64_t>(failures) + 1;
}

CycleParams CycleParams::thermal(const GapSchedule& gaps, BathSpec bath1,
                                 BathSpec bath2) {
  return CycleParams{gaps, gibbs_upper(gaps.delta1(), bath1),
                     gibbs_upper(gaps.delta2(), bath2)};
}

double CycleParams::expected_work() const {
  return net_extracted_work(p_excite, p_deexcite_complement, gaps);
}

double CycleParams::work_producing_probability() const {
  return p_excite.p_upper() * (1.0 - p_deexcite_complement.p_upper());
}

TrajectoryRecord make_trajectory(const GapSchedule& gaps, bool start_upper,
                                 bool after_bath1_upper,
                                 bool after_bath2_upper) {
  TrajectoryRecord rec;
  rec.start_upper = start_upper;
  rec.after_bath1_upper = after_bath1_upper;
  rec.after_bath2_upper = after_bath2_upper;

  const Occupation s = level(start_upper);
  const Occupation up1 = level(after_bath1_upper);
  const Occupation up2 = level(after_bath2_upper);
  rec.heat_from_bath1 = stroke_heat(gaps.delta1(), s, up1);
  rec.heat_to_bath2 = -stroke_heat(gaps.delta2(), up1, up2);
  rec.work_extracted = -cycle_work_on_system(up1, up2, gaps);
  rec.violation = !start_upper && rec.work_producing();
  return rec;
}

TrajectoryRecord run_cycle(CycleRng& rng, const CycleParams& params,
                           bool start_upper) {
  const bool up1 = rng.bernoulli(params.p_excite.p_upper());
  const bool up2 = rng.bernoulli(params.p_deexcite_complement.p_upper());
  return make_trajectory(params.gaps, start_upper, up1, up2);
}

std::uint64_t EnsembleStats::violation_windows(std::uint64_t n_c) const {
  if (n_c == 0)
    throw std::invalid_argument("window length must be at least 1");
  std::uint64_t windows = 0;
  for (std::uint64_t len = n_c; len < run_lengths.size(); ++len)
    windows += run_lengths[len] * (len - n_c + 1);
  return windows;
}

double EnsembleStats::violation_window_frequency(std::uint64_t n_c) const {
  if (n_cycles < n_c)
    return 0.0;
  return static_cast<double>(violation_windows(n_c)) /
         static_cast<double>(n_cycles - n_c + 1);
}

EnsembleStats run_ensemble(RngSeed seed, std::uint64_t n_cycles,
                           const CycleParams& params, unsigned workers,
                           bool initial_upper) {
  if (n_cycles == 0)
    throw std::invalid_argument("run_ensemble needs at least one cycle");

  const double p1 = params.p_excite.p_upper();
  const double p2 = params.p_deexcite_complement.p_upper();
  const std::uint64_t n_chunks = (n_cycles + kEnsembleChunk - 1) / kEnsembleChunk;

  EnsembleStats stats;
  stats.n_cycles = n_cycles;
  stats.run_lengths.assign(2, 0);

  bool start = initial_upper;
  std::uint64_t run = 0;
  auto close_run = [&] {
    if (run == 0)
      return;
    if (run >= stats.run_lengths.size())
      stats.run_lengths.resize(run + 1, 0);
    ++stats.run_lengths[run];
    run = 0;
  };

  std::vector<std::uint8_t> levels;
  for (std::uint64_t first = 0; first < n_chunks; first += kChunksPerBatch) {
    const std::uint64_t batch = std::min(kChunksPerBatch, n_chunks - first);
    const std::uint64_t begin = first * kEnsembleChunk;
    const std::uint64_t end = std::min(n_cycles, (first + batch) * kEnsembleChunk);
    levels.resize(end - begin);

    // Sampling does not depend on the incoming level, so chunks are drawn
    // independently and the chaining is resolved in the sequential pass.
    parallel_for(batch, workers, [&](std::size_t k) {
      const std::uint64_t chunk = first + k;
      CycleRng rng = CycleRng::for_stream(seed, kEnsembleDomain, chunk);
      const std::uint64_t lo = chunk * kEnsembleChunk;
      const std::uint64_t hi = std::min(n_cycles, lo + kEnsembleChunk);
      for (std::uint64_t i = lo; i < hi; ++i) {
        std::uint8_t bits = 0;
        if (rng.bernoulli(p1))
          bits |= kUpAfterBath1;
        if (rng.bernoulli(p2))
          bits |= kUpAfterBath2;
        levels[i - begin] = bits;
      }
    });

    for (const std::uint8_t bits : levels) {
      const bool up1 = bits & kUpAfterBath1;
      const bool up2 = bits & kUpAfterBath2;
      const bool productive = up1 && !up2;
      stats.n_productive += productive;
      stats.n_wasteful += !up1 && up2;
      stats.n_strict_violations += productive && !start;
      stats.net_bath1_jumps += static_cast<int>(up1) - static_cast<int>(start);
      if (productive)
        ++run;
      else
        close_run();
      start = up2;
    }
  }
  close_run();
  stats.final_upper = start;

  const double n = static_cast<double>(n_cycles);
  const GapSchedule& gaps = params.gaps;
  const double net_units =
      static_cast<double>(stats.n_productive) - static_cast<double>(stats.n_wasteful);
  const double mean_units = net_units / n;
  stats.mean_work = gaps.spread() * mean_units;
  stats.mean_heat1 = gaps.delta1() * static_cast<double>(stats.net_bath1_jumps) / n;
  stats.mean_heat2 = gaps.delta2() * mean_units;
  stats.violation_frequency = static_cast<double>(stats.n_productive) / n;
  stats.strict_violation_frequency =
      static_cast<double>(stats.n_strict_violations) / n;
  if (n_cycles > 1) {
    const double sum_sq =
        static_cast<double>(stats.n_productive + stats.n_wasteful);
    const double var = std::max(0.0, (sum_sq - n * mean_units * mean_units) / (n - 1.0));
    stats.stderr_work = gaps.spread() * std::sqrt(var / n);
  }
  return stats;
}

double violation_run_probability(double p1, double p2, std::uint64_t n_c) {
  const Occupation up(p1);
  const Occupation down_complement(p2);
  if (n_c == 0)
    throw std::invalid_argument("run length must be at least 1");
  return std::pow(up.p_upper() * (1.0 - down_complement.p_upper()),
                  static_cast<double>(n_c));
}

double violation_window_variance(double q, std::uint64_t n_c,
                                 std::uint64_t n_cycles) {
  if (n_c == 0)
    throw std::invalid_argument("run length must be at least 1");
  if (n_cycles < n_c)
    return 0.0;
  const double windows = static_cast<double>(n_cycles - n_c + 1);
  const double qn = std::pow(q, static_cast<double>(n_c));
  double var = windows * (qn - qn * qn);
  // Windows k apart (k < n_c) share n_c - k cycles: P(both) = q^(n_c + k).
  for (std::uint64_t k = 1; k < n_c && static_cast<double>(k) < windows; ++k) {
    const double both = std::pow(q, static_cast<double>(n_c + k));
    var += 2.0 * (windows - static_cast<double>(k)) * (both - qn * qn);
  }
  return var;
}

double DaemonLedger::bits_per_completed_cycle() const {
  if (completed_cycles == 0)
    return std::numeric_limits<double>::infinity();
  return static_cast<double>(measurement_bits) /
         static_cast<double>(completed_cycles);
}

DaemonLedger run_daemon(RngSeed seed, std::uint64_t n_attempts,
                        const CycleParams& params, BathSpec erase_bath,
                        unsigned workers, std::uint64_t measurement_cap) {
  if (measurement_cap == 0)
    throw std::invalid_argument("measurement cap must be at least 1");

  struct ChunkTally {
    std::uint64_t completed = 0;
    std::uint64_t bits = 0;
  };

  const double p_found_up = params.p_excite.p_upper();
  const double p_found_down = 1.0 - params.p_deexcite_complement.p_upper();
  const std::uint64_t n_chunks = (n_attempts + kDaemonChunk - 1) / kDaemonChunk;
  std::vector<ChunkTally> tallies(n_chunks);

  parallel_for(n_chunks, workers, [&](std::size_t chunk) {
    CycleRng rng = CycleRng::for_stream(seed, kDaemonDomain, chunk);
    const std::uint64_t lo = chunk * kDaemonChunk;
    const std::uint64_t hi = std::min(n_attempts, lo + kDaemonChunk);
    ChunkTally& tally = tallies[chunk];
    for (std::uint64_t i = lo; i < hi; ++i) {
      // prepared lower; contact bath 1 and measure until found upper
      const auto hot = rng.trials_until_success(p_found_up, measurement_cap);
      if (!hot) {
        tally.bits += measurement_cap;
        continue;
      }
      tally.bits += *hot;
      // expanded; contact bath 2 and measure until found lower
      const auto cold = rng.trials_until_success(p_found_down, measurement_cap);
      if (!cold) {
        tally.bits += measurement_cap;
        continue;
      }
      tally.bits += *cold;
      ++tally.completed;
    }
  });

  DaemonLedger ledger;
  ledger.attempts = n_attempts;
  ledger.erase_temperature = erase_bath.temperature();
  for (const ChunkTally& t : tallies) {
    ledger.completed_cycles += t.completed;
    ledger.measurement_bits += t.bits;
  }
  ledger.gross_work = static_cast<double>(ledger.completed_cycles) * params.gaps.spread();
  ledger.erasure_heat = static_cast<double>(ledger.measurement_bits) *
                        ledger.erase_temperature * std::numbers::ln2;
  ledger.net_work = ledger.gross_work - ledger.erasure_heat;
  return ledger;
}

double expected_daemon_bits(const CycleParams& params) {
  const double p_found_up = params.p_excite.p_upper();
  const double p_found_down = 1.0 - params.p_deexcite_complement.p_upper();
  return 1.0 / p_found_up + 1.0 / p_found_down;
}

double daemon_bits_variance(const CycleParams& params) {
  const double a = params.p_excite.p_upper();
  const double b = 1.0 - params.p_deexcite_complement.p_upper();
  return (1.0 - a) / (a * a) + (1.0 - b) / (b * b);
}

} // namespace qotto
