// Two-level Otto engine thermodynamics: energy bookkeeping and the analytic
// formulas for thermal-equilibrium operation.
//
// Conventions used throughout the library:
//   - k = hbar = 1. Temperatures are given as kT in energy units, and the
//     cavity coupling g defaults to 1 so times are measured in units of 1/g.
//   - The lower level sits at energy 0 for every gap value; only the upper
//     level moves during an adiabatic stroke.
//   - Heat is positive when absorbed BY the system. Work on a single stroke
//     is positive when done ON the system. Cycle-level work reported by the
//     public API (net_extracted_work, TrajectoryRecord::work_extracted, ...)
//     is positive when done BY the engine.
#pragma once

#include <stdexcept>
#include <string>

namespace qotto {

/// Raised when parameters are well-formed but describe an impossible engine
/// (non-positive temperature, delta2 >= delta1, probabilities outside [0,1]).
class PhysicsError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Gap pair for the adiabatic strokes. delta1 is the gap while in contact
/// with the hot bath, delta2 (< delta1) the gap at the cold bath.
class GapSchedule {
public:
  GapSchedule(double delta1, double delta2);

  double delta1() const noexcept { return delta1_; }
  double delta2() const noexcept { return delta2_; }
  /// delta1 - delta2, the work quantum of one productive cycle.
  double spread() const noexcept { return delta1_ - delta2_; }

private:
  double delta1_;
  double delta2_;
};

/// A heat bath, characterised by kT.
class BathSpec {
public:
  explicit BathSpec(double temperature);

  double temperature() const noexcept { return temperature_; }

private:
  double temperature_;
};

/// Upper-level occupation probability of the two-level system.
class Occupation {
public:
  explicit Occupation(double p_upper);

  double p_upper() const noexcept { return p_upper_; }
  operator double() const noexcept { return p_upper_; }

private:
  double p_upper_;
};

/// Energy exchanged during one stroke.
struct StrokeRecord {
  double heat_in = 0.0; // absorbed by the system
  double work_on = 0.0; // done on the system
};

/// U = p * delta (lower level pinned at zero).
double internal_energy(Occupation p, double delta);

/// Heat absorbed during a fixed-gap stroke: delta * (p_after - p_before).
double stroke_heat(double delta, Occupation p_before, Occupation p_after);

/// Work done on the system during a fixed-occupation stroke:
/// p * (delta_after - delta_before).
double stroke_work_on(Occupation p, double delta_before, double delta_after);

/// Stroke records for the two kinds of stroke; each leaves the other field 0.
StrokeRecord thermal_stroke(double delta, Occupation p_before,
                            Occupation p_after);
StrokeRecord adiabatic_stroke(Occupation p, double delta_before,
                              double delta_after);

/// Boltzmann exponent delta / kT.
inline double boltzmann_exponent(double delta, BathSpec bath) {
  return delta / bath.temperature();
}

/// Thermal upper-level probability 1 / (1 + exp(delta/kT)), in (0, 1/2].
///
/// Evaluated as e/(1+e) with e = exp(-delta/kT), so it never overflows.
/// Flush rule: once exp(-delta/kT) underflows (delta/kT above roughly 745)
/// the result is exactly 0; in the subnormal band just below that it is the
/// correctly-scaled subnormal value.
Occupation gibbs_upper(double delta, BathSpec bath);

/// Cycle work on the system from the two adiabatic strokes,
/// (p1 - p2) * (delta2 - delta1). Negative when the engine produces work.
double cycle_work_on_system(Occupation p1, Occupation p2,
                            const GapSchedule& gaps);

/// Work extracted by the engine per cycle, (p1 - p2) * (delta1 - delta2).
/// p1 is the upper occupation leaving the hot bath, p2 leaving the cold bath.
double net_extracted_work(Occupation p1, Occupation p2,
                          const GapSchedule& gaps);

/// True iff T1 > T2 * delta1 / delta2 (strict). Evaluated as the Boltzmann
/// exponent comparison delta1/kT1 < delta2/kT2 so that it agrees bit-for-bit
/// with the ordering of the two gibbs_upper values.
bool extraction_condition(BathSpec bath1, BathSpec bath2,
                          const GapSchedule& gaps);

/// Hot-bath temperature at which thermal operation produces zero work.
double threshold_temperature(BathSpec bath2, const GapSchedule& gaps);

/// 1 - delta2/delta1, evaluated as (delta1 - delta2)/delta1. Depends on the
/// gaps only.
double otto_efficiency(const GapSchedule& gaps);

/// 1 - T2/T1, evaluated as (T1 - T2)/T1. Throws PhysicsError unless T1 > T2.
double carnot_efficiency(BathSpec bath1, BathSpec bath2);

} // namespace qotto
