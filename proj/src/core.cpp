#include "qotto/core.hpp"

#include <cmath>

namespace qotto {

GapSchedule::GapSchedule(double delta1, double delta2)
    : delta1_(delta1), delta2_(delta2) {
  if (!std::isfinite(delta1) || !std::isfinite(delta2))
    throw PhysicsError("gaps must be finite");
  if (!(delta2 > 0.0))
    throw PhysicsError("delta2 must be positive, got " + std::to_string(delta2));
  if (!(delta1 > delta2))
    throw PhysicsError("delta1 must exceed delta2 (got delta1=" +
                       std::to_string(delta1) +
                       ", delta2=" + std::to_string(delta2) + ")");
}

BathSpec::BathSpec(double temperature) : temperature_(temperature) {
  if (!(temperature > 0.0) || std::isnan(temperature))
    throw PhysicsError("bath temperature must be positive, got " +
                       std::to_string(temperature));
}

Occupation::Occupation(double p_upper) : p_upper_(p_upper) {
  if (!(p_upper >= 0.0 && p_upper <= 1.0))
    throw PhysicsError("occupation must lie in [0, 1], got " +
                       std::to_string(p_upper));
}

double internal_energy(Occupation p, double delta) {
  return p.p_upper() * delta;
}

double stroke_heat(double delta, Occupation p_before, Occupation p_after) {
  return delta * (p_after.p_upper() - p_before.p_upper());
}

double stroke_work_on(Occupation p, double delta_before, double delta_after) {
  return p.p_upper() * (delta_after - delta_before);
}

StrokeRecord thermal_stroke(double delta, Occupation p_before,
                            Occupation p_after) {
  return {stroke_heat(delta, p_before, p_after), 0.0};
}

StrokeRecord adiabatic_stroke(Occupation p, double delta_before,
                              double delta_after) {
  return {0.0, stroke_work_on(p, delta_before, delta_after)};
}

Occupation gibbs_upper(double delta, BathSpec bath) {
  const double e = std::exp(-boltzmann_exponent(delta, bath));
  return Occupation(e / (1.0 + e));
}

double cycle_work_on_system(Occupation p1, Occupation p2,
                            const GapSchedule& gaps) {
  // expansion at p1 (stage 2) followed by compression at p2 (stage 4)
  return stroke_work_on(p1, gaps.delta1(), gaps.delta2()) +
         stroke_work_on(p2, gaps.delta2(), gaps.delta1());
}

double net_extracted_work(Occupation p1, Occupation p2,
                          const GapSchedule& gaps) {
  return (p1.p_upper() - p2.p_upper()) * gaps.spread();
}

bool extraction_condition(BathSpec bath1, BathSpec bath2,
                          const GapSchedule& gaps) {
  return boltzmann_exponent(gaps.delta1(), bath1) <
         boltzmann_exponent(gaps.delta2(), bath2);
}

double threshold_temperature(BathSpec bath2, const GapSchedule& gaps) {
  return bath2.temperature() * (gaps.delta1() / gaps.delta2());
}

// Written as a difference over delta1: the subtraction is exact for nearby
// gaps, where 1 - delta2/delta1 would cancel.
double otto_efficiency(const GapSchedule& gaps) {
  return gaps.spread() / gaps.delta1();
}

double carnot_efficiency(BathSpec bath1, BathSpec bath2) {
  if (!(bath1.temperature() > bath2.temperature()))
    throw PhysicsError("Carnot efficiency needs T1 > T2");
  return (bath1.temperature() - bath2.temperature()) / bath1.temperature();
}

} // namespace qotto
