// Resonant two-level atom in a single-mode thermal cavity.
//
// For an initial upper-level probability p0 the exact evolution is affine
// in p0:
//
//   p(t) = a(t) p0 + b(t)
//   a = ((1 + 2n) S(t) - n) / (1 + n),   b = n (1 - S(t)) / (1 + n)
//   S(t) = sum_k P_k cos^2(g sqrt(k + 1) t),  P_k = (1/(1+n)) (n/(1+n))^k
//
// with n the thermal photon number. Because S(t) lies in [0, 1], p(t) is
// confined between p0 and the boundary value n (1 - p0) / (1 + n); both
// meet at the thermal point n / (1 + 2n).
#pragma once

#include "qotto/core.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace qotto {

inline constexpr double kDefaultTruncEps = 1e-12;

class CavityParams {
public:
  /// delta: atomic gap (the mode is tuned to it), temperature: kT of the
  /// bath the mode is in equilibrium with, coupling: g,
  /// trunc_eps: photon-number tail mass left out of the Rabi sum.
  CavityParams(double delta, double temperature, double coupling = 1.0,
               double trunc_eps = kDefaultTruncEps);

  double delta() const noexcept { return delta_; }
  double temperature() const noexcept { return temperature_; }
  double coupling() const noexcept { return coupling_; }
  double trunc_eps() const noexcept { return trunc_eps_; }

  BathSpec bath() const { return BathSpec(temperature_); }

private:
  double delta_;
  double temperature_;
  double coupling_;
  double trunc_eps_;
};

/// Thermal photon number 1 / (exp(delta/kT) - 1), via expm1.
double mean_photon(const CavityParams& params);

/// n / (1 + n) = exp(-delta/kT): ratio of successive photon probabilities,
/// and the slope magnitude of the reachable-region boundary line.
double photon_ratio(const CavityParams& params);

/// Thermal photon-number distribution P_k.
double photon_dist(std::uint64_t k, double n_bar);
double photon_dist(std::uint64_t k, const CavityParams& params);

/// Smallest N whose omitted tail sum_{k > N} P_k = (n/(1+n))^(N+1) is
/// below eps. Throws PhysicsError if N would exceed 2^31.
std::uint64_t truncation_level(double n_bar, double eps);

/// S(t), summed up to truncation_level(n_bar, trunc_eps). The omitted tail
/// makes the result low by at most trunc_eps; no correction is added.
/// S(0) is exactly 1.
double rabi_sum(double t, const CavityParams& params);

/// p(t) for initial probability p0.
double evolve_occupation(double p0, double t, const CavityParams& params);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

/// Every value p(t) can take for this p0: between p0 and the boundary value.
Interval occupation_bounds(double p0, const CavityParams& params);

/// p -> slope * p + offset.
struct AffineOccupationMap {
  double slope = 1.0;
  double offset = 0.0;

  double operator()(double p) const { return slope * p + offset; }
  /// offset / (1 - slope); undefined for the identity.
  double fixed_point() const { return offset / (1.0 - slope); }
};

AffineOccupationMap cavity_affine_map(double t, const CavityParams& params);

/// Same map for a precomputed Rabi sum S.
AffineOccupationMap affine_map_from_rabi_sum(double rabi, double n_bar);

/// The boundary map, reached when S = 0: p -> n (1 - p) / (1 + n).
AffineOccupationMap boundary_map(const CavityParams& params);

/// Closed set of (entry, exit) pairs allowed by the bounds: between the
/// diagonal exit = entry and the line exit = ratio * (1 - entry).
struct ReachableRegion {
  double n_bar = 0.0;
  double ratio = 0.0;       // n / (1 + n)
  double gibbs_point = 0.0; // n / (1 + 2n)

  double boundary(double entry) const { return ratio * (1.0 - entry); }
  bool contains(double entry, double exit, double slack = 0.0) const;
};

ReachableRegion reachable_region(const CavityParams& params);

/// A point of the self-consistent cycle. p_a enters the hot cavity (and
/// leaves the cold one), p_b leaves the hot cavity (and enters the cold one).
struct CycleOperatingPoint {
  double p_a = 0.0;
  double p_b = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

/// Unique solution of p_b = hot(p_a), p_a = cold(p_b). Throws PhysicsError
/// when the composed map is (numerically) the identity, i.e. both maps are
/// the identity as for tau1 = tau2 = 0.
std::pair<double, double> cycle_fixed_point(const AffineOccupationMap& hot,
                                            const AffineOccupationMap& cold);

/// Upper bound on the work per cycle over all contact times: the corner of
/// the hot region's upper triangle and the reflected cold region, times
/// delta1 - delta2. Zero when the regions only touch or do not overlap.
double max_cycle_work_bound(const CavityParams& hot, const CavityParams& cold,
                            const GapSchedule& gaps);

/// (p_a, p_b) at the corner attaining max_cycle_work_bound. Meaningful only
/// when the bound is positive.
std::pair<double, double> max_work_corner(const CavityParams& hot,
                                          const CavityParams& cold);

/// Work done by the engine at thermal equilibrium with both baths.
double thermal_baseline_work(BathSpec bath1, BathSpec bath2,
                             const GapSchedule& gaps);

struct ContactTimeOptions {
  double t_max = 50.0;          // in units of 1/g
  std::uint64_t grid = 512;     // points per axis, including t = 0 and t_max
  double refine_tol = 1e-6;     // golden-section bracket width
  unsigned refine_rounds = 8;   // alternating tau1 / tau2 sweeps
  unsigned workers = 0;
};

struct ContactTimeResult {
  CycleOperatingPoint point;
  double work = 0.0;        // after refinement
  double coarse_work = 0.0; // best grid cell
  double bound = 0.0;       // max_cycle_work_bound
  double gap_to_bound = 0.0;
};

/// Maximizes the cycle work over (tau1, tau2). A grid scan locates the best
/// cell; coordinate-wise golden-section search then refines within one grid
/// step of it. work >= coarse_work always.
ContactTimeResult optimize_contact_times(const CavityParams& hot,
                                         const CavityParams& cold,
                                         const GapSchedule& gaps,
                                         const ContactTimeOptions& options = {});

/// Work of the self-consistent cycle for given contact times; NaN for the
/// degenerate identity cycle.
double cycle_work(double tau1, double tau2, const CavityParams& hot,
                  const CavityParams& cold, const GapSchedule& gaps);

// --- geometry for figures ---------------------------------------------------

using Point = std::pair<double, double>;
using Polygon = std::vector<Point>;
using Segment = std::pair<Point, Point>;

/// Hot-cavity triangle above the diagonal: exit > entry.
Polygon hot_region_polygon(const CavityParams& hot);
/// Cold-cavity triangle below the diagonal: exit < entry.
Polygon cold_region_polygon(const CavityParams& cold);
/// cold_region_polygon mirrored across the diagonal.
Polygon reflected_cold_polygon(const CavityParams& cold);

/// Intersection of two convex polygons (counter-clockwise vertices).
Polygon convex_intersection(const Polygon& subject, const Polygon& clip);
double polygon_area(const Polygon& poly);

struct RegionGeometry {
  ReachableRegion hot;
  ReachableRegion cold;
  Polygon hot_polygon;
  Polygon cold_polygon;
  Polygon reflected_cold_polygon;
  Polygon overlap;
  Segment hot_boundary;  // exit = ratio * (1 - entry) over entry in [0, 1]
  Segment cold_boundary;
  double overlap_area = 0.0;
  double max_work = 0.0;
  double thermal_work = 0.0;
  bool has_overlap = false;
  Point corner; // (p_a, p_b) maximizing the work; valid when has_overlap
};

RegionGeometry region_geometry(const CavityParams& hot,
                               const CavityParams& cold,
                               const GapSchedule& gaps);

} // namespace qotto
