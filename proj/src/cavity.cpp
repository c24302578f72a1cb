#include "qotto/cavity.hpp"

#include "qotto/optimize.hpp"
#include "qotto/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qotto {
namespace {

constexpr std::uint64_t kMaxTruncation = std::uint64_t{1} << 31;

// 1 - slope_hot * slope_cold below this is treated as the identity cycle.
constexpr double kDegenerateCycle = 64 * std::numeric_limits<double>::epsilon();

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw PhysicsError(std::string(what) + " must lie in [0, 1], got " +
                       std::to_string(p));
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw PhysicsError("time must be finite and non-negative, got " +
                       std::to_string(t));
}

bool same_gap(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

double fixed_point_work(const AffineOccupationMap& hot,
                        const AffineOccupationMap& cold, double spread) {
  if (!(1.0 - hot.slope * cold.slope > kDegenerateCycle))
    return std::numeric_limits<double>::quiet_NaN();
  const auto [p_a, p_b] = cycle_fixed_point(hot, cold);
  return (p_b - p_a) * spread;
}

} // namespace

CavityParams::CavityParams(double delta, double temperature, double coupling,
                           double trunc_eps)
    : delta_(delta), temperature_(temperature), coupling_(coupling),
      trunc_eps_(trunc_eps) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw PhysicsError("cavity gap must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw PhysicsError("cavity temperature must be positive");
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw PhysicsError("cavity coupling must be positive");
  if (!(trunc_eps > 0.0 && trunc_eps < 1e-6))
    throw PhysicsError("trunc_eps must lie in (0, 1e-6)");
}

double mean_photon(const CavityParams& params) {
  return 1.0 / std::expm1(params.delta() / params.temperature());
}

double photon_ratio(const CavityParams& params) {
  const double n = mean_photon(params);
  return n / (1.0 + n);
}

double photon_dist(std::uint64_t k, double n_bar) {
  if (!(n_bar >= 0.0))
    throw PhysicsError("mean photon number must be non-negative");
  if (n_bar == 0.0)
    return k == 0 ? 1.0 : 0.0;
  return std::pow(n_bar / (1.0 + n_bar), static_cast<double>(k)) / (1.0 + n_bar);
}

double photon_dist(std::uint64_t k, const CavityParams& params) {
  return photon_dist(k, mean_photon(params));
}

std::uint64_t truncation_level(double n_bar, double eps) {
  if (!(eps > 0.0))
    throw PhysicsError("truncation tolerance must be positive");
  if (!(n_bar >= 0.0) || !std::isfinite(n_bar))
    throw PhysicsError("mean photon number must be finite and non-negative");
  const double ratio = n_bar / (1.0 + n_bar);
  if (ratio < eps)
    return 0;
  const auto tail = [ratio](std::uint64_t n) {
    return std::pow(ratio, static_cast<double>(n + 1));
  };
  const double estimate = std::ceil(std::log(eps) / std::log(ratio)) - 1.0;
  if (!(estimate < static_cast<double>(kMaxTruncation)))
    throw PhysicsError("photon-number series too long for n_bar = " +
                       std::to_string(n_bar));
  auto n = static_cast<std::uint64_t>(std::max(0.0, estimate));
  // The logarithm may be off by one either way near an exact power.
  while (!(tail(n) < eps))
    ++n;
  while (n > 0 && tail(n - 1) < eps)
    --n;
  return n;
}

double rabi_sum(double t, const CavityParams& params) {
  require_time(t);
  if (t == 0.0)
    return 1.0; // every cosine is 1 and the weights sum to 1
  const double n_bar = mean_photon(params);
  const std::uint64_t last = truncation_level(n_bar, params.trunc_eps());
  const double ratio = n_bar / (1.0 + n_bar);
  const double g = params.coupling();
  double weight = 1.0 / (1.0 + n_bar);
  double sum = 0.0;
  for (std::uint64_t k = 0; k <= last; ++k) {
    const double c = std::cos(g * std::sqrt(static_cast<double>(k + 1)) * t);
    sum += weight * c * c;
    weight *= ratio;
  }
  return sum;
}

double evolve_occupation(double p0, double t, const CavityParams& params) {
  require_probability(p0, "initial occupation");
  const double n = mean_photon(params);
  const double s = rabi_sum(t, params);
  return ((1.0 + 2.0 * n) * p0 - n) / (1.0 + n) * s + n * (1.0 - p0) / (1.0 + n);
}

Interval occupation_bounds(double p0, const CavityParams& params) {
  require_probability(p0, "initial occupation");
  const double n = mean_photon(params);
  const double edge = n * (1.0 - p0) / (1.0 + n);
  if (p0 <= n / (1.0 + 2.0 * n))
    return {p0, std::max(p0, edge)};
  return {std::min(p0, edge), p0};
}

AffineOccupationMap affine_map_from_rabi_sum(double rabi, double n_bar) {
  return {((1.0 + 2.0 * n_bar) * rabi - n_bar) / (1.0 + n_bar),
          n_bar * (1.0 - rabi) / (1.0 + n_bar)};
}

AffineOccupationMap cavity_affine_map(double t, const CavityParams& params) {
  return affine_map_from_rabi_sum(rabi_sum(t, params), mean_photon(params));
}

AffineOccupationMap boundary_map(const CavityParams& params) {
  return affine_map_from_rabi_sum(0.0, mean_photon(params));
}

bool ReachableRegion::contains(double entry, double exit, double slack) const {
  const double lo = std::min(entry, boundary(entry));
  const double hi = std::max(entry, boundary(entry));
  return exit >= lo - slack && exit <= hi + slack;
}

ReachableRegion reachable_region(const CavityParams& params) {
  ReachableRegion region;
  region.n_bar = mean_photon(params);
  region.ratio = region.n_bar / (1.0 + region.n_bar);
  region.gibbs_point = region.n_bar / (1.0 + 2.0 * region.n_bar);
  return region;
}

std::pair<double, double> cycle_fixed_point(const AffineOccupationMap& hot,
                                            const AffineOccupationMap& cold) {
  const double denom = 1.0 - hot.slope * cold.slope;
  if (!(denom > kDegenerateCycle))
    throw PhysicsError("degenerate cycle: both cavity maps are the identity");
  const double p_a = std::clamp((cold.slope * hot.offset + cold.offset) / denom, 0.0, 1.0);
  const double p_b = std::clamp(hot(p_a), 0.0, 1.0);
  return {p_a, p_b};
}

std::pair<double, double> max_work_corner(const CavityParams& hot,
                                          const CavityParams& cold) {
  const double c1 = photon_ratio(hot);
  const double c2 = photon_ratio(cold);
  const double denom = 1.0 - c1 * c2;
  return {c2 * (1.0 - c1) / denom, c1 * (1.0 - c2) / denom};
}

double max_cycle_work_bound(const CavityParams& hot, const CavityParams& cold,
                            const GapSchedule& gaps) {
  if (!same_gap(hot.delta(), gaps.delta1()) || !same_gap(cold.delta(), gaps.delta2()))
    throw PhysicsError("cavity gaps must match the gap schedule");
  const double c1 = photon_ratio(hot);
  const double c2 = photon_ratio(cold);
  if (!(c1 > c2))
    return 0.0;
  return (c1 - c2) / (1.0 - c1 * c2) * gaps.spread();
}

double thermal_baseline_work(BathSpec bath1, BathSpec bath2,
                             const GapSchedule& gaps) {
  return net_extracted_work(gibbs_upper(gaps.delta1(), bath1),
                            gibbs_upper(gaps.delta2(), bath2), gaps);
}

double cycle_work(double tau1, double tau2, const CavityParams& hot,
                  const CavityParams& cold, const GapSchedule& gaps) {
  return fixed_point_work(cavity_affine_map(tau1, hot),
                          cavity_affine_map(tau2, cold), gaps.spread());
}

ContactTimeResult optimize_contact_times(const CavityParams& hot,
                                         const CavityParams& cold,
                                         const GapSchedule& gaps,
                                         const ContactTimeOptions& options) {
  if (options.grid < 2)
    throw std::invalid_argument("contact-time grid needs at least 2 points per axis");
  if (!(options.t_max > 0.0) || !std::isfinite(options.t_max))
    throw std::invalid_argument("t_max must be positive");

  ContactTimeResult result;
  result.bound = max_cycle_work_bound(hot, cold, gaps);

  const std::uint64_t n = options.grid;
  const double step = options.t_max / static_cast<double>(n - 1);
  const auto time_at = [&](std::uint64_t i) {
    return i + 1 == n ? options.t_max : step * static_cast<double>(i);
  };
  std::vector<AffineOccupationMap> hot_maps(n);
  std::vector<AffineOccupationMap> cold_maps(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    hot_maps[i] = cavity_affine_map(time_at(i), hot);
    cold_maps[i] = cavity_affine_map(time_at(i), cold);
  });

  struct Best {
    double work = -std::numeric_limits<double>::infinity();
    std::uint64_t i = 0;
    std::uint64_t j = 0;
  };
  std::vector<Best> row_best(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    Best best;
    for (std::uint64_t j = 0; j < n; ++j) {
      const double w = fixed_point_work(hot_maps[i], cold_maps[j], gaps.spread());
      if (w > best.work)
        best = {w, i, j};
    }
    row_best[i] = best;
  });
  Best best;
  for (const Best& b : row_best)
    if (b.work > best.work)
      best = b;
  if (!std::isfinite(best.work))
    throw PhysicsError("every grid cell is a degenerate cycle");

  double tau1 = time_at(best.i);
  double tau2 = time_at(best.j);
  result.coarse_work = best.work;
  double work = best.work;

  const auto objective = [&](double t1, double t2) {
    const double w = cycle_work(t1, t2, hot, cold, gaps);
    return std::isnan(w) ? -std::numeric_limits<double>::infinity() : w;
  };
  const double lo1 = std::max(0.0, tau1 - step), hi1 = std::min(options.t_max, tau1 + step);
  const double lo2 = std::max(0.0, tau2 - step), hi2 = std::min(options.t_max, tau2 + step);
  for (unsigned round = 0; round < options.refine_rounds; ++round) {
    const double before = work;
    const auto [t1, w1] = golden_section_maximize(
        [&](double t) { return objective(t, tau2); }, lo1, hi1, options.refine_tol);
    if (w1 > work) {
      tau1 = t1;
      work = w1;
    }
    const auto [t2, w2] = golden_section_maximize(
        [&](double t) { return objective(tau1, t); }, lo2, hi2, options.refine_tol);
    if (w2 > work) {
      tau2 = t2;
      work = w2;
    }
    if (!(work > before))
      break;
  }

  const auto [p_a, p_b] =
      cycle_fixed_point(cavity_affine_map(tau1, hot), cavity_affine_map(tau2, cold));
  result.point = {p_a, p_b, tau1, tau2};
  result.work = work;
  result.gap_to_bound = result.bound - work;
  return result;
}

Polygon hot_region_polygon(const CavityParams& hot) {
  const ReachableRegion r = reachable_region(hot);
  return {{0.0, 0.0}, {r.gibbs_point, r.gibbs_point}, {0.0, r.ratio}};
}

Polygon cold_region_polygon(const CavityParams& cold) {
  const ReachableRegion r = reachable_region(cold);
  return {{r.gibbs_point, r.gibbs_point}, {1.0, 0.0}, {1.0, 1.0}};
}

Polygon reflected_cold_polygon(const CavityParams& cold) {
  const ReachableRegion r = reachable_region(cold);
  return {{r.gibbs_point, r.gibbs_point}, {1.0, 1.0}, {0.0, 1.0}};
}

Polygon convex_intersection(const Polygon& subject, const Polygon& clip) {
  // Sutherland-Hodgman; clip must be convex and counter-clockwise.
  Polygon output = subject;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point a = clip[e];
    const Point b = clip[(e + 1) % m];
    const auto side = [&](const Point& p) {
      return (b.first - a.first) * (p.second - a.second) -
             (b.second - a.second) * (p.first - a.first);
    };
    Polygon input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point cur = input[i];
      const Point prev = input[(i + input.size() - 1) % input.size()];
      const double s_cur = side(cur);
      const double s_prev = side(prev);
      if (s_cur >= 0.0) {
        if (s_prev < 0.0) {
          const double u = s_prev / (s_prev - s_cur);
          output.emplace_back(prev.first + u * (cur.first - prev.first),
                              prev.second + u * (cur.second - prev.second));
        }
        output.push_back(cur);
      } else if (s_prev >= 0.0) {
        const double u = s_prev / (s_prev - s_cur);
        output.emplace_back(prev.first + u * (cur.first - prev.first),
                            prev.second + u * (cur.second - prev.second));
      }
    }
  }
  return output;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    twice += p.first * q.second - q.first * p.second;
  }
  return std::abs(twice) / 2.0;
}

RegionGeometry region_geometry(const CavityParams& hot, const CavityParams& cold,
                               const GapSchedule& gaps) {
  RegionGeometry g;
  g.hot = reachable_region(hot);
  g.cold = reachable_region(cold);
  g.hot_polygon = hot_region_polygon(hot);
  g.cold_polygon = cold_region_polygon(cold);
  g.reflected_cold_polygon = reflected_cold_polygon(cold);
  g.hot_boundary = {{0.0, g.hot.boundary(0.0)}, {1.0, g.hot.boundary(1.0)}};
  g.cold_boundary = {{0.0, g.cold.boundary(0.0)}, {1.0, g.cold.boundary(1.0)}};
  g.max_work = max_cycle_work_bound(hot, cold, gaps);
  g.thermal_work = thermal_baseline_work(hot.bath(), cold.bath(), gaps);
  // The two triangles share interior points exactly when the hot boundary
  // line lies above the cold one; otherwise they meet at most in a point.
  g.has_overlap = g.hot.ratio > g.cold.ratio;
  if (g.has_overlap) {
    g.overlap = convex_intersection(g.hot_polygon, g.reflected_cold_polygon);
    g.overlap_area = polygon_area(g.overlap);
    g.corner = max_work_corner(hot, cold);
  }
  return g;
}

} // namespace qotto
