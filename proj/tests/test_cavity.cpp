#include <catch2/catch_amalgamated.hpp>

#include "qotto/cavity.hpp"
#include "qotto/optimize.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qotto;
using Catch::Approx;

namespace {

// kT giving thermal photon number n_bar for the given gap.
double temperature_for(double n_bar, double delta) {
  return delta / std::log1p(1.0 / n_bar);
}

CavityParams cavity(double n_bar, double delta = 1.0) {
  return CavityParams(delta, temperature_for(n_bar, delta));
}

// Oversummed Rabi sum with explicit powers, independent of the truncation
// logic under test.
double rabi_sum_oracle(double t, double n_bar, double g, int terms) {
  double sum = 0.0;
  for (int k = terms - 1; k >= 0; --k) {
    const double pk = std::pow(n_bar / (1.0 + n_bar), k) / (1.0 + n_bar);
    const double c = std::cos(g * std::sqrt(k + 1.0) * t);
    sum += pk * c * c;
  }
  return sum;
}

} // namespace

TEST_CASE("mean photon number", "[cavity]") {
  CHECK(mean_photon(CavityParams(std::numbers::ln2, 1.0)) == Approx(1.0).epsilon(1e-14));
  CHECK(mean_photon(CavityParams(std::log(4.0 / 3.0), 1.0)) == Approx(3.0).epsilon(1e-13));
  CHECK(mean_photon(CavityParams(1.0, 1e-4)) == 0.0);
  CHECK(mean_photon(CavityParams(2.0, 1e-3)) == 0.0);
  // small delta/kT: n ~ kT/delta - 1/2
  CHECK(mean_photon(CavityParams(1e-6, 1.0)) == Approx(1e6 - 0.5).epsilon(1e-12));
}

TEST_CASE("thermal photon distribution", "[cavity]") {
  for (std::uint64_t n = 0; n < 30; ++n)
    CHECK(photon_dist(n, 1.0) == std::ldexp(1.0, -static_cast<int>(n) - 1));
  CHECK(photon_dist(0, 0.0) == 1.0);
  CHECK(photon_dist(1, 0.0) == 0.0);
  CHECK(photon_dist(7, 0.0) == 0.0);

  double partial = 0.0;
  double previous_gap = 1.0;
  for (std::uint64_t n = 0; n < 400; ++n) {
    partial += photon_dist(n, cavity(2.5));
    const double gap = 1.0 - partial;
    CHECK(gap <= previous_gap + 1e-16);
    previous_gap = gap;
  }
  CHECK(partial == Approx(1.0).margin(1e-14));
}

TEST_CASE("truncation level", "[cavity]") {
  CHECK(truncation_level(1.0, 1e-12) == 39);
  CHECK(truncation_level(0.0, 1e-12) == 0);
  CHECK(truncation_level(0.0, 1e-300) == 0);
  CHECK_THROWS_AS(truncation_level(1.0, 0.0), PhysicsError);

  for (double n_bar : {0.01, 0.5, 1.0, 3.0, 5.0, 40.0}) {
    for (double eps : {1e-7, 1e-10, 1e-12, 1e-15}) {
      const std::uint64_t n = truncation_level(n_bar, eps);
      // brute-force tail beyond N, and beyond N - 1
      double tail = 0.0;
      for (std::uint64_t k = n + 1; k <= n + 10'000; ++k)
        tail += photon_dist(k, n_bar);
      INFO("n_bar = " << n_bar << ", eps = " << eps);
      CHECK(tail < eps);
      if (n > 0)
        CHECK(tail + photon_dist(n, n_bar) >= eps * (1 - 1e-9));
    }
  }
}

TEST_CASE("Rabi sum", "[cavity]") {
  CHECK(rabi_sum(0.0, cavity(2.0)) == Approx(1.0).margin(1e-12));
  CHECK(rabi_sum(0.0, cavity(2.0)) <= 1.0);

  const CavityParams empty(1.0, 1e-4, 0.7);
  for (double t : {0.0, 0.3, 1.7, 12.5}) {
    const double c = std::cos(0.7 * t);
    CHECK(rabi_sum(t, empty) == c * c);
  }

  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> time(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double t = time(gen);
    CHECK(std::abs(rabi_sum(t, cavity(1.0)) - rabi_sum_oracle(t, 1.0, 1.0, 10'000)) < 1e-11);
  }
  CHECK_THROWS_AS(rabi_sum(-1.0, cavity(1.0)), PhysicsError);
}

TEST_CASE("occupation evolution", "[cavity]") {
  for (double p0 : {0.0, 0.2, 0.9, 1.0})
    CHECK(evolve_occupation(p0, 0.0, cavity(1.5)) == Approx(p0).margin(1e-12));

  const CavityParams empty(1.0, 1e-4);
  for (double t : {0.4, 2.0, 9.0}) {
    const double c = std::cos(t);
    CHECK(evolve_occupation(0.8, t, empty) == Approx(0.8 * c * c).margin(1e-15));
  }

  // S -> 0 sends p0 to the boundary value n (1 - p0) / (1 + n)
  const AffineOccupationMap edge = affine_map_from_rabi_sum(0.0, 3.0);
  CHECK(edge(0.2) == Approx(3.0 * 0.8 / 4.0));
  CHECK(boundary_map(cavity(3.0))(0.2) == Approx(0.6).epsilon(1e-12));

  CHECK_THROWS_AS(evolve_occupation(1.2, 1.0, cavity(1.0)), PhysicsError);
}

TEST_CASE("occupation bounds", "[cavity]") {
  const Interval a = occupation_bounds(0.0, cavity(1.0));
  CHECK(a.lo == 0.0);
  CHECK(a.hi == Approx(0.5).epsilon(1e-14));

  const double fixed = 1.0 / 3.0; // n/(1+2n) for n = 1
  const Interval b = occupation_bounds(fixed, cavity(1.0));
  CHECK(b.hi - b.lo == Approx(0.0).margin(1e-15));

  const Interval c = occupation_bounds(1.0, cavity(1.0));
  CHECK(c.lo == Approx(0.0).margin(1e-15));
  CHECK(c.hi == 1.0);
}

TEST_CASE("evolution stays inside the bounds and is affine", "[cavity][property]") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  std::uniform_real_distribution<double> photons(0.0, 5.0);
  std::uniform_real_distribution<double> time(0.0, 100.0);
  for (int i = 0; i < 3000; ++i) {
    const double p0 = prob(gen), n_bar = photons(gen), t = time(gen);
    if (n_bar < 1e-9)
      continue;
    const CavityParams params = cavity(n_bar, 0.5 + prob(gen));
    const double p = evolve_occupation(p0, t, params);
    CHECK(occupation_bounds(p0, params).contains(p, params.trunc_eps()));
    const AffineOccupationMap map = cavity_affine_map(t, params);
    CHECK(std::abs(map(p0) - p) <= 1e-14);
  }
}

TEST_CASE("single-cavity fixed point is the Gibbs occupation", "[cavity]") {
  const AffineOccupationMap identity = cavity_affine_map(0.0, cavity(2.0));
  CHECK(identity.slope == Approx(1.0).margin(1e-11));
  CHECK(identity.offset == Approx(0.0).margin(1e-11));

  for (double n_bar : {0.1, 1.0, 3.0, 4.5}) {
    const CavityParams params = cavity(n_bar, 1.3);
    for (double t : {0.7, 3.1, 42.0}) {
      const AffineOccupationMap map = cavity_affine_map(t, params);
      CHECK(map.fixed_point() == Approx(n_bar / (1.0 + 2.0 * n_bar)).epsilon(1e-12));
      CHECK(std::abs(map.fixed_point() -
                     gibbs_upper(params.delta(), params.bath()).p_upper()) < 1e-12);
    }
    CHECK(std::abs(reachable_region(params).gibbs_point -
                   gibbs_upper(params.delta(), params.bath()).p_upper()) < 1e-12);
  }
}

TEST_CASE("two-cavity cycle fixed point", "[cavity]") {
  // identical cavities share their fixed point
  const CavityParams same = cavity(1.7);
  const auto [pa, pb] =
      cycle_fixed_point(cavity_affine_map(2.3, same), cavity_affine_map(5.9, same));
  const double gibbs = 1.7 / (1.0 + 2.0 * 1.7);
  CHECK(pa == Approx(gibbs).epsilon(1e-12));
  CHECK(pb == Approx(gibbs).epsilon(1e-12));

  // boundary maps: p_b = 3(1 - p_a)/4, p_a = (1 - p_b)/2
  const auto [ba, bb] = cycle_fixed_point(affine_map_from_rabi_sum(0.0, 3.0),
                                          affine_map_from_rabi_sum(0.0, 1.0));
  CHECK(ba == Approx(0.2).epsilon(1e-15));
  CHECK(bb == Approx(0.6).epsilon(1e-15));

  // closed form against iterating the cycle
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const AffineOccupationMap hot = cavity_affine_map(20.0 * u(gen), cavity(0.2 + 4.0 * u(gen), 2.0));
    const AffineOccupationMap cold = cavity_affine_map(20.0 * u(gen), cavity(0.2 + 4.0 * u(gen), 1.0));
    const auto [fa, fb] = cycle_fixed_point(hot, cold);
    double p = u(gen);
    for (int step = 0; step < 10'000; ++step)
      p = cold(hot(p));
    CHECK(std::abs(p - fa) < 1e-12);
    CHECK(std::abs(hot(p) - fb) < 1e-12);
  }

  const AffineOccupationMap id{1.0, 0.0};
  CHECK_THROWS_AS(cycle_fixed_point(id, id), PhysicsError);
  CHECK_THROWS_AS(cycle_fixed_point(cavity_affine_map(0.0, cavity(1.0)),
                                    cavity_affine_map(0.0, cavity(1.0))),
                  PhysicsError);
}

TEST_CASE("maximum cycle work from region overlap", "[cavity]") {
  const GapSchedule gaps(2.0, 1.0);
  const CavityParams hot = cavity(3.0, 2.0);
  const CavityParams cold = cavity(1.0, 1.0);
  CHECK(max_cycle_work_bound(hot, cold, gaps) == Approx(0.4).epsilon(1e-13));
  const auto [pa, pb] = max_work_corner(hot, cold);
  CHECK(pa == Approx(0.2).epsilon(1e-13));
  CHECK(pb == Approx(0.6).epsilon(1e-13));

  const double thermal = thermal_baseline_work(hot.bath(), cold.bath(), gaps);
  CHECK(thermal == Approx(2.0 / 21.0).epsilon(1e-13));
  CHECK(thermal < 0.4);

  // at threshold the regions only touch on the diagonal
  CHECK(max_cycle_work_bound(CavityParams(2.0, 3.0), CavityParams(1.0, 1.5), gaps) == 0.0);
  // below threshold, no overlap at all
  CHECK(max_cycle_work_bound(CavityParams(2.0, 2.0), CavityParams(1.0, 1.5), gaps) == 0.0);
  CHECK(thermal_baseline_work(BathSpec(3.0), BathSpec(1.5), gaps) == 0.0);

  CHECK_THROWS_AS(max_cycle_work_bound(CavityParams(1.0, 3.0), cold, gaps), PhysicsError);
}

TEST_CASE("bound dominates thermal operation", "[cavity][property]") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> temp(0.1, 8.0);
  const GapSchedule gaps(2.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const CavityParams hot(2.0, temp(gen)), cold(1.0, temp(gen));
    const double bound = max_cycle_work_bound(hot, cold, gaps);
    const double thermal = thermal_baseline_work(hot.bath(), cold.bath(), gaps);
    if (extraction_condition(hot.bath(), cold.bath(), gaps)) {
      CHECK(bound >= thermal);
      CHECK(thermal >= 0.0);
    } else {
      CHECK(bound == 0.0);
    }
  }
}

TEST_CASE("golden-section search", "[optimize]") {
  const auto [x, fx] = golden_section_maximize(
      [](double t) { return -(t - 0.3) * (t - 0.3) + 2.0; }, -1.0, 4.0, 1e-10);
  CHECK(x == Approx(0.3).margin(1e-8));
  CHECK(fx == Approx(2.0).margin(1e-15));
  const auto [edge, fedge] = golden_section_maximize([](double t) { return t; }, 0.0, 1.0, 1e-9);
  CHECK(edge == Approx(1.0).margin(1e-8));
  CHECK(fedge <= 1.0);
}

TEST_CASE("contact-time optimization", "[cavity][optimize]") {
  const GapSchedule gaps(2.0, 1.0);
  ContactTimeOptions opts;
  opts.t_max = 20.0;
  opts.grid = 96;

  // empty cavities can only drive the system down
  const ContactTimeResult empty =
      optimize_contact_times(CavityParams(2.0, 1e-3), CavityParams(1.0, 1e-3), gaps, opts);
  CHECK(empty.work == Approx(0.0).margin(1e-15));

  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> temp(0.3, 6.0);
  for (int i = 0; i < 100; ++i) {
    const CavityParams hot(2.0, temp(gen)), cold(1.0, temp(gen));
    opts.grid = 24;
    const ContactTimeResult r = optimize_contact_times(hot, cold, gaps, opts);
    INFO("T1 = " << hot.temperature() << ", T2 = " << cold.temperature());
    CHECK(r.work >= r.coarse_work);
    CHECK(r.work <= r.bound + 1e-12);
    CHECK(r.gap_to_bound == Approx(r.bound - r.work));
    CHECK(r.point.tau1 >= 0.0);
    CHECK(r.point.tau2 <= opts.t_max);
    const double recomputed = cycle_work(r.point.tau1, r.point.tau2, hot, cold, gaps);
    CHECK(recomputed == Approx(r.work).margin(1e-14));
  }

  // far above threshold the optimum beats thermal operation
  const CavityParams hot = cavity(3.0, 2.0), cold = cavity(1.0, 1.0);
  opts.grid = 256;
  opts.t_max = 50.0;
  const ContactTimeResult r = optimize_contact_times(hot, cold, gaps, opts);
  CHECK(r.work > thermal_baseline_work(hot.bath(), cold.bath(), gaps));
  CHECK(r.work <= 0.4 + 1e-12);

  ContactTimeOptions bad;
  bad.grid = 1;
  CHECK_THROWS_AS(optimize_contact_times(hot, cold, gaps, bad), std::invalid_argument);
}

TEST_CASE("region geometry", "[cavity][geometry]") {
  const GapSchedule gaps(2.0, 1.0);
  const RegionGeometry g = region_geometry(cavity(3.0, 2.0), cavity(1.0, 1.0), gaps);
  CHECK(g.has_overlap);
  CHECK(g.max_work == Approx(0.4));
  CHECK(g.corner.first == Approx(0.2));
  CHECK(g.corner.second == Approx(0.6));
  CHECK(g.overlap_area > 0.0);
  bool corner_is_vertex = false;
  for (const Point& v : g.overlap)
    corner_is_vertex |= std::abs(v.first - 0.2) < 1e-12 && std::abs(v.second - 0.6) < 1e-12;
  CHECK(corner_is_vertex);
  // every overlap vertex is reachable in the hot cavity and, reflected, in the cold one
  for (const Point& v : g.overlap) {
    CHECK(g.hot.contains(v.first, v.second, 1e-12));
    CHECK(g.cold.contains(v.second, v.first, 1e-12));
    CHECK(v.second - v.first <= 0.4 + 1e-12);
  }

  const RegionGeometry touch = region_geometry(CavityParams(2.0, 3.0), CavityParams(1.0, 1.5), gaps);
  CHECK_FALSE(touch.has_overlap);
  CHECK(touch.overlap_area == 0.0);
  CHECK(touch.max_work == 0.0);
  // the clipped triangles meet in a single point at threshold
  CHECK(polygon_area(convex_intersection(touch.hot_polygon, touch.reflected_cold_polygon)) <
        1e-15);

  const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon shifted{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  CHECK(polygon_area(convex_intersection(square, shifted)) == Approx(0.25));
  CHECK(polygon_area(hot_region_polygon(cavity(1.0))) == Approx(0.5 * 0.5 / 3.0));
}

TEST_CASE("cavity parameters are validated", "[cavity]") {
  CHECK_THROWS_AS(CavityParams(0.0, 1.0), PhysicsError);
  CHECK_THROWS_AS(CavityParams(1.0, 0.0), PhysicsError);
  CHECK_THROWS_AS(CavityParams(1.0, 1.0, 0.0), PhysicsError);
  CHECK_THROWS_AS(CavityParams(1.0, 1.0, 1.0, 1e-3), PhysicsError);
  CHECK_THROWS_AS(CavityParams(1.0, 1.0, 1.0, 0.0), PhysicsError);
}
