#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "codazzi/error.hpp"
#include "codazzi/metric.hpp"
#include "codazzi/solver.hpp"

using namespace codazzi;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

SolverConfig small_config() {
  SolverConfig c;
  c.t_start = 0.0;
  c.t_end = 0.25;
  c.n_space = 64;
  c.n_time = 32;
  c.epsilon = 0.1;
  return c;
}

double max_abs_diff(const Grid& a, const Grid& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data[k] - b.data[k]));
  return m;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("configuration validation") {
    SolverConfig c = small_config();
    CHECK_NOTHROW(c.validate());
    c.alpha = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = small_config();
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = small_config();
    c.t_end = c.t_start;
    CHECK_THROWS_AS(c.validate(), Error);
    c = small_config();
    c.n_space = 2;
    CHECK_THROWS_AS(c.validate(), Error);
    c = small_config();
    c.epsilon_sweep = {0.1, 0.1};
    CHECK_THROWS_AS(c.validate(), Error);
  }

  TEST_CASE("strip grid") {
    const StripGrid g = small_config().strip();
    CHECK(g.rows == 33);
    CHECK(g.cols == 64);
    CHECK(g.t(32) == doctest::Approx(0.25));
    CHECK(g.period() == doctest::Approx(2 * std::numbers::pi));
  }

  TEST_CASE("rates vanish for the constant state of an ode-1 metric") {
    const Metric m = catenoid(1.0, kSqrt2, 1.0);
    const Invariants w = riemann_invariants(kSqrt2, 0.0);
    RiemannJet jet;
    jet.wp = w.wp;
    jet.wm = w.wm;
    for (double x : {0.0, 0.5, 2.0}) {
      const Rates r = assemble_rates(jet, christoffel(eval_metric(m, x, 0.0)).tilde, 0.1,
                                     Orientation::x_time_like);
      CHECK(std::abs(r.wp) < 1e-12);
      CHECK(std::abs(r.wm) < 1e-12);
    }
  }

  TEST_CASE("constant state is steady on the catenoid") {
    const Metric m = catenoid(1.0, kSqrt2, 1.0);
    SolverConfig c = small_config();
    const RiemannRow row = constant_row(c.n_space, kSqrt2, 0.0);
    const Trajectory traj = march(c, m, row);
    REQUIRE(traj.diag.completed);
    CHECK(traj.grid.rows == c.n_time + 1);
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.w.wp.size(); ++k)
      drift = std::max({drift, std::abs(traj.w.wp.data[k] - row.wp[0]),
                        std::abs(traj.w.wm.data[k] - row.wm[0])});
    CHECK(drift < 1e-12);
  }

  TEST_CASE("viscous rhs is translation equivariant in s") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    const RiemannRow row = perturbed_row(c.region(), c.n_space, 3, 0.02, 7);
    RiemannRow shifted = row;
    std::rotate(shifted.wp.begin(), shifted.wp.begin() + 5, shifted.wp.end());
    std::rotate(shifted.wm.begin(), shifted.wm.begin() + 5, shifted.wm.end());
    const StripGrid g = c.strip();
    const MetricSlice slice = metric_slice(m, g, 0.3);
    const RiemannRow a = viscous_rhs(row, slice, g.ds, c.epsilon, c.orientation);
    const RiemannRow b = viscous_rhs(shifted, slice, g.ds, c.epsilon, c.orientation);
    for (std::size_t j = 0; j < c.n_space; ++j) {
      const std::size_t k = (j + 5) % c.n_space;
      CHECK(b.wp[j] == doctest::Approx(a.wp[k]).epsilon(1e-12));
      CHECK(b.wm[j] == doctest::Approx(a.wm[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("stable step shrinks with the grid") {
    const RiemannRow row = constant_row(64, kSqrt2, 0.0);
    const double ds = 2 * std::numbers::pi / 64;
    const double coarse = stable_step(row, ds, 0.1, Orientation::x_time_like, 0.4);
    const double fine = stable_step(row, ds / 2, 0.1, Orientation::x_time_like, 0.4);
    CHECK(coarse > 0.0);
    CHECK(fine < coarse);
    CHECK(fine >= coarse / 4 * (1 - 1e-12));
  }

  TEST_CASE("perturbed data is reproducible and scaled to the amplitude") {
    const DiamondRegion r(1.3, kSqrt2);
    const RiemannRow a = perturbed_row(r, 128, 3, 0.01, 42);
    const RiemannRow b = perturbed_row(r, 128, 3, 0.01, 42);
    const RiemannRow c = perturbed_row(r, 128, 3, 0.01, 43);
    CHECK(a.wp == b.wp);
    CHECK(a.wm == b.wm);
    CHECK(a.wp != c.wp);
    double sup = 0.0;
    for (std::size_t j = 0; j < 128; ++j) sup = std::max(sup, std::abs(a.wp[j] - r.wp_mid()));
    CHECK(sup == doctest::Approx(0.01).epsilon(1e-9));
  }

  TEST_CASE("mollified constant data stays constant") {
    const DiamondRegion r(1.3, kSqrt2);
    const std::vector<double> q(64, 1.38), th(64, 0.01);
    const RiemannRow row = mollify_initial_data(q, th, r, 2 * std::numbers::pi, 0.3);
    const Invariants w = riemann_invariants(1.38, 0.01);
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(row.wp[j] == doctest::Approx(w.wp).epsilon(1e-12));
      CHECK(row.wm[j] == doctest::Approx(w.wm).epsilon(1e-12));
    }
    const std::vector<double> outside(64, 1.2);
    CHECK_THROWS_AS(mollify_initial_data(outside, th, r, 2 * std::numbers::pi, 0.0), Error);
  }

  TEST_CASE("march is deterministic") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    const RiemannRow row = perturbed_row(c.region(), c.n_space, 3, 0.02, 11);
    const Trajectory a = march(c, m, row);
    const Trajectory b = march(c, m, row);
    REQUIRE(a.diag.completed);
    CHECK(a.w.wp.data == b.w.wp.data);
    CHECK(a.w.wm.data == b.w.wm.data);
    CHECK(a.diag.steps == b.diag.steps);
  }

  TEST_CASE("region policy") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    c.t_end = 1.0;
    const DiamondRegion r = c.region();
    // data touching the edge of the square leaves it as soon as the sources act
    RiemannRow row = constant_row(c.n_space, kSqrt2, 0.0);
    for (std::size_t j = 0; j < c.n_space; ++j) {
      row.wp[j] = r.center() + r.w_beta() - 1e-9;
      row.wm[j] = r.center() - r.w_beta() + 1e-9;
    }
    c.region_policy = RegionPolicy::record;
    const Trajectory rec = march(c, m, row);
    c.region_policy = RegionPolicy::abort;
    const Trajectory ab = march(c, m, row);
    if (rec.diag.breach_events > 0) {
      CHECK(rec.diag.completed);
      CHECK_FALSE(ab.diag.completed);
      REQUIRE(ab.diag.failure_kind.has_value());
      CHECK(*ab.diag.failure_kind == ErrorKind::region);
    } else {
      CHECK(ab.diag.completed);
    }
  }

  TEST_CASE("y time-like march needs a periodic metric") {
    SolverConfig c = small_config();
    c.orientation = Orientation::y_time_like;
    CHECK_THROWS_AS(check_metric_admissible(c, isothermal_helicoid(1.0)), Error);
    const double beta = kSqrt2;
    const Metric cat = catenoid(1.0, beta, catenoid_consistent_kappa0(1.0, beta, BetaRelation::ode2),
                                BetaRelation::ode2);
    const Metric per = periodicize_metric(cat, 2 * std::numbers::pi, beta);
    CHECK_NOTHROW(check_metric_admissible(c, per));
  }

  TEST_CASE("whole plane halves share the data row") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    c.region_policy = RegionPolicy::record;
    const RiemannRow row = perturbed_row(c.region(), c.n_space, 3, 0.02, 5);
    const WholePlaneResult wp = whole_plane_march(c, m, row);
    REQUIRE(wp.forward.diag.completed);
    REQUIRE(wp.backward.diag.completed);
    for (std::size_t j = 0; j < c.n_space; ++j) {
      CHECK(wp.forward.w.wp(0, j) == row.wp[j]);
      CHECK(wp.backward.w.wp(0, j) == row.wp[j]);
      CHECK(wp.backward.w.wm(0, j) == row.wm[j]);
    }
    CHECK(wp.backward.grid.t(wp.backward.grid.rows - 1) == doctest::Approx(-0.25));
    const Trajectory g = glue(wp);
    CHECK(g.grid.rows == 2 * c.n_time + 1);
    CHECK(g.grid.t(0) == doctest::Approx(-0.25));
    CHECK(g.w.wp(c.n_time, 3) == row.wp[3]);
  }

  TEST_CASE("box average") {
    Grid g(4, 8);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 8; ++j) g(i, j) = std::sin(2 * std::numbers::pi * j / 8.0);
    const Grid full = box_average(g, 1, 8);
    for (double v : full.data) CHECK(std::abs(v) < 1e-14);
    const Grid one = box_average(g, 1, 1);
    CHECK(max_abs_diff(one, g) == 0.0);
  }

  TEST_CASE("energy identity and momentum balance on a short run") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    c.n_space = 128;
    c.n_time = 64;
    const RiemannRow row = perturbed_row(c.region(), c.n_space, 3, 0.02, 3);
    const Trajectory traj = march(c, m, row);
    REQUIRE(traj.diag.completed);
    const EnergyRecord e = energy_diagnostics(traj, m);
    CHECK(e.energy > 0.0);
    CHECK(e.energy <= e.bound);
    CHECK(std::abs(e.identity_residual) < 1e-2 * e.bound);
    const BalanceReport b = balance_check(traj, m);
    CHECK(b.max_residual < 1e-2 * std::max(b.scale, 1.0));
  }

  TEST_CASE("sweep stops members in order") {
    const Metric m = isothermal_helicoid(1.0);
    SolverConfig c = small_config();
    c.epsilon_sweep = {0.2, 0.1};
    const RiemannRow row = perturbed_row(c.region(), c.n_space, 3, 0.02, 9);
    const SweepResult s = epsilon_sweep(c, m, row);
    REQUIRE(s.completed);
    REQUIRE(s.members.size() == 2);
    CHECK(s.members[0].epsilon == 0.2);
    CHECK(s.members[1].epsilon == 0.1);
    CHECK(s.weak_distance.size() == 1);
  }
}
