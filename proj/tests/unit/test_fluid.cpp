#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "codazzi/error.hpp"
#include "codazzi/fluid.hpp"
#include "codazzi/metric.hpp"

using namespace codazzi;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

struct Sampler {
  std::mt19937_64 rng{20240611};
  double q() { return std::uniform_real_distribution<double>(1.05, 3.0)(rng); }
  double theta() { return std::uniform_real_distribution<double>(-1.4, 1.4)(rng); }
};

}  // namespace

TEST_SUITE("fluid") {
  TEST_CASE("Bernoulli relation") {
    const BernoulliValues b = bernoulli(kSqrt2);
    CHECK(b.rho == doctest::Approx(1.0));
    CHECK(b.p == doctest::Approx(-1.0));
    CHECK_THROWS_AS(bernoulli(1.0), Error);
    CHECK_THROWS_AS(bernoulli(0.5), Error);
  }

  TEST_CASE("second form at the reference state") {
    const ScaledForm f = fluid_to_second_form(kSqrt2, 0.0);
    CHECK(f.Lt == doctest::Approx(-1.0));
    CHECK(f.Mt == doctest::Approx(0.0));
    CHECK(f.Nt == doctest::Approx(1.0));
  }

  TEST_CASE("scaled constraint holds for any state") {
    Sampler s;
    for (int k = 0; k < 1000; ++k) {
      const ScaledForm f = fluid_to_second_form(s.q(), s.theta());
      CHECK(std::abs(f.Lt * f.Nt - f.Mt * f.Mt + 1.0) < 1e-10);
    }
  }

  TEST_CASE("Riemann invariant round trip") {
    Sampler s;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double q = s.q(), th = s.theta();
      const Invariants w = riemann_invariants(q, th);
      const FluidPoint p = invariants_to_state(w.wp, w.wm);
      worst = std::max({worst, std::abs(p.q - q) / q, std::abs(p.theta - th)});
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("second form round trip") {
    Sampler s;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double q = s.q(), th = s.theta();
      const FluidPoint p = second_form_to_fluid(fluid_to_second_form(q, th), th + 0.2);
      worst = std::max({worst, std::abs(p.q - q), std::abs(p.theta - th)});
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("inverse rejects forms off the constraint") {
    CHECK_THROWS_AS(second_form_to_fluid({-1.0, 0.0, 2.0}, 0.0), Error);
  }

  TEST_CASE("wave speeds at the reference state have the marching signs") {
    const WaveSpeeds w = wave_speeds(kSqrt2, 0.0);
    CHECK(w.lambda_p == doctest::Approx(1.0));
    CHECK(w.lambda_m == doctest::Approx(-1.0));
    CHECK(w.mu_p == doctest::Approx(-1.0));
    CHECK(w.mu_m == doctest::Approx(-1.0));
    const WaveSpeeds y = wave_speeds(kSqrt2, std::numbers::pi / 2);
    CHECK(y.mu_p > 0.0);
    CHECK(y.mu_m < 0.0);
  }

  TEST_CASE("characteristic speeds solve the coefficient eigenproblem") {
    Sampler s;
    for (int k = 0; k < 50; ++k) {
      const double q = s.q(), th = s.theta();
      const CoefficientMatrices c = coefficient_matrices(q, th);
      const WaveSpeeds w = wave_speeds(q, th);
      // left eigenvectors: det(μ·Ax - λ·Ay) = 0 for each (λ±, μ±) pair
      for (auto [l, m] : {std::pair{w.lambda_p, w.mu_p}, std::pair{w.lambda_m, w.mu_m}}) {
        const double a = m * c.ax[0] - l * c.ay[0], b = m * c.ax[1] - l * c.ay[1];
        const double cc = m * c.ax[2] - l * c.ay[2], d = m * c.ax[3] - l * c.ay[3];
        CHECK(std::abs(a * d - b * cc) < 1e-10 * (std::abs(a * d) + std::abs(b * cc) + 1));
      }
    }
  }

  TEST_CASE("sources vanish at the constant state on an ode-1 metric") {
    const Metric m = catenoid(1.0, kSqrt2, 1.0);
    for (double x : {-1.0, 0.0, 0.6, 1.7}) {
      const Symbols t = christoffel(eval_metric(m, x, 0.0)).tilde;
      const SourceTerms s = source_terms(kSqrt2, 0.0, t);
      CHECK(std::abs(s.S1) < 1e-12);
      CHECK(std::abs(s.S2) < 1e-12);
    }
  }

  TEST_CASE("zero curves of the source combination") {
    const Metric m = isothermal_helicoid(1.0);
    const Symbols t = christoffel(eval_metric(m, 0.8, 0.0)).tilde;
    for (double q : {1.2, 1.3, 1.38}) {
      const auto [tp, tm] = theta_zero_curves(q, kSqrt2);
      CHECK(tm == doctest::Approx(-tp));
      // on an ode-1 metric the + combination vanishes on θ₊ and the - combination on θ₋
      const auto [plus_at_tp, minus_at_tp] = source_combinations_closed_form(q, tp, t);
      const auto [plus_at_tm, minus_at_tm] = source_combinations_closed_form(q, tm, t);
      const double scale = std::abs(t.s111) + std::abs(t.s122) + std::abs(t.s212);
      CHECK(std::min(std::abs(plus_at_tp), std::abs(minus_at_tp)) < 1e-10 * scale);
      CHECK(std::min(std::abs(plus_at_tm), std::abs(minus_at_tm)) < 1e-10 * scale);
    }
  }

  TEST_CASE("diamond region") {
    CHECK_THROWS_AS(DiamondRegion(1.5, 1.4), Error);
    CHECK_THROWS_AS(DiamondRegion(0.9, 1.4), Error);
    const DiamondRegion r(1.3, kSqrt2);
    CHECK(r.center() == 0.0);
    CHECK(r.contains(kSqrt2, 0.0));
    CHECK(r.contains(1.35, 0.0));
    CHECK_FALSE(r.contains(1.2, 0.0));
    CHECK_FALSE(r.contains(1.35, 0.5));
    CHECK(r.breach(r.wp_mid(), r.wm_mid()) == 0.0);
    CHECK(r.breach(r.w_beta() + 0.1, r.wm_mid()) == doctest::Approx(0.1));
    const DiamondRegion y(1.3, kSqrt2, Orientation::y_time_like);
    CHECK(y.center() == doctest::Approx(std::numbers::pi / 2));
    CHECK(y.contains(1.35, std::numbers::pi / 2));
  }

  TEST_CASE("grid conversions agree with the pointwise ones") {
    RiemannState w{Grid(2, 3), Grid(2, 3)};
    Sampler s;
    for (std::size_t k = 0; k < 6; ++k) {
      const Invariants i = riemann_invariants(s.q(), s.theta());
      w.wp.data[k] = i.wp;
      w.wm.data[k] = i.wm;
    }
    const FluidState f = invariants_to_fluid(w);
    const RiemannState back = fluid_to_invariants(f);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(back.wp.data[k] == doctest::Approx(w.wp.data[k]).epsilon(1e-12));
      CHECK(back.wm.data[k] == doctest::Approx(w.wm.data[k]).epsilon(1e-12));
    }
    Grid gamma(2, 3, 0.5), sq(2, 3, 2.0);
    const SecondForm form = fluid_to_second_form(f, gamma, sq);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(form.L.data[k] == doctest::Approx(0.5 * form.Lt.data[k]));
      CHECK(form.h22.data[k] == doctest::Approx(1.0 * form.Nt.data[k]));
      // LN - M² = κ = -γ²
      CHECK(form.L.data[k] * form.N.data[k] - form.M.data[k] * form.M.data[k] ==
            doctest::Approx(-0.25).epsilon(1e-10));
    }
    CHECK(form.constraint_max < 1e-10);
  }
}
