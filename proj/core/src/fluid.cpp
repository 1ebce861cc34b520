#include "codazzi/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "codazzi/error.hpp"

namespace codazzi {

namespace {

constexpr double pi = std::numbers::pi;

void require_supersonic(double q, double guard) {
  if (!(q > 1.0 + guard)) {
    std::ostringstream os;
    os << "speed q = " << q << " is at or below the sonic guard 1 + " << guard;
    fail(ErrorKind::sonic, os.str());
  }
}

}  // namespace

std::string_view to_string(Orientation o) {
  return o == Orientation::x_time_like ? "x-time-like" : "y-time-like";
}

BernoulliValues bernoulli(double q, double sonic_guard) {
  require_supersonic(q, sonic_guard);
  const double c = std::sqrt(q * q - 1.0);
  return {1.0 / c, -c};
}

ScaledForm fluid_to_second_form(double q, double theta, double sonic_guard) {
  const BernoulliValues b = bernoulli(q, sonic_guard);
  const double u = q * std::cos(theta), v = q * std::sin(theta);
  return {b.rho * v * v + b.p, -b.rho * u * v, b.rho * u * u + b.p};
}

FluidPoint second_form_to_fluid(const ScaledForm& f, double reference_angle,
                                double constraint_tolerance) {
  const double c = f.Lt * f.Nt - f.Mt * f.Mt;
  if (!std::isfinite(c) || std::abs(c + 1.0) > constraint_tolerance) {
    std::ostringstream os;
    os << "second form violates L~N~ - M~^2 = -1 (value " << c << ")";
    fail(ErrorKind::numerical, os.str());
  }
  // p² - (L̃ + Ñ) p + (L̃Ñ - M̃²) = 0, negative root.
  const double s = f.Lt + f.Nt;
  const double disc = s * s - 4.0 * c;
  const double p = 0.5 * (s - std::sqrt(disc));
  if (!(p < 0.0)) fail(ErrorKind::numerical, "no negative pressure root");
  const double rho = -1.0 / p;
  const double u2 = std::max(0.0, p * (p - f.Nt));
  const double v2 = std::max(0.0, p * (p - f.Lt));
  const double au = std::sqrt(u2), av = std::sqrt(v2);
  // uv = -M̃/ρ
  const double uv = -f.Mt / rho;
  const double v = uv >= 0.0 ? av : -av;
  const double theta0 = std::atan2(v, au);
  const double k = std::round((reference_angle - theta0) / pi);
  return {std::sqrt(u2 + v2), theta0 + k * pi};
}

Invariants riemann_invariants(double q, double theta) {
  if (!(q >= 1.0)) {
    std::ostringstream os;
    os << "Riemann invariants need q >= 1, got " << q;
    fail(ErrorKind::sonic, os.str());
  }
  const double phi = std::acos(1.0 / q);
  return {theta + phi, theta - phi};
}

FluidPoint invariants_to_state(double wp, double wm) {
  const double half = 0.5 * (wp - wm);
  if (!(half >= 0.0) || !(half < 0.5 * pi)) {
    std::ostringstream os;
    os << "invariant gap (W+ - W-)/2 = " << half << " outside [0, pi/2)";
    fail(ErrorKind::sonic, os.str());
  }
  return {1.0 / std::cos(half), 0.5 * (wp + wm)};
}

WaveSpeeds wave_speeds(double q, double theta, double sonic_guard) {
  require_supersonic(q, sonic_guard);
  const double r = 1.0 / std::sqrt(q * q - 1.0);
  const double s = std::sin(theta), c = std::cos(theta);
  return {s + c * r, s - c * r, -c + s * r, -c - s * r};
}

CoefficientMatrices coefficient_matrices(double q, double theta, double sonic_guard) {
  require_supersonic(q, sonic_guard);
  const double s = std::sin(theta), c = std::cos(theta);
  const double k = 1.0 / (q * (q * q - 1.0));
  return {{s, q * c, k * c, s}, {-c, q * s, k * s, -c}};
}

std::pair<double, double> source_combinations_closed_form(double q, double theta,
                                                          const Symbols& t) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double iq2 = 1.0 / (q * q);
  const double A1 = t.s122 * c * c - 2.0 * t.s112 * s * c + t.s111 * s * s - (t.s122 + t.s111) * iq2;
  const double A2 = t.s222 * c * c - 2.0 * t.s212 * s * c + t.s211 * s * s - (t.s222 + t.s211) * iq2;
  const double base = -q * s * A1 + q * c * A2;
  const double over_rho = std::sqrt(q * q - 1.0);  // 1/ρ
  const double tail = q * over_rho * (c * A1 + s * A2);
  return {base + tail, base - tail};
}

SourceTerms source_terms(double q, double theta, const Symbols& t, double sonic_guard) {
  const BernoulliValues b = bernoulli(q, sonic_guard);
  const double u = q * std::cos(theta), v = q * std::sin(theta);
  const double Lt = b.rho * v * v + b.p, Mt = -b.rho * u * v, Nt = b.rho * u * u + b.p;
  SourceTerms r;
  r.R1 = -Lt * t.s222 + 2.0 * Mt * t.s212 - Nt * t.s211;
  r.R2 = -Lt * t.s122 + 2.0 * Mt * t.s112 - Nt * t.s111;
  const double q2 = q * q;
  r.S1 = -(v * r.R2 - u * r.R1) / (b.rho * q2);
  r.S2 = (v * r.R1 + u * r.R2) / q2;
  r.plus = r.S1 + (q2 - 1.0) * r.S2;
  r.minus = r.S1 - (q2 - 1.0) * r.S2;

  const auto [cp, cm] = source_combinations_closed_form(q, theta, t);
  const double scale =
      std::max({1.0, std::abs(r.plus), std::abs(r.minus), std::abs(cp), std::abs(cm)});
  if (std::abs(cp - r.plus) > 1e-10 * scale || std::abs(cm - r.minus) > 1e-10 * scale) {
    std::ostringstream os;
    os << "source combinations disagree: composition (" << r.plus << ", " << r.minus
       << ") closed form (" << cp << ", " << cm << ")";
    fail(ErrorKind::numerical, os.str());
  }
  return r;
}

std::pair<double, double> theta_zero_curves(double q, double beta) {
  if (!(q > 1.0)) fail(ErrorKind::sonic, "theta zero curves need q > 1");
  if (!(beta > 1.0)) fail(ErrorKind::config, "beta must exceed 1");
  const double b2 = beta * beta, q2 = q * q;
  const double den = b2 - (b2 - 1.0) * q2;
  if (std::abs(den) < 1e-12 * b2) {
    std::ostringstream os;
    os << "q = " << q << " sits on the vertical asymptote q = beta/sqrt(beta^2-1) of the zero "
       << "curves";
    fail(ErrorKind::numerical, os.str());
  }
  const double tp = std::atan(std::sqrt(q2 - 1.0) * (b2 - q2) / den);
  return {tp, -tp};
}

DiamondRegion::DiamondRegion(double alpha, double beta, Orientation orientation)
    : alpha_(alpha),
      beta_(beta),
      center_(orientation == Orientation::x_time_like ? 0.0 : 0.5 * pi),
      orientation_(orientation) {
  if (!(alpha > 1.0) || !(beta > alpha)) {
    std::ostringstream os;
    os << "diamond region needs 1 < alpha < beta, got alpha = " << alpha << ", beta = " << beta;
    fail(ErrorKind::config, os.str());
  }
  wa_ = std::acos(1.0 / alpha);
  wb_ = std::acos(1.0 / beta);
  constexpr int n = 256;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wp = center_ + wa_ + (wb_ - wa_) * i / (n - 1);
      const double wm = center_ - wb_ + (wb_ - wa_) * j / (n - 1);
      const FluidPoint st = invariants_to_state(wp, wm);
      const WaveSpeeds sp = wave_speeds(st.q, st.theta);
      const bool ok = orientation == Orientation::x_time_like
                          ? (sp.lambda_p > 0.0 && sp.lambda_m < 0.0)
                          : (sp.mu_p > 0.0 && sp.mu_m < 0.0);
      if (!ok) {
        std::ostringstream os;
        os << "time-like speeds lose their sign inside the diamond at (q, theta) = (" << st.q
           << ", " << st.theta << ")";
        fail(ErrorKind::region, os.str());
      }
    }
  }
}

double DiamondRegion::breach(double wp, double wm) const {
  const double a = wp - center_, b = wm - center_;
  return std::max({0.0, wa_ - a, a - wb_, -wb_ - b, b + wa_});
}

bool DiamondRegion::contains_invariants(double wp, double wm, double pad) const {
  return breach(wp, wm) <= pad;
}

bool DiamondRegion::contains(double q, double theta) const {
  const Invariants w = riemann_invariants(q, theta);
  return contains_invariants(w.wp, w.wm);
}

bool diamond_contains(const DiamondRegion& region, double q, double theta) {
  return region.contains(q, theta);
}

FluidState invariants_to_fluid(const RiemannState& w) {
  FluidState f{Grid(w.wp.rows, w.wp.cols), Grid(w.wp.rows, w.wp.cols)};
  for (std::size_t k = 0; k < w.wp.size(); ++k) {
    const FluidPoint p = invariants_to_state(w.wp.data[k], w.wm.data[k]);
    f.q.data[k] = p.q;
    f.theta.data[k] = p.theta;
  }
  return f;
}

RiemannState fluid_to_invariants(const FluidState& f) {
  RiemannState w{Grid(f.q.rows, f.q.cols), Grid(f.q.rows, f.q.cols)};
  for (std::size_t k = 0; k < f.q.size(); ++k) {
    const Invariants r = riemann_invariants(f.q.data[k], f.theta.data[k]);
    w.wp.data[k] = r.wp;
    w.wm.data[k] = r.wm;
  }
  return w;
}

SecondForm fluid_to_second_form(const FluidState& state, const Grid& gamma, const Grid& sqrt_det,
                                double sonic_guard) {
  const std::size_t r = state.q.rows, c = state.q.cols;
  if (gamma.rows != r || gamma.cols != c || sqrt_det.rows != r || sqrt_det.cols != c)
    fail(ErrorKind::config, "second form grids are not aligned");
  SecondForm out;
  for (Grid* g : {&out.Lt, &out.Mt, &out.Nt, &out.L, &out.M, &out.N, &out.h11, &out.h12, &out.h22})
    *g = Grid(r, c);
  for (std::size_t k = 0; k < state.q.size(); ++k) {
    const ScaledForm s = fluid_to_second_form(state.q.data[k], state.theta.data[k], sonic_guard);
    const double gm = gamma.data[k], sd = sqrt_det.data[k];
    out.Lt.data[k] = s.Lt;
    out.Mt.data[k] = s.Mt;
    out.Nt.data[k] = s.Nt;
    out.L.data[k] = gm * s.Lt;
    out.M.data[k] = gm * s.Mt;
    out.N.data[k] = gm * s.Nt;
    out.h11.data[k] = sd * gm * s.Lt;
    out.h12.data[k] = sd * gm * s.Mt;
    out.h22.data[k] = sd * gm * s.Nt;
    out.constraint_max = std::max(out.constraint_max, std::abs(s.Lt * s.Nt - s.Mt * s.Mt + 1.0));
  }
  return out;
}

FluidState second_form_to_fluid(const SecondForm& form, const Grid& reference_angle,
                                double constraint_tolerance) {
  const std::size_t r = form.Lt.rows, c = form.Lt.cols;
  FluidState f{Grid(r, c), Grid(r, c)};
  for (std::size_t k = 0; k < form.Lt.size(); ++k) {
    const FluidPoint p =
        second_form_to_fluid({form.Lt.data[k], form.Mt.data[k], form.Nt.data[k]},
                             reference_angle.data[k], constraint_tolerance);
    f.q.data[k] = p.q;
    f.theta.data[k] = p.theta;
  }
  return f;
}

}  // namespace codazzi
