#include "codazzi/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "codazzi/numerics.hpp"

namespace codazzi {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

void SolverConfig::validate() const {
  std::ostringstream os;
  if (!(t_end > t_start)) os << "t_end must exceed t_start; ";
  if (!(period > 0.0)) os << "period must be positive; ";
  if (n_space < 16) os << "n_space must be at least 16; ";
  if (n_time < 1) os << "n_time must be at least 1; ";
  if (!(epsilon > 0.0)) os << "viscosity epsilon must be positive (the viscous march needs eps > 0); ";
  for (double e : epsilon_sweep)
    if (!(e > 0.0)) os << "every sweep epsilon must be positive; ";
  for (std::size_t k = 1; k < epsilon_sweep.size(); ++k)
    if (!(epsilon_sweep[k] < epsilon_sweep[k - 1])) {
      os << "sweep epsilons must be strictly decreasing; ";
      break;
    }
  if (!(safety > 0.0) || safety > 1.0) os << "safety factor must lie in (0, 1]; ";
  if (!(region_tolerance >= 0.0)) os << "region tolerance must be non-negative; ";
  if (!(alpha > 1.0) || !(beta > alpha)) os << "diamond region needs 1 < alpha < beta; ";
  const std::string msg = os.str();
  if (!msg.empty()) fail(ErrorKind::config, msg.substr(0, msg.size() - 2));
}

StripGrid SolverConfig::strip() const {
  StripGrid g;
  g.orientation = orientation;
  g.t0 = t_start;
  g.dt = (t_end - t_start) / static_cast<double>(n_time);
  g.rows = n_time + 1;
  g.s0 = -0.5 * period;
  g.ds = period / static_cast<double>(n_space);
  g.cols = n_space;
  return g;
}

MetricSlice metric_slice(const Metric& metric, const StripGrid& grid, double t) {
  MetricSlice slice;
  slice.tilde.resize(grid.cols);
  if (grid.orientation == Orientation::x_time_like && metric.is_x_isothermal()) {
    const Symbols s = christoffel(eval_metric(metric, t, 0.0)).tilde;
    std::fill(slice.tilde.begin(), slice.tilde.end(), s);
    return slice;
  }
  for (std::size_t j = 0; j < grid.cols; ++j) {
    const double s = grid.s(j);
    const double x = grid.orientation == Orientation::x_time_like ? t : s;
    const double y = grid.orientation == Orientation::x_time_like ? s : t;
    slice.tilde[j] = christoffel(eval_metric(metric, x, y)).tilde;
  }
  return slice;
}

Rates assemble_rates(const RiemannJet& j, const Symbols& tilde, double eps, Orientation o,
                     double guard) {
  const FluidPoint st = invariants_to_state(j.wp, j.wm);
  const double q = st.q;
  if (!(q > 1.0 + guard)) {
    std::ostringstream os;
    os << "sonic degeneracy in the march: q = " << q;
    fail(ErrorKind::sonic, os.str());
  }
  const double phi = 0.5 * (j.wp - j.wm);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double root = std::sqrt(q * q - 1.0);
  const double rho = 1.0 / root;
  const WaveSpeeds ws = wave_speeds(q, st.theta, guard);
  const bool xt = o == Orientation::x_time_like;
  const double tau_p = xt ? ws.lambda_p : ws.mu_p;
  const double tau_m = xt ? ws.lambda_m : ws.mu_m;
  const double sig_p = xt ? ws.mu_p : ws.lambda_p;
  const double sig_m = xt ? ws.mu_m : ws.lambda_m;
  if (!(tau_p > 0.0) || !(tau_m < 0.0)) {
    std::ostringstream os;
    os << "time-like speeds lost their sign at (q, theta) = (" << q << ", " << st.theta << ")";
    fail(ErrorKind::region, os.str());
  }
  const SourceTerms src = source_terms(q, st.theta, tilde, guard);

  const double phi_s = 0.5 * (j.wp_s - j.wm_s);
  const double rhoq_s = -cp / (sp * sp) * phi_s;  // ρq = 1/sin φ
  const double k = q * root;
  const double num_p = eps * j.wp_ss + 2.0 * eps * q / rho * j.wp_s * rhoq_s +
                       eps / rho * j.wp_s * j.wp_s + src.minus - k * sig_p * j.wp_up;
  const double num_m = -eps * j.wm_ss - 2.0 * eps * q / rho * j.wm_s * rhoq_s +
                       eps / rho * j.wm_s * j.wm_s - src.plus - k * sig_m * j.wm_up;
  return {num_p / (k * tau_p), num_m / (k * tau_m)};
}

namespace {

/// Transverse advection speed σ/τ of each family at a node.
std::pair<double, double> transverse_speeds(double wp, double wm, Orientation o, double guard) {
  const FluidPoint st = invariants_to_state(wp, wm);
  const WaveSpeeds ws = wave_speeds(st.q, st.theta, guard);
  if (o == Orientation::x_time_like) return {ws.mu_p / ws.lambda_p, ws.mu_m / ws.lambda_m};
  return {ws.lambda_p / ws.mu_p, ws.lambda_m / ws.mu_m};
}

double upwind(const std::vector<double>& w, std::size_t j, double speed, double ds) {
  const std::size_t n = w.size();
  const long i = static_cast<long>(j);
  if (speed > 0.0) {
    return (3.0 * w[j] - 4.0 * w[wrap_index(i - 1, n)] + w[wrap_index(i - 2, n)]) / (2.0 * ds);
  }
  return (-3.0 * w[j] + 4.0 * w[wrap_index(i + 1, n)] - w[wrap_index(i + 2, n)]) / (2.0 * ds);
}

}  // namespace

RiemannRow viscous_rhs(const RiemannRow& row, const MetricSlice& slice, double ds, double eps,
                       Orientation o, double guard) {
  const std::size_t n = row.wp.size();
  RiemannRow out{std::vector<double>(n), std::vector<double>(n)};
  const double inv2 = 1.0 / (2.0 * ds), invsq = 1.0 / (ds * ds);
  for (std::size_t j = 0; j < n; ++j) {
    const long i = static_cast<long>(j);
    const std::size_t l = wrap_index(i - 1, n), r = wrap_index(i + 1, n);
    RiemannJet jet;
    jet.wp = row.wp[j];
    jet.wm = row.wm[j];
    jet.wp_s = (row.wp[r] - row.wp[l]) * inv2;
    jet.wm_s = (row.wm[r] - row.wm[l]) * inv2;
    jet.wp_ss = (row.wp[r] - 2.0 * row.wp[j] + row.wp[l]) * invsq;
    jet.wm_ss = (row.wm[r] - 2.0 * row.wm[j] + row.wm[l]) * invsq;
    const auto [cp, cm] = transverse_speeds(jet.wp, jet.wm, o, guard);
    jet.wp_up = upwind(row.wp, j, cp, ds);
    jet.wm_up = upwind(row.wm, j, cm, ds);
    const Rates r8 = assemble_rates(jet, slice.tilde[j], eps, o, guard);
    out.wp[j] = r8.wp;
    out.wm[j] = r8.wm;
  }
  return out;
}

double stable_step(const RiemannRow& row, double ds, double eps, Orientation o, double safety,
                   double guard) {
  double rate = 0.0;
  for (std::size_t j = 0; j < row.wp.size(); ++j) {
    const FluidPoint st = invariants_to_state(row.wp[j], row.wm[j]);
    const WaveSpeeds ws = wave_speeds(st.q, st.theta, guard);
    const double k = st.q * std::sqrt(st.q * st.q - 1.0);
    const bool xt = o == Orientation::x_time_like;
    const double tp = std::abs(xt ? ws.lambda_p : ws.mu_p);
    const double tm = std::abs(xt ? ws.lambda_m : ws.mu_m);
    const double cp = std::abs(xt ? ws.mu_p : ws.lambda_p) / tp;
    const double cm = std::abs(xt ? ws.mu_m : ws.lambda_m) / tm;
    const double dp = eps / (k * tp), dm = eps / (k * tm);
    rate = std::max(rate, 2.0 * dp / (ds * ds) + cp / ds);
    rate = std::max(rate, 2.0 * dm / (ds * ds) + cm / ds);
  }
  return safety / rate;
}

void check_metric_admissible(const SolverConfig& config, const Metric& metric) {
  if (!metric.is_x_isothermal())
    fail(ErrorKind::structure, "the march needs a metric with F = 0 and E = G = E(x)");
  if (config.orientation == Orientation::y_time_like) {
    const double P = metric.period_x();
    if (!(P > 0.0) || std::abs(P - config.period) > 1e-12 * config.period)
      fail(ErrorKind::structure,
           "y time-like marching needs a metric periodic in x with the solver period; "
           "periodicize the metric first");
  } else {
    const Interval d = metric.domain_x();
    if (!d.contains(config.t_start) || !d.contains(config.t_end))
      fail(ErrorKind::domain, "time-like extent leaves the metric domain");
  }
}

namespace {

RiemannRow axpy(const RiemannRow& a, double h, const RiemannRow& k) {
  RiemannRow r = a;
  for (std::size_t j = 0; j < a.wp.size(); ++j) {
    r.wp[j] += h * k.wp[j];
    r.wm[j] += h * k.wm[j];
  }
  return r;
}

struct StepOutcome {
  RiemannRow row;
  double max_breach = 0.0;
  std::size_t breached = 0;
};

}  // namespace

Trajectory march(const SolverConfig& config, const Metric& metric, const RiemannRow& initial) {
  config.validate();
  check_metric_admissible(config, metric);
  const DiamondRegion region = config.region();
  const StripGrid grid = config.strip();
  if (initial.wp.size() != grid.cols || initial.wm.size() != grid.cols)
    fail(ErrorKind::config, "initial row length does not match n_space");
  for (std::size_t j = 0; j < grid.cols; ++j) {
    if (region.breach(initial.wp[j], initial.wm[j]) > config.region_tolerance) {
      std::ostringstream os;
      os << "initial data leaves the diamond region at s = " << grid.s(j);
      fail(ErrorKind::region, os.str());
    }
  }

  Trajectory traj;
  traj.epsilon = config.epsilon;
  traj.grid = grid;
  traj.w = RiemannState{Grid(grid.rows, grid.cols), Grid(grid.rows, grid.cols)};
  auto store = [&](std::size_t i, const RiemannRow& r) {
    std::copy(r.wp.begin(), r.wp.end(), traj.w.wp.data.begin() + i * grid.cols);
    std::copy(r.wm.begin(), r.wm.end(), traj.w.wm.data.begin() + i * grid.cols);
  };
  auto truncate = [&](std::size_t rows) {
    traj.grid.rows = rows;
    traj.w.wp.rows = traj.w.wm.rows = rows;
    traj.w.wp.data.resize(rows * grid.cols);
    traj.w.wm.data.resize(rows * grid.cols);
  };
  store(0, initial);

  const bool y_static = config.orientation == Orientation::y_time_like;
  MetricSlice static_slice;
  if (y_static) static_slice = metric_slice(metric, grid, config.t_start);
  auto slice_at = [&](double t) { return y_static ? static_slice : metric_slice(metric, grid, t); };

  const double eps = config.epsilon;
  const double ds = grid.ds;
  const double span = config.t_end - config.t_start;
  MarchDiagnostics& d = traj.diag;
  d.min_dt = std::numeric_limits<double>::infinity();

  auto heun = [&](const RiemannRow& w, double t, double dt) {
    const RiemannRow k1 = viscous_rhs(w, slice_at(t), ds, eps, config.orientation, config.sonic_guard);
    const RiemannRow mid = axpy(w, dt, k1);
    const RiemannRow k2 =
        viscous_rhs(mid, slice_at(t + dt), ds, eps, config.orientation, config.sonic_guard);
    StepOutcome out;
    out.row = w;
    for (std::size_t j = 0; j < w.wp.size(); ++j) {
      out.row.wp[j] += 0.5 * dt * (k1.wp[j] + k2.wp[j]);
      out.row.wm[j] += 0.5 * dt * (k1.wm[j] + k2.wm[j]);
      if (!std::isfinite(out.row.wp[j]) || !std::isfinite(out.row.wm[j]))
        fail(ErrorKind::numerical, "non-finite value in the march");
      const double b = region.breach(out.row.wp[j], out.row.wm[j]);
      out.max_breach = std::max(out.max_breach, b);
      if (b > config.region_tolerance) ++out.breached;
    }
    return out;
  };

  RiemannRow w = initial;
  double t = config.t_start;
  std::size_t stored = 1;
  try {
    for (std::size_t k = 1; k <= config.n_time; ++k) {
      const double target = config.t_start + span * static_cast<double>(k) / config.n_time;
      while (t < target) {
        double dt = stable_step(w, ds, eps, config.orientation, config.safety, config.sonic_guard);
        const double remain = target - t;
        if (remain <= dt * (1.0 + 1e-12))
          dt = remain;
        else if (remain < 2.0 * dt)
          dt = 0.5 * remain;
        if (dt < 1e-14 * span) fail(ErrorKind::numerical, "time step underflow");
        if (++d.steps > config.max_steps) fail(ErrorKind::numerical, "step budget exhausted");

        StepOutcome out = heun(w, t, dt);
        if (out.breached > 0) {
          ++d.retries;
          dt *= 0.5;
          out = heun(w, t, dt);
        }
        d.max_breach = std::max(d.max_breach, out.max_breach);
        if (out.breached > 0) {
          if (d.breach_steps == 0) d.first_breach_t = t + dt;
          ++d.breach_steps;
          d.breach_events += out.breached;
          if (config.region_policy == RegionPolicy::abort) {
            std::ostringstream os;
            os << "invariant region breached by " << out.max_breach << " at t = " << t + dt
               << " (" << out.breached << " nodes)";
            fail(ErrorKind::region, os.str());
          }
        }
        d.min_dt = std::min(d.min_dt, dt);
        d.max_dt = std::max(d.max_dt, dt);
        w = std::move(out.row);
        t = (target - (t + dt) < 1e-13 * span) ? target : t + dt;
      }
      store(k, w);
      stored = k + 1;
    }
    d.completed = true;
  } catch (const Error& e) {
    d.completed = false;
    d.failure_kind = e.kind();
    d.failure = e.what();
    truncate(stored);
  }
  if (!std::isfinite(d.min_dt)) d.min_dt = 0.0;
  return traj;
}

RiemannRow constant_row(std::size_t n, double q, double theta) {
  const Invariants w = riemann_invariants(q, theta);
  return {std::vector<double>(n, w.wp), std::vector<double>(n, w.wm)};
}

RiemannRow mollify_initial_data(const std::vector<double>& q0, const std::vector<double>& theta0,
                                const DiamondRegion& region, double period, double width) {
  if (q0.size() != theta0.size() || q0.size() < 4)
    fail(ErrorKind::config, "initial samples must be aligned and non-trivial");
  const std::size_t n = q0.size();
  RiemannRow row{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const Invariants w = riemann_invariants(q0[j], theta0[j]);
    if (!region.contains_invariants(w.wp, w.wm)) {
      std::ostringstream os;
      os << "initial sample " << j << " (q, theta) = (" << q0[j] << ", " << theta0[j]
         << ") lies outside the diamond region";
      fail(ErrorKind::region, os.str());
    }
    row.wp[j] = w.wp;
    row.wm[j] = w.wm;
  }
  if (width > 0.0) {
    const double cells = width / (period / static_cast<double>(n));
    if (cells >= 1.0) {
      row.wp = periodic_mollify(row.wp, cells);
      row.wm = periodic_mollify(row.wm, cells);
    }
  }
  return row;
}

RiemannRow perturbed_row(const DiamondRegion& region, std::size_t n, int modes, double amplitude,
                         std::uint64_t seed) {
  if (modes < 1) fail(ErrorKind::config, "perturbation needs at least one mode");
  if (!(amplitude >= 0.0) || amplitude >= 0.5 * region.wp_extent())
    fail(ErrorKind::config, "perturbation amplitude must keep the data inside the diamond region");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto series = [&]() {
    std::vector<double> a(modes), b(modes);
    for (int k = 0; k < modes; ++k) {
      a[k] = coef(rng);
      b[k] = coef(rng);
    }
    std::vector<double> f(n, 0.0);
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
      for (int k = 0; k < modes; ++k)
        f[j] += a[k] * std::cos((k + 1) * s) + b[k] * std::sin((k + 1) * s);
      sup = std::max(sup, std::abs(f[j]));
    }
    if (sup > 0.0)
      for (double& v : f) v *= amplitude / sup;
    return f;
  };
  const std::vector<double> dp = series();
  const std::vector<double> dm = series();
  RiemannRow row{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    row.wp[j] = region.wp_mid() + dp[j];
    row.wm[j] = region.wm_mid() + dm[j];
  }
  return row;
}

StripMetricFields strip_metric_fields(const Metric& metric, const StripGrid& grid) {
  StripMetricFields f{Grid(grid.rows, grid.cols), Grid(grid.rows, grid.cols),
                      Grid(grid.rows, grid.cols)};
  const bool x_only = metric.is_x_isothermal();
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      MetricValues v;
      if (x_only && grid.orientation == Orientation::x_time_like && j > 0) {
        f.gamma(i, j) = f.gamma(i, 0);
        f.sqrt_det(i, j) = f.sqrt_det(i, 0);
        f.kappa(i, j) = f.kappa(i, 0);
        continue;
      }
      if (x_only && grid.orientation == Orientation::y_time_like && i > 0) {
        f.gamma(i, j) = f.gamma(0, j);
        f.sqrt_det(i, j) = f.sqrt_det(0, j);
        f.kappa(i, j) = f.kappa(0, j);
        continue;
      }
      v = eval_metric(metric, grid.x(i, j), grid.y(i, j));
      f.gamma(i, j) = v.gamma;
      f.sqrt_det(i, j) = std::sqrt(v.det());
      f.kappa(i, j) = v.kappa;
    }
  }
  return f;
}

FluidState trajectory_fluid(const Trajectory& traj) { return invariants_to_fluid(traj.w); }

SecondForm trajectory_second_form(const Trajectory& traj, const Metric& metric) {
  const StripMetricFields f = strip_metric_fields(metric, traj.grid);
  return fluid_to_second_form(trajectory_fluid(traj), f.gamma, f.sqrt_det);
}

EnergyRecord energy_diagnostics(const Trajectory& traj, const Metric& metric) {
  const StripGrid& g = traj.grid;
  const std::size_t n = g.cols;
  const FluidState fl = trajectory_fluid(traj);
  const bool xt = g.orientation == Orientation::x_time_like;
  std::vector<double> e_row(g.rows), q_row(g.rows), t_row(g.rows), b_row(g.rows), ab_row(g.rows);
  std::vector<double> flux(g.rows);
  EnergyRecord r;
  for (std::size_t i = 0; i < g.rows; ++i) {
    const MetricSlice slice = metric_slice(metric, g, g.t(i));
    double e = 0, qs2 = 0, ts2 = 0, b = 0, ab = 0, fx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const long jj = static_cast<long>(j);
      const std::size_t l = wrap_index(jj - 1, n), rr = wrap_index(jj + 1, n);
      const double q = fl.q(i, j), th = fl.theta(i, j);
      const double rho = 1.0 / std::sqrt(q * q - 1.0);
      const double qs = (fl.q(i, rr) - fl.q(i, l)) / (2.0 * g.ds);
      const double ts = (fl.theta(i, rr) - fl.theta(i, l)) / (2.0 * g.ds);
      e += rho * rho * rho * qs * qs / (q * q) + rho * ts * ts;
      qs2 += qs * qs;
      ts2 += ts * ts;
      const SourceTerms src = source_terms(q, th, slice.tilde[j]);
      b += src.S2;
      ab += std::abs(src.S2);
      r.source_sup = std::max(r.source_sup, std::abs(src.S2));
      fx += rho * q * (xt ? std::cos(th) : std::sin(th));
    }
    e_row[i] = e * g.ds;
    q_row[i] = qs2 * g.ds;
    t_row[i] = ts2 * g.ds;
    b_row[i] = b * g.ds;
    ab_row[i] = ab * g.ds;
    flux[i] = fx * g.ds;
  }
  const double dt = std::abs(g.dt);
  const double eps = traj.epsilon;
  r.energy = eps * trapezoid(e_row, dt);
  r.sqrt_eps_q = std::sqrt(eps * trapezoid(q_row, dt));
  r.sqrt_eps_theta = std::sqrt(eps * trapezoid(t_row, dt));
  r.source_integral = trapezoid(b_row, dt);
  r.source_abs_integral = trapezoid(ab_row, dt);
  r.flux_start = flux.front();
  r.flux_end = flux.back();
  r.bound = r.source_abs_integral + std::abs(r.flux_start) + std::abs(r.flux_end);
  r.identity_residual = r.energy - (r.source_integral - (r.flux_end - r.flux_start));
  return r;
}

BalanceReport balance_check(const Trajectory& traj, const Metric& metric) {
  const StripGrid& g = traj.grid;
  const FluidState fl = trajectory_fluid(traj);
  const bool xt = g.orientation == Orientation::x_time_like;
  // x time-like: d/dt ∫(-M̃) = ∫R₁ and d/dt ∫Ñ = ∫R₂; y time-like: d/dt ∫L̃ = ∫R₁, d/dt ∫(-M̃) = ∫R₂.
  std::vector<double> f1(g.rows), f2(g.rows), s1(g.rows), s2(g.rows);
  for (std::size_t i = 0; i < g.rows; ++i) {
    const MetricSlice slice = metric_slice(metric, g, g.t(i));
    double a = 0, b = 0, c = 0, d = 0;
    for (std::size_t j = 0; j < g.cols; ++j) {
      const double q = fl.q(i, j), th = fl.theta(i, j);
      const ScaledForm sf = fluid_to_second_form(q, th);
      const SourceTerms src = source_terms(q, th, slice.tilde[j]);
      a += xt ? -sf.Mt : sf.Lt;
      b += xt ? sf.Nt : -sf.Mt;
      c += src.R1;
      d += src.R2;
    }
    f1[i] = a * g.ds;
    f2[i] = b * g.ds;
    s1[i] = c * g.ds;
    s2[i] = d * g.ds;
  }
  BalanceReport r;
  for (std::size_t i = 0; i + 1 < g.rows; ++i) {
    const double r1 = (f1[i + 1] - f1[i]) / g.dt - 0.5 * (s1[i] + s1[i + 1]);
    const double r2 = (f2[i + 1] - f2[i]) / g.dt - 0.5 * (s2[i] + s2[i + 1]);
    r.max_residual = std::max({r.max_residual, std::abs(r1), std::abs(r2)});
    r.scale = std::max({r.scale, std::abs(s1[i]), std::abs(s2[i])});
  }
  return r;
}

Grid box_average(const Grid& g, std::size_t wr, std::size_t wc) {
  if (wr < 1 || wc < 1) fail(ErrorKind::config, "averaging window must be at least one cell");
  if (wr > g.rows || wc > g.cols) fail(ErrorKind::config, "averaging window larger than the grid");
  const long rlo = -static_cast<long>((wr - 1) / 2), rhi = static_cast<long>(wr / 2);
  const long clo = -static_cast<long>((wc - 1) / 2), chi = static_cast<long>(wc / 2);
  // columns first (periodic), then rows (truncated)
  Grid tmp(g.rows, g.cols);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) {
      double acc = 0;
      for (long k = clo; k <= chi; ++k) acc += g(i, wrap_index(static_cast<long>(j) + k, g.cols));
      tmp(i, j) = acc / static_cast<double>(wc);
    }
  Grid out(g.rows, g.cols);
  for (std::size_t i = 0; i < g.rows; ++i) {
    const long lo = std::max(0L, static_cast<long>(i) + rlo);
    const long hi = std::min(static_cast<long>(g.rows) - 1, static_cast<long>(i) + rhi);
    for (std::size_t j = 0; j < g.cols; ++j) {
      double acc = 0;
      for (long k = lo; k <= hi; ++k) acc += tmp(static_cast<std::size_t>(k), j);
      out(i, j) = acc / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

SweepResult epsilon_sweep(const SolverConfig& config, const Metric& metric,
                          const RiemannRow& initial) {
  std::vector<double> list = config.epsilon_sweep;
  if (list.empty()) list.push_back(config.epsilon);
  for (std::size_t i = 1; i < list.size(); ++i)
    if (!(list[i] < list[i - 1])) fail(ErrorKind::config, "sweep epsilons must strictly decrease");
  SweepResult res;
  for (double eps : list) {
    SolverConfig c = config;
    c.epsilon = eps;
    SweepMember m;
    m.epsilon = eps;
    m.trajectory = march(c, metric, initial);
    if (!m.trajectory.diag.completed) {
      res.failure = "march with eps = " + std::to_string(eps) + " failed: " + m.trajectory.diag.failure;
      res.members.push_back(std::move(m));
      return res;
    }
    m.form = trajectory_second_form(m.trajectory, metric);
    m.energy = energy_diagnostics(m.trajectory, metric);
    res.members.push_back(std::move(m));
  }
  const StripGrid& g = res.members.front().trajectory.grid;
  const double window = g.period() / 16.0;
  const auto wc = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(window / g.ds)));
  const std::size_t wr = 1;
  std::vector<std::array<Grid, 3>> avg;
  for (const SweepMember& m : res.members)
    avg.push_back({box_average(m.form.Lt, wr, wc), box_average(m.form.Mt, wr, wc),
                   box_average(m.form.Nt, wr, wc)});
  for (std::size_t k = 1; k < avg.size(); ++k) {
    double dist = 0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t p = 0; p < avg[k][c].size(); ++p)
        dist = std::max(dist, std::abs(avg[k][c].data[p] - avg[k - 1][c].data[p]));
    res.weak_distance.push_back(dist);
  }
  res.completed = true;
  return res;
}

WholePlaneResult whole_plane_march(const SolverConfig& config, const Metric& metric,
                                   const RiemannRow& initial) {
  config.validate();
  const DiamondRegion region = config.region();
  const double c2 = 2.0 * region.center();
  const bool xt = config.orientation == Orientation::x_time_like;

  // Backward half: x → -x (or y → -y), flow angle θ → 2c - θ, i.e. (W₊, W₋) → (2c - W₋, 2c - W₊).
  Metric reflected = xt ? reflect_metric(metric) : metric;
  SolverConfig back = config;
  back.t_start = -config.t_start;
  back.t_end = -config.t_start + (config.t_end - config.t_start);
  RiemannRow rin = initial;
  for (std::size_t j = 0; j < initial.wp.size(); ++j) {
    rin.wp[j] = c2 - initial.wm[j];
    rin.wm[j] = c2 - initial.wp[j];
  }

  WholePlaneResult out{march(config, metric, initial), march(back, reflected, rin), reflected};
  Trajectory& b = out.backward;
  for (std::size_t k = 0; k < b.w.wp.size(); ++k) {
    const double p = b.w.wp.data[k], m = b.w.wm.data[k];
    b.w.wp.data[k] = c2 - m;
    b.w.wm.data[k] = c2 - p;
  }
  // the shared data row is the caller's row, bit for bit
  std::copy(initial.wp.begin(), initial.wp.end(), b.w.wp.data.begin());
  std::copy(initial.wm.begin(), initial.wm.end(), b.w.wm.data.begin());
  b.grid.t0 = config.t_start;
  b.grid.dt = -b.grid.dt;
  return out;
}

Trajectory glue(const WholePlaneResult& wp) {
  const Trajectory& f = wp.forward;
  const Trajectory& b = wp.backward;
  Trajectory g;
  g.epsilon = f.epsilon;
  g.grid = f.grid;
  const std::size_t nb = b.grid.rows, nf = f.grid.rows, cols = f.grid.cols;
  g.grid.rows = nb + nf - 1;
  g.grid.t0 = b.grid.t(nb - 1);
  g.w = RiemannState{Grid(g.grid.rows, cols), Grid(g.grid.rows, cols)};
  for (std::size_t i = 0; i < g.grid.rows; ++i) {
    const bool from_back = i < nb - 1;
    const Trajectory& src = from_back ? b : f;
    const std::size_t si = from_back ? nb - 1 - i : i - (nb - 1);
    for (std::size_t j = 0; j < cols; ++j) {
      g.w.wp(i, j) = src.w.wp(si, j);
      g.w.wm(i, j) = src.w.wm(si, j);
    }
  }
  g.diag = f.diag;
  g.diag.completed = f.diag.completed && b.diag.completed;
  g.diag.steps += b.diag.steps;
  g.diag.retries += b.diag.retries;
  g.diag.breach_events += b.diag.breach_events;
  g.diag.breach_steps += b.diag.breach_steps;
  g.diag.max_breach = std::max(f.diag.max_breach, b.diag.max_breach);
  if (!b.diag.completed) {
    g.diag.failure_kind = b.diag.failure_kind;
    g.diag.failure = "backward half: " + b.diag.failure;
  }
  return g;
}

}  // namespace codazzi
