#include "codazzi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "codazzi/error.hpp"

namespace codazzi {

double quintic_bump(double r) {
  const double a = std::abs(r);
  if (a >= 1.0) return 0.0;
  return 1.0 - a * a * a * (10.0 - 15.0 * a + 6.0 * a * a);
}

double quintic_bump_derivative(double r) {
  const double a = std::abs(r);
  if (a >= 1.0) return 0.0;
  const double d = -30.0 * a * a * (1.0 - a) * (1.0 - a);
  return r < 0.0 ? -d : d;
}

std::vector<TestFunction> build_test_family(const StripGrid& grid, const TestFamilySpec& spec) {
  if (spec.centers_t < 1 || spec.centers_s < 1)
    fail(ErrorKind::config, "test family needs at least one centre per direction");
  const double t_lo = std::min(grid.t(0), grid.t(grid.rows - 1));
  const double T = std::abs(grid.dt) * static_cast<double>(grid.rows - 1);
  const double P = grid.period();
  std::vector<TestFunction> out;
  for (int a = 0; a < spec.centers_t; ++a) {
    for (int b = 0; b < spec.centers_s; ++b) {
      TestFunction f;
      f.ct = t_lo + T * (a + 1) / (spec.centers_t + 1);
      f.cs = grid.s0 + P * (b + 1) / (spec.centers_s + 1);
      f.wt = spec.half_width_t * T;
      f.ws = spec.half_width_s * P;
      out.push_back(f);
    }
  }
  return out;
}

WeakFormReport weak_form_residual(const Grid& Lt, const Grid& Mt, const Grid& Nt,
                                  const StripGrid& grid, const Metric& metric,
                                  const TestFamilySpec& spec) {
  if (Lt.rows != grid.rows || Lt.cols != grid.cols || Mt.size() != Lt.size() ||
      Nt.size() != Lt.size())
    fail(ErrorKind::config, "weak form fields do not match the strip grid");
  for (const Grid* g : {&Lt, &Mt, &Nt})
    for (double v : g->data)
      if (!std::isfinite(v)) fail(ErrorKind::numerical, "weak form field has undefined values");

  WeakFormReport rep;
  rep.functions = build_test_family(grid, spec);
  const double t_lo = std::min(grid.t(0), grid.t(grid.rows - 1));
  const double t_hi = std::max(grid.t(0), grid.t(grid.rows - 1));
  const double s_hi = grid.s0 + grid.period();
  for (const TestFunction& f : rep.functions) {
    if (f.ct - f.wt < t_lo - 1e-12 || f.ct + f.wt > t_hi + 1e-12 || f.cs - f.ws < grid.s0 - 1e-12 ||
        f.cs + f.ws > s_hi + 1e-12)
      fail(ErrorKind::config, "test function support leaves the strip");
  }

  // Γ̃ combinations at every node.
  const bool xt = grid.orientation == Orientation::x_time_like;
  Grid c1(grid.rows, grid.cols), c2(grid.rows, grid.cols);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    const MetricSlice slice = metric_slice(metric, grid, grid.t(i));
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const Symbols& s = slice.tilde[j];
      const double L = Lt(i, j), M = Mt(i, j), N = Nt(i, j);
      c1(i, j) = s.s222 * L - 2.0 * s.s212 * M + s.s211 * N;
      c2(i, j) = -s.s122 * L + 2.0 * s.s112 * M - s.s111 * N;
    }
  }

  const double cell = std::abs(grid.dt) * grid.ds;
  double sumsq = 0.0;
  for (const TestFunction& f : rep.functions) {
    double r1 = 0, r2 = 0;
    double a1 = 0, a2 = 0, a3 = 0, b1 = 0, b2 = 0, b3 = 0;
    for (std::size_t i = 0; i < grid.rows; ++i) {
      const double ut = (grid.t(i) - f.ct) / f.wt;
      if (std::abs(ut) >= 1.0) continue;
      const double bt = quintic_bump(ut), dbt = quintic_bump_derivative(ut) / f.wt;
      const double wi = (i == 0 || i + 1 == grid.rows) ? 0.5 : 1.0;
      for (std::size_t j = 0; j < grid.cols; ++j) {
        const double us = (grid.s(j) - f.cs) / f.ws;
        if (std::abs(us) >= 1.0) continue;
        const double bs = quintic_bump(us), dbs = quintic_bump_derivative(us) / f.ws;
        const double phi = bt * bs;
        const double phi_t = dbt * bs, phi_s = bt * dbs;
        const double phi_x = xt ? phi_t : phi_s;
        const double phi_y = xt ? phi_s : phi_t;
        const double w = wi * cell;
        const double L = Lt(i, j), M = Mt(i, j), N = Nt(i, j);
        r1 += w * (-M * phi_x + L * phi_y - c1(i, j) * phi);
        r2 += w * (-N * phi_x + M * phi_y - c2(i, j) * phi);
        a1 += w * std::abs(M * phi_x);
        a2 += w * std::abs(L * phi_y);
        a3 += w * std::abs(c1(i, j) * phi);
        b1 += w * std::abs(N * phi_x);
        b2 += w * std::abs(M * phi_y);
        b3 += w * std::abs(c2(i, j) * phi);
      }
    }
    rep.residual1.push_back(r1);
    rep.residual2.push_back(r2);
    rep.max_abs = std::max({rep.max_abs, std::abs(r1), std::abs(r2)});
    rep.scale = std::max({rep.scale, a1, a2, a3, b1, b2, b3});
    sumsq += r1 * r1 + r2 * r2;
  }
  rep.l2 = std::sqrt(sumsq / (2.0 * static_cast<double>(rep.functions.size())));
  rep.relative = rep.scale > 0.0 ? rep.max_abs / rep.scale : 0.0;
  return rep;
}

WeakFormReport weak_form_residual(const SecondForm& form, const StripGrid& grid,
                                  const Metric& metric, const TestFamilySpec& spec) {
  return weak_form_residual(form.Lt, form.Mt, form.Nt, grid, metric, spec);
}

ConstraintStats constraint_residual(const Grid& Lt, const Grid& Mt, const Grid& Nt) {
  ConstraintStats s;
  double sumsq = 0.0;
  for (std::size_t k = 0; k < Lt.size(); ++k) {
    const double r = std::abs(Lt.data[k] * Nt.data[k] - Mt.data[k] * Mt.data[k] + 1.0);
    s.max = std::max(s.max, r);
    sumsq += r * r;
  }
  if (Lt.size() > 0) s.l2 = std::sqrt(sumsq / static_cast<double>(Lt.size()));
  return s;
}

ConstraintStats constraint_residual(const SecondForm& form) {
  return constraint_residual(form.Lt, form.Mt, form.Nt);
}

ConstraintStats constraint_residual_unscaled(const SecondForm& form, const Grid& kappa) {
  ConstraintStats s;
  double sumsq = 0.0;
  for (std::size_t k = 0; k < form.L.size(); ++k) {
    const double r =
        std::abs(form.L.data[k] * form.N.data[k] - form.M.data[k] * form.M.data[k] - kappa.data[k]);
    s.max = std::max(s.max, r);
    sumsq += r * r;
  }
  if (form.L.size() > 0) s.l2 = std::sqrt(sumsq / static_cast<double>(form.L.size()));
  return s;
}

SecondForm average_form(const SecondForm& f, std::size_t wr, std::size_t wc) {
  SecondForm a;
  a.Lt = box_average(f.Lt, wr, wc);
  a.Mt = box_average(f.Mt, wr, wc);
  a.Nt = box_average(f.Nt, wr, wc);
  a.L = box_average(f.L, wr, wc);
  a.M = box_average(f.M, wr, wc);
  a.N = box_average(f.N, wr, wc);
  a.h11 = box_average(f.h11, wr, wc);
  a.h12 = box_average(f.h12, wr, wc);
  a.h22 = box_average(f.h22, wr, wc);
  a.constraint_max = constraint_residual(a).max;
  return a;
}

AveragedSequence weak_star_average(const std::vector<SecondForm>& fields, std::size_t wr,
                                   std::size_t wc) {
  AveragedSequence out;
  for (const SecondForm& f : fields) {
    out.before.push_back(constraint_residual(f));
    out.averaged.push_back(average_form(f, wr, wc));
    out.after.push_back(constraint_residual(out.averaged.back()));
  }
  return out;
}

AveragedSequence weak_star_average(const std::vector<SecondForm>& fields, const StripGrid& grid,
                                   double window) {
  if (!(window > 0.0)) fail(ErrorKind::config, "averaging window must be positive");
  const auto wc = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(window / grid.ds)));
  if (wc > grid.cols) fail(ErrorKind::config, "averaging window larger than the grid");
  return weak_star_average(fields, 1, wc);
}

CompactnessReport compactness_report(const SweepResult& sweep, double window) {
  if (sweep.members.size() < 2)
    fail(ErrorKind::config, "compactness report needs at least two sweep members");
  CompactnessReport rep;
  for (const SweepMember& m : sweep.members) {
    if (!m.trajectory.diag.completed)
      fail(ErrorKind::config, "compactness report needs completed sweep members");
    CompactnessEntry e;
    e.epsilon = m.epsilon;
    e.rows = m.trajectory.grid.rows;
    e.cols = m.trajectory.grid.cols;
    for (std::size_t k = 0; k < m.form.L.size(); ++k)
      e.sup_norm = std::max({e.sup_norm, std::abs(m.form.L.data[k]), std::abs(m.form.M.data[k]),
                             std::abs(m.form.N.data[k])});
    e.energy = m.energy;
    e.averaged_constraint =
        weak_star_average({m.form}, m.trajectory.grid, window).after.front();
    rep.entries.push_back(e);
  }
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
  double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
  double mx = 0, my = 0;
  for (const CompactnessEntry& e : rep.entries) {
    smin = std::min(smin, e.sup_norm);
    smax = std::max(smax, e.sup_norm);
    emin = std::min(emin, e.energy.energy);
    emax = std::max(emax, e.energy.energy);
    mx += e.epsilon;
    my += e.energy.energy;
  }
  rep.sup_variation = smax > 0.0 ? (smax - smin) / smax : 0.0;
  if (emax == 0.0)
    rep.energy_ratio = 1.0;
  else if (emin == 0.0)
    rep.energy_ratio = std::numeric_limits<double>::infinity();
  else
    rep.energy_ratio = emax / emin;
  const double n = static_cast<double>(rep.entries.size());
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (const CompactnessEntry& e : rep.entries) {
    sxy += (e.epsilon - mx) * (e.energy.energy - my);
    sxx += (e.epsilon - mx) * (e.epsilon - mx);
  }
  rep.energy_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  rep.energy_grows_as_eps_decreases = rep.energy_slope < 0.0;
  return rep;
}

}  // namespace codazzi
