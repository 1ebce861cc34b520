// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "codazzi/config.hpp"
#include "codazzi/error.hpp"
#include "codazzi/pipeline.hpp"
#include "codazzi/reconstruct.hpp"
#include "codazzi/solver.hpp"
#include "codazzi/verify.hpp"
#include "oracle_common.hpp"

using namespace codazzi;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = CODAZZI_CONFIG_DIR;
const std::string kData = CODAZZI_TEST_DATA;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  std::vector<std::string> info;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string& what) { info.push_back(what); }
};

bool report(int id, const std::string& title, const Outcome& o) {
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "\n";
  for (const std::string& d : o.details) std::cout << "    " << d << "\n";
  for (const std::string& i : o.info) std::cout << "    info: " << i << "\n";
  std::cout.flush();
  return o.pass;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  RunConfig config;
  Metric metric;
  RiemannRow row;
};

Loaded load(const std::string& name) {
  RunConfig c = load_config(kConfigs + "/" + name + ".yaml");
  validate_config(c);
  Metric m = build_metric(c.metric);
  RiemannRow r = build_initial_row(c);
  return {std::move(c), std::move(m), std::move(r)};
}

double window_length(const RunConfig& c) { return c.verify.window_fraction * c.solver.period; }

// ------------------------------------------------------------------ 1

Outcome exact_solution() {
  Loaded l = load("catenoid_constant");
  Outcome o;
  for (double eps : {0.1, 0.0125}) {
    SolverConfig s = l.config.solver;
    s.epsilon = eps;
    s.epsilon_sweep.clear();
    const Trajectory t = march(s, l.metric, l.row);
    const FluidState f = trajectory_fluid(t);
    double drift = 0.0;
    for (std::size_t k = 0; k < f.q.size(); ++k)
      drift = std::max({drift, std::abs(f.q.data[k] - std::numbers::sqrt2), std::abs(f.theta.data[k])});
    const double length = t.grid.t(t.grid.rows - 1) - t.grid.t(0);
    o.require(t.diag.completed && length >= 4.0 - 1e-12 && drift < 1e-8,
              "eps " + sci(eps) + ": march length " + sci(length) + ", max drift of (q, theta) " +
                  sci(drift) + " (< 1e-8)");
  }
  return o;
}

// ------------------------------------------------------------------ 2-5

struct SweepData {
  Loaded setup;
  SweepResult sweep;
  std::vector<WeakFormReport> weak;
};

Outcome invariant_region(const SweepData& d, const WholePlaneResult& mirror) {
  Outcome o;
  const SweepMember* m = nullptr;
  for (const SweepMember& s : d.sweep.members)
    if (s.epsilon == 0.05) m = &s;
  if (!m) {
    o.require(false, "sweep has no eps = 0.05 member");
    return o;
  }
  const MarchDiagnostics& g = m->trajectory.diag;
  o.require(g.completed && g.breach_events == 0,
            "eps 0.05, march length " +
                sci(m->trajectory.grid.t(m->trajectory.grid.rows - 1) - m->trajectory.grid.t(0)) +
                ": " + std::to_string(g.breach_events) + " breach events over " +
                std::to_string(g.breach_steps) + " steps, max breach " + sci(g.max_breach) +
                (g.breach_events ? ", first at t = " + sci(g.first_breach_t) : ""));
  o.note("mirror half t in [-2, 0]: " + std::to_string(mirror.backward.diag.breach_events) +
         " breach events, max breach " + sci(mirror.backward.diag.max_breach));
  return o;
}

Outcome energy_uniformity(const SweepData& d) {
  Outcome o;
  double emin = INFINITY, emax = 0.0;
  bool bounded = true;
  std::string list;
  for (const SweepMember& m : d.sweep.members) {
    emin = std::min(emin, m.energy.energy);
    emax = std::max(emax, m.energy.energy);
    bounded = bounded && m.energy.energy <= m.energy.bound;
    list += (list.empty() ? "" : ", ") + sci(m.epsilon) + " -> " + sci(m.energy.energy) + " / " +
            sci(m.energy.bound);
  }
  const double ratio = emax / emin;
  o.require(ratio < 3.0, "max/min energy over the sweep " + sci(ratio) + " (< 3)");
  o.require(bounded, "energy never exceeds its bound (eps -> energy / bound: " + list + ")");
  return o;
}

ConstraintStats averaged_constraint(const SecondForm& form, const StripGrid& g, double window) {
  return weak_star_average({form}, g, window).after.front();
}

ConstraintStats averaged_constraint_2d(const SecondForm& form, const StripGrid& g, double window) {
  const auto wr = std::max<std::size_t>(1, std::lround(window / std::abs(g.dt)));
  const auto wc = std::max<std::size_t>(1, std::lround(window / g.ds));
  return weak_star_average({form}, wr, wc).after.front();
}

void constraint_check(Outcome& o, const SecondForm& finest, const StripGrid& g, double window,
                      const std::string& label) {
  const ConstraintStats s = averaged_constraint(finest, g, window);
  o.require(s.max < 5e-3, label + "window P/16 along s: max |LN - M^2 + 1| " + sci(s.max) +
                              " (< 5e-3)");
  o.note(label + "raw field " + sci(constraint_residual(finest).max) +
         ", P/16 x P/16 box in (t, s) " + sci(averaged_constraint_2d(finest, g, window).max));
}

void weak_decay_check(Outcome& o, const std::vector<double>& eps,
                      const std::vector<WeakFormReport>& weak, const std::string& label) {
  bool monotone = true;
  std::string list;
  for (std::size_t k = 0; k < weak.size(); ++k) {
    if (k > 0 && weak[k].max_abs > 1.1 * weak[k - 1].max_abs) monotone = false;
    list += (list.empty() ? "" : ", ") + sci(eps[k]) + " -> " + sci(weak[k].max_abs);
  }
  o.require(monotone, label + "max weak residual non-increasing within 10% (" + list + ")");
  o.require(weak.back().relative < 1e-3,
            label + "finest relative residual " + sci(weak.back().relative) + " (< 1e-3)");
}

// ------------------------------------------------------------------ 6

Outcome oracle_equivalence() {
  Outcome o;
  const std::vector<oracle::NamedMetric> metrics = oracle::sample_metrics();
  oracle::PointSampler sample(20240611);
  std::mt19937_64 rng(17);
  const DiamondRegion region(1.3, std::numbers::sqrt2);
  std::uniform_real_distribution<double> uwp(region.wp_mid() - 0.5 * region.wp_extent(),
                                             region.wp_mid() + 0.5 * region.wp_extent());
  std::uniform_real_distribution<double> uwm(region.wm_mid() - 0.5 * region.wp_extent(),
                                             region.wm_mid() + 0.5 * region.wp_extent());

  double chr = 0.0, til = 0.0, bri = 0.0, src = 0.0, rhs = 0.0;
  for (int k = 0; k < 100; ++k) {
    const oracle::NamedMetric& m = metrics[k % metrics.size()];
    const auto [x, y] = sample(m);
    const MetricValues v = m.metric.values(x, y);
    const ChristoffelSet cs = christoffel(v);
    chr = std::max(chr, oracle::symbols_relative_error(
                            cs.plain, oracle::christoffel_index(m.fields, x, y, 1e-3)));
    const oracle::Field kappa = [mm = m.metric](double a, double b) { return mm.values(a, b).kappa; };
    til = std::max(til, oracle::symbols_relative_error(
                            cs.tilde, oracle::tilde_index(m.fields, kappa, x, y, 1e-3)));
    double scale = 0.0;
    const double kref = oracle::gauss_curvature(m.fields, x, y, 1e-3, &scale);
    bri = std::max(bri, std::abs(brioschi_curvature(v) - kref) / std::max(std::abs(kref), scale));

    const FluidPoint f = invariants_to_state(uwp(rng), uwm(rng));
    const double w = f.q * f.q - 1.0;
    const oracle::SourceReference r = oracle::source_reference(f.q, f.theta, cs.tilde);
    const auto [plus, minus] = source_combinations_closed_form(f.q, f.theta, cs.tilde);
    const double ss = std::abs(r.S1) + w * std::abs(r.S2);
    src = std::max({src, std::abs(plus - (r.S1 + w * r.S2)) / std::max(ss, 1e-300),
                    std::abs(minus - (r.S1 - w * r.S2)) / std::max(ss, 1e-300)});

    const Orientation orient = k % 2 ? Orientation::y_time_like : Orientation::x_time_like;
    const oracle::Profile pr = oracle::profile_for(orient);
    const double s = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
    const double eps = std::uniform_real_distribution<double>(0.0125, 0.1)(rng);
    double rs = 0.0;
    const Rates ref = oracle::reference_rates(pr, s, cs.tilde, eps, orient, &rs);
    const Rates got = assemble_rates(pr.jet(s), cs.tilde, eps, orient);
    rhs = std::max({rhs, std::abs(got.wp - ref.wp) / rs, std::abs(got.wm - ref.wm) / rs});
  }
  o.require(chr < 1e-6, "Christoffel symbols vs index formula " + sci(chr) + " (< 1e-6)");
  o.require(til < 1e-6, "rescaled connection vs gamma-rescaling " + sci(til) + " (< 1e-6)");
  o.require(bri < 1e-6, "Brioschi curvature vs Gauss equation " + sci(bri) + " (< 1e-6)");
  o.require(src < 1e-10, "source combinations vs composition " + sci(src) + " (< 1e-10)");
  o.require(rhs < 1e-8, "Riemann-form rates vs divergence form " + sci(rhs) + " (< 1e-8)");
  o.note("100 samples each over " + std::to_string(metrics.size()) + " metrics");
  return o;
}

// ------------------------------------------------------------------ 7

Outcome metric_families() {
  Outcome o;
  const double b = std::numbers::sqrt2;
  std::vector<double> xs;
  for (int k = 0; k <= 200; ++k) xs.push_back(-2.0 + 4.0 * k / 200.0);
  const BetaReport hel = check_beta_condition(isothermal_helicoid(1.0), b, BetaRelation::ode1, xs);
  o.require(hel.max_residual < 1e-8,
            "helicoid ode-1 residual at beta = sqrt 2: " + sci(hel.max_residual) + " (< 1e-8)");

  const Metric torus = isothermal_torus(2.0, 1.0);
  const Interval band = torus.domain_x();
  std::vector<double> ts;
  const double margin = 0.01 * (band.hi - band.lo);
  for (int k = 0; k <= 200; ++k)
    ts.push_back(band.lo + margin + (band.hi - band.lo - 2 * margin) * k / 200.0);
  const BetaReport tor = check_beta_condition(torus, b, BetaRelation::ode1, ts);
  o.require(tor.ratio_variation > 0.1, "torus (a, b) = (2, 1) ratio variation over the band " +
                                           sci(tor.ratio_variation) + " (> 0.1)");

  const BetaReport cat = check_beta_condition(catenoid(1.0, b, 1.0), b, BetaRelation::ode1, xs);
  o.require(cat.max_residual < 1e-12,
            "catenoid (c, beta, kappa0) = (1, sqrt 2, 1) ode-1 residual " + sci(cat.max_residual) +
                " (< 1e-12)");
  return o;
}

// ------------------------------------------------------------------ 8

Outcome reconstruction(const fs::path& scratch) {
  Outcome o;
  Loaded l = load("helicoid_constant");
  const std::size_t grids[3][2] = {{64, 256}, {128, 512}, {256, 1024}};
  std::vector<double> defects;
  ReconstructSummary finest;
  std::string finest_mesh;
  for (auto [ns, nt] : grids) {
    RunConfig c = l.config;
    c.solver.n_space = ns;
    c.solver.n_time = nt;
    const RiemannRow row = build_initial_row(c);
    const Trajectory t = march(c.solver, l.metric, row);
    const std::string tag = std::to_string(ns) + "x" + std::to_string(nt);
    if (!t.diag.completed) {
      o.require(false, tag + " march did not complete: " + t.diag.failure);
      return o;
    }
    const fs::path mesh = scratch / ("mesh_" + tag + ".obj");
    const ReconstructSummary r = reconstruct_trajectory(t, l.metric, c, 0, mesh.string(),
                                                        (scratch / ("mesh_" + tag + ".csv")).string());
    defects.push_back(r.max_defect);
    o.note(tag + ": first-form max " + sci(r.first_form.max) + ", defect " + sci(r.max_defect) +
           ", frame Gram " + sci(r.first_form.frame_gram_max));
    if (ns == 256) {
      finest = r;
      finest_mesh = slurp(mesh);
      // determinism: an independent second export must match byte for byte
      const fs::path again = scratch / "mesh_again.obj";
      reconstruct_trajectory(t, l.metric, c, 0, again.string(), (scratch / "again.csv").string());
      o.require(slurp(again) == finest_mesh, "256x1024 mesh export is byte-identical on re-run");
    }
  }
  o.require(finest.first_form.max < 1e-3,
            "256x1024 first-form max relative error " + sci(finest.first_form.max) + " (< 1e-3)");
  o.require(finest.first_form.frame_gram_max < 1e-3,
            "256x1024 frame Gram |rx.rx - E|/E " + sci(finest.first_form.frame_gram_max) +
                " (< 1e-3)");
  for (std::size_t k = 1; k < defects.size(); ++k) {
    const double order = std::log2(defects[k - 1] / defects[k]);
    o.require(order >= 1.0, "defect order between grids " + std::to_string(k) + " and " +
                                std::to_string(k + 1) + ": " + sci(order) + " (>= 1)");
  }
  o.require(finest.curvature_rel_l2 < 0.1, "angle-defect curvature vs kappa, relative L2 " +
                                               sci(finest.curvature_rel_l2) + " (< 0.1)");

  // plane golden file
  StripGrid g;
  g.rows = 3;
  g.cols = 4;
  g.dt = 0.5;
  g.ds = 0.5;
  const Metric plane = custom_isothermal([](double) { return 1.0; }, 1.0, {-1e300, 1e300}, "plane");
  const HFields zero{Grid(3, 4), Grid(3, 4), Grid(3, 4)};
  SurfacePatch p = integrate_frame(plane, g, zero, 0, 0);
  integrate_position(p);
  o.require(mesh_to_obj(p) == slurp(kData + "/plane_golden.obj"),
            "plane mesh matches the golden OBJ file");
  return o;
}

// ------------------------------------------------------------------ 9

Outcome round_trips() {
  Outcome o;
  const DiamondRegion region(1.3, std::numbers::sqrt2);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uwp(region.center() + region.w_alpha(),
                                             region.center() + region.w_beta());
  std::uniform_real_distribution<double> uwm(region.center() - region.w_beta(),
                                             region.center() - region.w_alpha());
  double werr = 0.0, ferr = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const FluidPoint f = invariants_to_state(uwp(rng), uwm(rng));
    const Invariants w = riemann_invariants(f.q, f.theta);
    const FluidPoint back = invariants_to_state(w.wp, w.wm);
    werr = std::max({werr, std::abs(back.q - f.q), std::abs(back.theta - f.theta)});
    const FluidPoint viaform = second_form_to_fluid(fluid_to_second_form(f.q, f.theta), f.theta);
    ferr = std::max({ferr, std::abs(viaform.q - f.q), std::abs(viaform.theta - f.theta)});
  }
  o.require(werr < 1e-12, "(q, theta) -> (W+, W-) -> (q, theta): " + sci(werr) + " (< 1e-12)");
  o.require(ferr < 1e-8, "(q, theta) -> (Lt, Mt, Nt) -> (q, theta): " + sci(ferr) + " (< 1e-8)");
  o.note("1000 states drawn uniformly from the diamond alpha = 1.3, beta = sqrt 2");
  return o;
}

// ------------------------------------------------------------------ 10

Outcome whole_plane(const SweepData& d, const std::vector<WholePlaneResult>& halves) {
  Outcome o;
  const Loaded& l = d.setup;
  bool exact = true, completed = true;
  for (const WholePlaneResult& w : halves) {
    completed = completed && w.forward.diag.completed && w.backward.diag.completed;
    for (std::size_t j = 0; j < l.row.wp.size(); ++j)
      exact = exact && w.forward.w.wp(0, j) == l.row.wp[j] && w.forward.w.wm(0, j) == l.row.wm[j] &&
              w.backward.w.wp(0, j) == l.row.wp[j] && w.backward.w.wm(0, j) == l.row.wm[j];
  }
  o.require(completed, "all half-strip marches completed");
  o.require(exact, "both halves carry the data line bit for bit at every eps");

  std::vector<double> eps;
  for (const WholePlaneResult& w : halves) eps.push_back(w.forward.epsilon);
  const double window = window_length(l.config);
  for (int half = 0; half < 2; ++half) {
    const std::string label = half == 0 ? "forward t in [0, 2]: " : "backward t in [-2, 0]: ";
    std::vector<WeakFormReport> weak;
    SecondForm finest;
    for (const WholePlaneResult& w : halves) {
      const Trajectory& t = half == 0 ? w.forward : w.backward;
      finest = trajectory_second_form(t, l.metric);
      weak.push_back(weak_form_residual(finest, t.grid, l.metric, l.config.verify.family));
    }
    const Trajectory& last = half == 0 ? halves.back().forward : halves.back().backward;
    constraint_check(o, finest, last.grid, window, label);
    weak_decay_check(o, eps, weak, label);
  }
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path scratch = fs::temp_directory_path() / "codazzi_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  bool all = true;
  try {
    all &= report(1, "exact-solution preservation on the catenoid", exact_solution());

    SweepData d{load("helicoid_perturbed"), {}, {}};
    d.sweep = epsilon_sweep(d.setup.config.solver, d.setup.metric, d.setup.row);
    if (!d.sweep.completed) std::cout << "sweep stopped early: " << d.sweep.failure << "\n";
    std::vector<double> eps;
    for (const SweepMember& m : d.sweep.members) {
      eps.push_back(m.epsilon);
      d.weak.push_back(
          weak_form_residual(m.form, m.trajectory.grid, d.setup.metric, d.setup.config.verify.family));
    }

    std::vector<WholePlaneResult> halves;
    for (double e : d.setup.config.solver.epsilon_sweep) {
      SolverConfig s = d.setup.config.solver;
      s.epsilon = e;
      s.epsilon_sweep.clear();
      halves.push_back(whole_plane_march(s, d.setup.metric, d.setup.row));
    }
    const WholePlaneResult* mirror = &halves.front();
    for (const WholePlaneResult& w : halves)
      if (w.forward.epsilon == 0.05) mirror = &w;

    all &= report(2, "invariant region on the perturbed helicoid", invariant_region(d, *mirror));
    all &= report(3, "energy uniformity across the eps sweep", energy_uniformity(d));
    {
      Outcome o;
      const SweepMember& m = d.sweep.members.back();
      constraint_check(o, m.form, m.trajectory.grid, window_length(d.setup.config),
                       "eps " + sci(m.epsilon) + ", ");
      all &= report(4, "constraint weak continuity of the averaged finest field", o);
    }
    {
      Outcome o;
      weak_decay_check(o, eps, d.weak, "");
      all &= report(5, "weak-form residual decay across the sweep", o);
    }
    all &= report(6, "oracle equivalence", oracle_equivalence());
    all &= report(7, "metric-family checks", metric_families());
    all &= report(8, "surface reconstruction", reconstruction(scratch));
    all &= report(9, "round trips", round_trips());
    all &= report(10, "whole-plane gluing", whole_plane(d, halves));
  } catch (const Error& e) {
    std::cout << "acceptance aborted: " << to_string(e.kind()) << ": " << e.what() << "\n";
    all = false;
  }
  fs::remove_all(scratch);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (all ? "all criteria passed" : "some criteria failed") << " (" << sci(secs)
            << " s)\n";
  return all ? 0 : 1;
}
