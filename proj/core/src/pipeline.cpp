#include "codazzi/pipeline.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "codazzi/error.hpp"

#ifndef CODAZZI_VERSION
#define CODAZZI_VERSION "0.0.0"
#endif

namespace codazzi {

namespace fs = std::filesystem;

const char* version() { return CODAZZI_VERSION; }

Table trajectory_table(const Trajectory& traj) {
  const StripGrid& g = traj.grid;
  Table t;
  t.header = {"i", "j", "t", "s", "Wp", "Wm"};
  t.rows.reserve(g.rows * g.cols);
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j)
      t.rows.push_back({static_cast<double>(i), static_cast<double>(j), g.t(i), g.s(j),
                        traj.w.wp(i, j), traj.w.wm(i, j)});
  return t;
}

Trajectory trajectory_from_table(const Table& table, const StripGrid& grid, double epsilon) {
  const int ci = table.column("i"), cj = table.column("j");
  const int cp = table.column("Wp"), cm = table.column("Wm");
  if (ci < 0 || cj < 0 || cp < 0 || cm < 0)
    fail(ErrorKind::io, "trajectory table needs columns i, j, Wp, Wm");
  if (table.rows.size() != grid.rows * grid.cols)
    fail(ErrorKind::io, "trajectory table size does not match its grid");
  Trajectory traj;
  traj.grid = grid;
  traj.epsilon = epsilon;
  traj.w = RiemannState{Grid(grid.rows, grid.cols), Grid(grid.rows, grid.cols)};
  for (const auto& row : table.rows) {
    const auto i = static_cast<std::size_t>(row[static_cast<std::size_t>(ci)]);
    const auto j = static_cast<std::size_t>(row[static_cast<std::size_t>(cj)]);
    if (i >= grid.rows || j >= grid.cols) fail(ErrorKind::io, "trajectory index out of range");
    traj.w.wp(i, j) = row[static_cast<std::size_t>(cp)];
    traj.w.wm(i, j) = row[static_cast<std::size_t>(cm)];
  }
  traj.diag.completed = true;
  return traj;
}

Table snapshot_table(const Trajectory& traj, const SecondForm& form, std::size_t stride) {
  const StripGrid& g = traj.grid;
  const FluidState f = trajectory_fluid(traj);
  Table t;
  t.header = {"t", "s", "q", "theta", "Wp", "Wm", "Lt", "Mt", "Nt", "L", "M", "N"};
  for (std::size_t i = 0; i < g.rows; ++i) {
    if (i % stride != 0 && i + 1 != g.rows) continue;
    for (std::size_t j = 0; j < g.cols; ++j)
      t.rows.push_back({g.t(i), g.s(j), f.q(i, j), f.theta(i, j), traj.w.wp(i, j),
                        traj.w.wm(i, j), form.Lt(i, j), form.Mt(i, j), form.Nt(i, j),
                        form.L(i, j), form.M(i, j), form.N(i, j)});
  }
  return t;
}

VerifySummary verify_trajectory(const Trajectory& traj, const Metric& metric,
                                const RunConfig& config) {
  VerifySummary v;
  const SecondForm form = trajectory_second_form(traj, metric);
  v.weak = weak_form_residual(form, traj.grid, metric, config.verify.family);
  v.constraint_raw = constraint_residual(form);
  const double window = config.verify.window_fraction * traj.grid.period();
  v.constraint_averaged = weak_star_average({form}, traj.grid, window).after.front();
  v.constraint_unscaled =
      constraint_residual_unscaled(form, strip_metric_fields(metric, traj.grid).kappa);
  v.energy = energy_diagnostics(traj, metric);
  v.balance = balance_check(traj, metric);
  return v;
}

ReconstructSummary reconstruct_trajectory(const Trajectory& traj, const Metric& metric,
                                          const RunConfig& config, std::size_t data_row,
                                          const std::string& mesh_path,
                                          const std::string& table_path) {
  const StripGrid& g = traj.grid;
  const SecondForm form = trajectory_second_form(traj, metric);
  const HFields h{form.h11, form.h12, form.h22};
  const ReconstructSection& rs = config.reconstruct;
  const std::size_t row = rs.base_row < 0 ? data_row : static_cast<std::size_t>(rs.base_row);
  const std::size_t col = rs.base_col < 0 ? g.cols / 2 : static_cast<std::size_t>(rs.base_col);
  SurfacePatch patch = integrate_frame(metric, g, h, row, col, std::nullopt, rs.lattice);
  integrate_position(patch);
  ReconstructSummary s;
  s.first_form = first_form_error(patch, metric);
  s.max_defect = patch.max_defect;
  s.max_normal_drift = patch.max_normal_drift;
  s.max_normal_tangent = patch.max_normal_tangent;
  const Grid K = angle_defect_curvature(patch);
  const Grid kappa = strip_metric_fields(metric, g).kappa;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < K.size(); ++k) {
    if (!std::isfinite(K.data[k])) continue;
    num += (K.data[k] - kappa.data[k]) * (K.data[k] - kappa.data[k]);
    den += kappa.data[k] * kappa.data[k];
  }
  s.curvature_rel_l2 = den > 0.0 ? std::sqrt(num / den) : 0.0;
  export_mesh(patch, mesh_path);
  export_vertex_table(patch, s.first_form, table_path);
  return s;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return format_double(v);
}

YAML::Node to_node(const MarchDiagnostics& d) {
  YAML::Node n;
  n["completed"] = d.completed;
  n["steps"] = d.steps;
  n["retries"] = d.retries;
  n["breach_events"] = d.breach_events;
  n["breach_steps"] = d.breach_steps;
  n["max_breach"] = num(d.max_breach);
  n["first_breach_t"] = num(d.first_breach_t);
  n["min_dt"] = num(d.min_dt);
  n["max_dt"] = num(d.max_dt);
  if (!d.completed) {
    n["failure_kind"] = std::string(d.failure_kind ? to_string(*d.failure_kind) : "unknown");
    n["failure"] = d.failure;
  }
  return n;
}

YAML::Node to_node(const ConstraintStats& c) {
  YAML::Node n;
  n["max"] = num(c.max);
  n["l2"] = num(c.l2);
  return n;
}

YAML::Node to_node(const EnergyRecord& e) {
  YAML::Node n;
  n["energy"] = num(e.energy);
  n["sqrt_eps_q"] = num(e.sqrt_eps_q);
  n["sqrt_eps_theta"] = num(e.sqrt_eps_theta);
  n["source_integral"] = num(e.source_integral);
  n["source_abs_integral"] = num(e.source_abs_integral);
  n["source_sup"] = num(e.source_sup);
  n["flux_start"] = num(e.flux_start);
  n["flux_end"] = num(e.flux_end);
  n["bound"] = num(e.bound);
  n["identity_residual"] = num(e.identity_residual);
  return n;
}

YAML::Node to_node(const VerifySummary& v) {
  YAML::Node n;
  n["weak_form"]["max_abs"] = num(v.weak.max_abs);
  n["weak_form"]["relative"] = num(v.weak.relative);
  n["weak_form"]["l2"] = num(v.weak.l2);
  n["weak_form"]["scale"] = num(v.weak.scale);
  n["constraint_raw"] = to_node(v.constraint_raw);
  n["constraint_averaged"] = to_node(v.constraint_averaged);
  n["constraint_unscaled"] = to_node(v.constraint_unscaled);
  n["energy"] = to_node(v.energy);
  n["balance"]["max_residual"] = num(v.balance.max_residual);
  n["balance"]["scale"] = num(v.balance.scale);
  return n;
}

YAML::Node to_node(const ReconstructSummary& r) {
  YAML::Node n;
  n["first_form_max"] = num(r.first_form.max);
  n["first_form_l2"] = num(r.first_form.l2);
  n["frame_gram_max"] = num(r.first_form.frame_gram_max);
  n["max_defect"] = num(r.max_defect);
  n["max_normal_drift"] = num(r.max_normal_drift);
  n["max_normal_tangent"] = num(r.max_normal_tangent);
  n["curvature_rel_l2"] = num(r.curvature_rel_l2);
  return n;
}

YAML::Node grid_node(const StripGrid& g) {
  YAML::Node n;
  n["orientation"] = std::string(to_string(g.orientation));
  n["t0"] = num(g.t0);
  n["dt"] = num(g.dt);
  n["rows"] = g.rows;
  n["s0"] = num(g.s0);
  n["ds"] = num(g.ds);
  n["cols"] = g.cols;
  return n;
}

StripGrid grid_from_node(const YAML::Node& n) {
  StripGrid g;
  const auto o = n["orientation"].as<std::string>();
  g.orientation = o == to_string(Orientation::y_time_like) ? Orientation::y_time_like
                                                             : Orientation::x_time_like;
  g.t0 = n["t0"].as<double>();
  g.dt = n["dt"].as<double>();
  g.rows = n["rows"].as<std::size_t>();
  g.s0 = n["s0"].as<double>();
  g.ds = n["ds"].as<double>();
  g.cols = n["cols"].as<std::size_t>();
  return g;
}

std::string emit(const YAML::Node& node) {
  YAML::Emitter out;
  out << node;
  return std::string(out.c_str()) + "\n";
}

/// Collects stage outcomes, diagnostics and artifact names; written once at the end.
class Manifest {
 public:
  Manifest(const RunConfig& config, const std::string& command, std::string dir)
      : dir_(std::move(dir)) {
    root_["manifest_version"] = 1;
    root_["codazzi_version"] = version();
    root_["command"] = command;
    root_["status"] = "running";
    root_["config"] = YAML::Load(config_to_yaml(config));
    root_["stages"] = YAML::Node(YAML::NodeType::Sequence);
    root_["trajectories"] = YAML::Node(YAML::NodeType::Sequence);
    root_["diagnostics"] = YAML::Node(YAML::NodeType::Map);
    root_["artifacts"] = YAML::Node(YAML::NodeType::Sequence);
  }

  void stage(const std::string& name, bool ok, const std::string& message = "") {
    YAML::Node s;
    s["name"] = name;
    s["status"] = ok ? "ok" : "failed";
    if (!message.empty()) s["message"] = message;
    root_["stages"].push_back(s);
    if (!ok) failed_ = true;
  }

  YAML::Node diagnostics() { return root_["diagnostics"]; }

  std::string write_table(const std::string& file, const Table& t) {
    write_file_atomic((fs::path(dir_) / file).string(), table_to_csv(t));
    artifact(file);
    return file;
  }

  void trajectory(const std::string& role, const std::string& file, const Trajectory& traj) {
    write_table(file, trajectory_table(traj));
    YAML::Node n;
    n["role"] = role;
    n["file"] = file;
    n["epsilon"] = num(traj.epsilon);
    n["completed"] = traj.diag.completed;
    n["grid"] = grid_node(traj.grid);
    root_["trajectories"].push_back(n);
  }

  void artifact(const std::string& file) { root_["artifacts"].push_back(file); }
  std::string path(const std::string& file) const { return (fs::path(dir_) / file).string(); }
  bool failed() const { return failed_; }

  void finish() {
    root_["status"] = failed_ ? "failed" : "ok";
    write_file_atomic(path("manifest.yaml"), emit(root_));
  }

 private:
  YAML::Node root_;
  std::string dir_;
  bool failed_ = false;
};

const char* command_name(Command c) {
  switch (c) {
    case Command::run: return "run";
    case Command::whole_plane: return "whole-plane";
    case Command::sweep: return "sweep";
  }
  return "?";
}

/// Runs `fn`, recording a failed stage instead of propagating library errors.
template <class Fn>
bool guarded(Manifest& m, const std::string& stage, std::ostream& log, Fn&& fn) {
  try {
    fn();
    m.stage(stage, true);
    return true;
  } catch (const Error& e) {
    m.stage(stage, false, e.what());
    log << stage << ": " << e.what() << "\n";
    return false;
  }
}

double data_line_mismatch(const Trajectory& f, const Trajectory& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < f.grid.cols; ++j)
    d = std::max({d, std::abs(f.w.wp(0, j) - b.w.wp(0, j)), std::abs(f.w.wm(0, j) - b.w.wm(0, j))});
  return d;
}

void reconstruct_stage(Manifest& m, const Trajectory& traj, const Metric& metric,
                       const RunConfig& config, std::size_t data_row, std::ostream& log) {
  guarded(m, "reconstruct", log, [&] {
    const ReconstructSummary r =
        reconstruct_trajectory(traj, metric, config, data_row, m.path("mesh.obj"),
                               m.path("mesh_vertices.csv"));
    m.artifact("mesh.obj");
    m.artifact("mesh_vertices.csv");
    m.diagnostics()["reconstruct"] = to_node(r);
    log << "reconstruct: first-form max " << format_double(r.first_form.max) << ", defect "
        << format_double(r.max_defect) << "\n";
  });
}

}  // namespace

int execute(const RunConfig& config, Command command, std::ostream& log) {
  Metric metric = [&] {
    try {
      validate_config(config);
      if (command == Command::sweep && config.solver.epsilon_sweep.size() < 2)
        fail(ErrorKind::config, "sweep needs at least two epsilons (solver.epsilon_sweep or --eps)");
      return build_metric(config.metric);
    } catch (const Error& e) {
      log << "invalid configuration: " << e.what() << "\n";
      throw;
    }
  }();
  const RiemannRow initial = build_initial_row(config);
  const std::string dir = resolve_output_directory(config);
  Manifest m(config, command_name(command), dir);
  m.stage("validate", true);
  log << "output: " << dir << "\n";

  const bool sweep =
      command == Command::sweep || (command == Command::run && !config.solver.epsilon_sweep.empty());
  if (command == Command::whole_plane) {
    std::optional<WholePlaneResult> result;
    const bool ok = guarded(m, "march", log, [&] {
      result = whole_plane_march(config.solver, metric, initial);
      const WholePlaneResult& wp = *result;
      m.diagnostics()["march"]["forward"] = to_node(wp.forward.diag);
      m.diagnostics()["march"]["backward"] = to_node(wp.backward.diag);
      m.diagnostics()["data_line_mismatch"] = num(data_line_mismatch(wp.forward, wp.backward));
      m.trajectory("forward", "trajectory_forward.csv", wp.forward);
      m.trajectory("backward", "trajectory_backward.csv", wp.backward);
      if (!wp.forward.diag.completed) fail(ErrorKind::numerical, wp.forward.diag.failure);
      if (!wp.backward.diag.completed) fail(ErrorKind::numerical, wp.backward.diag.failure);
    });
    if (ok) {
      const WholePlaneResult& wp = *result;
      const Trajectory glued = glue(wp);
      guarded(m, "verify", log, [&] {
        m.diagnostics()["verify"]["forward"] = to_node(verify_trajectory(wp.forward, metric, config));
        m.diagnostics()["verify"]["backward"] =
            to_node(verify_trajectory(wp.backward, metric, config));
        m.write_table("snapshots.csv", snapshot_table(glued, trajectory_second_form(glued, metric),
                                                      config.output.snapshot_stride));
      });
      if (config.reconstruct.enabled)
        reconstruct_stage(m, glued, metric, config, wp.backward.grid.rows - 1, log);
    }
  } else if (sweep) {
    SweepResult res;
    guarded(m, "march", log, [&] {
      res = epsilon_sweep(config.solver, metric, initial);
      Table summary;
      summary.header = {"epsilon", "completed", "steps", "breach_events", "max_breach"};
      for (std::size_t k = 0; k < res.members.size(); ++k) {
        const Trajectory& t = res.members[k].trajectory;
        m.diagnostics()["march"].push_back(to_node(t.diag));
        m.trajectory("sweep", "trajectory_eps" + std::to_string(k) + ".csv", t);
        summary.rows.push_back({t.epsilon, t.diag.completed ? 1.0 : 0.0,
                                static_cast<double>(t.diag.steps),
                                static_cast<double>(t.diag.breach_events), t.diag.max_breach});
      }
      m.write_table("sweep_march.csv", summary);
      if (!res.completed) fail(ErrorKind::numerical, res.failure);
    });
    if (res.completed) {
      guarded(m, "verify", log, [&] {
        Table t;
        t.header = {"epsilon",      "sup_norm",        "energy",          "bound",
                    "weak_max_abs", "weak_relative",   "constraint_averaged_max",
                    "weak_distance_to_previous"};
        const CompactnessReport rep =
            compactness_report(res, config.verify.window_fraction * config.solver.period);
        for (std::size_t k = 0; k < res.members.size(); ++k) {
          const VerifySummary v = verify_trajectory(res.members[k].trajectory, metric, config);
          m.diagnostics()["verify"].push_back(to_node(v));
          t.rows.push_back({res.members[k].epsilon, rep.entries[k].sup_norm, v.energy.energy,
                            v.energy.bound, v.weak.max_abs, v.weak.relative,
                            v.constraint_averaged.max,
                            k == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : res.weak_distance[k - 1]});
        }
        YAML::Node c;
        c["sup_variation"] = num(rep.sup_variation);
        c["energy_ratio"] = num(rep.energy_ratio);
        c["energy_slope"] = num(rep.energy_slope);
        c["energy_grows_as_eps_decreases"] = rep.energy_grows_as_eps_decreases;
        m.diagnostics()["compactness"] = c;
        m.write_table("sweep.csv", t);
        const SweepMember& fin = res.members.back();
        m.write_table("snapshots.csv",
                      snapshot_table(fin.trajectory, fin.form, config.output.snapshot_stride));
      });
      if (config.reconstruct.enabled)
        reconstruct_stage(m, res.members.back().trajectory, metric, config, 0, log);
    }
  } else {
    Trajectory traj;
    guarded(m, "march", log, [&] {
      traj = march(config.solver, metric, initial);
      m.diagnostics()["march"] = to_node(traj.diag);
      m.trajectory("main", "trajectory.csv", traj);
      log << "march: " << traj.diag.steps << " steps, " << traj.diag.breach_events
          << " breach events\n";
      if (!traj.diag.completed) fail(ErrorKind::numerical, traj.diag.failure);
    });
    if (traj.grid.rows >= 2) {
      guarded(m, "verify", log, [&] {
        const VerifySummary v = verify_trajectory(traj, metric, config);
        m.diagnostics()["verify"] = to_node(v);
        m.write_table("snapshots.csv", snapshot_table(traj, trajectory_second_form(traj, metric),
                                                      config.output.snapshot_stride));
        log << "verify: weak-form relative " << format_double(v.weak.relative)
            << ", averaged constraint " << format_double(v.constraint_averaged.max) << "\n";
      });
      if (config.reconstruct.enabled && traj.diag.completed)
        reconstruct_stage(m, traj, metric, config, 0, log);
    }
  }
  m.finish();
  return m.failed() ? kExitStageFailed : kExitOk;
}

namespace {

struct LoadedRun {
  RunConfig config;
  std::string command;
  std::vector<std::pair<std::string, Trajectory>> trajectories;  ///< (role, trajectory)
};

LoadedRun load_run(const std::string& directory) {
  const std::string manifest = (fs::path(directory) / "manifest.yaml").string();
  if (!fs::exists(manifest)) fail(ErrorKind::io, "no manifest.yaml in '" + directory + "'");
  LoadedRun run;
  run.config = load_config(manifest);
  YAML::Node root;
  try {
    root = YAML::LoadFile(manifest);
    run.command = root["command"].as<std::string>();
    for (const auto& t : root["trajectories"]) {
      const std::string file = (fs::path(directory) / t["file"].as<std::string>()).string();
      Trajectory traj =
          trajectory_from_table(read_csv(file), grid_from_node(t["grid"]), t["epsilon"].as<double>());
      traj.diag.completed = t["completed"].as<bool>();
      run.trajectories.emplace_back(t["role"].as<std::string>(), std::move(traj));
    }
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::io, std::string("malformed manifest: ") + e.what());
  }
  if (run.trajectories.empty()) fail(ErrorKind::io, "manifest lists no trajectories");
  return run;
}

}  // namespace

int verify_artifacts(const std::string& directory, std::ostream& log) {
  const LoadedRun run = load_run(directory);
  const Metric metric = build_metric(run.config.metric);
  YAML::Node report;
  report["source"] = run.command;
  bool ok = true;
  for (const auto& [role, traj] : run.trajectories) {
    YAML::Node entry;
    entry["role"] = role;
    entry["epsilon"] = num(traj.epsilon);
    try {
      const VerifySummary v = verify_trajectory(traj, metric, run.config);
      entry["summary"] = to_node(v);
      log << role << " eps " << format_double(traj.epsilon) << ": weak-form relative "
          << format_double(v.weak.relative) << ", averaged constraint "
          << format_double(v.constraint_averaged.max) << "\n";
    } catch (const Error& e) {
      entry["failure"] = e.what();
      ok = false;
      log << role << ": " << e.what() << "\n";
    }
    report["trajectories"].push_back(entry);
  }
  write_file_atomic((fs::path(directory) / "verify.yaml").string(), emit(report));
  return ok ? kExitOk : kExitStageFailed;
}

int reconstruct_artifacts(const std::string& directory, std::ostream& log) {
  const LoadedRun run = load_run(directory);
  const Metric metric = build_metric(run.config.metric);
  Trajectory traj;
  std::size_t data_row = 0;
  if (run.command == "whole-plane") {
    WholePlaneResult wp{{}, {}, metric};
    for (const auto& [role, t] : run.trajectories) (role == "forward" ? wp.forward : wp.backward) = t;
    traj = glue(wp);
    data_row = wp.backward.grid.rows - 1;
  } else {
    traj = run.trajectories.back().second;
  }
  try {
    const ReconstructSummary r = reconstruct_trajectory(
        traj, metric, run.config, data_row, (fs::path(directory) / "mesh.obj").string(),
        (fs::path(directory) / "mesh_vertices.csv").string());
    YAML::Node report;
    report["source"] = run.command;
    report["summary"] = to_node(r);
    write_file_atomic((fs::path(directory) / "reconstruct.yaml").string(), emit(report));
    log << "first-form max " << format_double(r.first_form.max) << ", defect "
        << format_double(r.max_defect) << "\n";
  } catch (const Error& e) {
    log << "reconstruct: " << e.what() << "\n";
    return kExitStageFailed;
  }
  return kExitOk;
}

std::string list_metrics_text() {
  std::ostringstream os;
  for (const CatalogEntry& e : metric_catalog()) {
    os << e.name << "\n";
    for (const auto& [key, desc] : e.parameters) os << "  " << key << ": " << desc << "\n";
    os << "  note: " << e.note << "\n";
  }
  return os.str();
}

}  // namespace codazzi
