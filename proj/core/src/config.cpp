#include "codazzi/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "codazzi/error.hpp"
#include "codazzi/table_io.hpp"

namespace codazzi {

namespace fs = std::filesystem;

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::constant: return "constant";
    case DataKind::perturbation: return "perturbation";
    case DataKind::file: return "file";
  }
  return "?";
}

std::string to_string(RegionPolicy policy) {
  return policy == RegionPolicy::abort ? "abort" : "record";
}

namespace {

void reject_unknown(const YAML::Node& node, const std::string& section,
                    std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) fail(ErrorKind::config, "section '" + section + "' must be a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) fail(ErrorKind::config, "unknown key '" + section + "." + key + "'");
  }
}

template <class T>
T read(const YAML::Node& node, const char* key, const std::string& section, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail(ErrorKind::config, "bad value for '" + section + "." + key + "'");
  }
}

template <class T>
std::optional<T> read_opt(const YAML::Node& node, const char* key, const std::string& section) {
  if (!node || !node[key] || node[key].IsNull()) return std::nullopt;
  return read<T>(node, key, section, T{});
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative()) path = fs::path(base_dir) / path;
  return fs::weakly_canonical(path).string();
}

/// Plain scalar in shortest round-trip form; YAML spellings for non-finite values.
std::string num(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return format_double(v);
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir,
                       const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::config, std::string("config is not valid YAML: ") + e.what());
  }
  if (root && root.IsMap() && root["config"] && root["manifest_version"]) root = root["config"];
  if (!root || !root.IsMap()) fail(ErrorKind::config, "config must be a mapping");
  reject_unknown(root, "config",
                 {"name", "metric", "solver", "data", "verify", "reconstruct", "output", "seed"});

  RunConfig c;
  c.name = read<std::string>(root, "name", "config", name);
  c.seed = read<std::uint64_t>(root, "seed", "config", 0);

  const YAML::Node m = root["metric"];
  if (!m) fail(ErrorKind::config, "config needs a metric section");
  reject_unknown(m, "metric",
                 {"family", "c", "beta", "kappa0", "relation", "lambda", "a", "b", "path",
                  "periodicize"});
  MetricSection& ms = c.metric;
  ms.family = read<std::string>(m, "family", "metric", ms.family);
  ms.c = read<double>(m, "c", "metric", ms.c);
  ms.beta = read<double>(m, "beta", "metric", ms.beta);
  ms.kappa0 = read_opt<double>(m, "kappa0", "metric");
  {
    const auto rel = read<std::string>(m, "relation", "metric", "ode1");
    if (rel == "ode1")
      ms.relation = BetaRelation::ode1;
    else if (rel == "ode2")
      ms.relation = BetaRelation::ode2;
    else
      fail(ErrorKind::config, "metric.relation must be ode1 or ode2");
  }
  ms.lambda = read<double>(m, "lambda", "metric", ms.lambda);
  ms.a = read<double>(m, "a", "metric", ms.a);
  ms.b = read<double>(m, "b", "metric", ms.b);
  ms.path = resolve_path(read<std::string>(m, "path", "metric", ""), base_dir);
  if (const YAML::Node p = m["periodicize"]) {
    reject_unknown(p, "metric.periodicize", {"period", "beta"});
    ms.periodicize_period = read<double>(p, "period", "metric.periodicize", 2.0 * std::numbers::pi);
    ms.periodicize_beta = read<double>(p, "beta", "metric.periodicize", ms.beta);
  }

  const YAML::Node s = root["solver"];
  reject_unknown(s, "solver",
                 {"orientation", "t_start", "t_end", "period", "n_space", "n_time", "epsilon",
                  "epsilon_sweep", "alpha", "beta", "safety", "region_tolerance",
                  "region_policy", "max_steps"});
  SolverConfig& sc = c.solver;
  {
    const auto o = read<std::string>(s, "orientation", "solver", "x");
    if (o == "x")
      sc.orientation = Orientation::x_time_like;
    else if (o == "y")
      sc.orientation = Orientation::y_time_like;
    else
      fail(ErrorKind::config, "solver.orientation must be x or y (the time-like coordinate)");
  }
  sc.t_start = read<double>(s, "t_start", "solver", sc.t_start);
  sc.t_end = read<double>(s, "t_end", "solver", sc.t_end);
  sc.period = read<double>(s, "period", "solver", sc.period);
  sc.n_space = read<std::size_t>(s, "n_space", "solver", sc.n_space);
  sc.n_time = read<std::size_t>(s, "n_time", "solver", sc.n_time);
  sc.epsilon = read<double>(s, "epsilon", "solver", sc.epsilon);
  sc.epsilon_sweep = read<std::vector<double>>(s, "epsilon_sweep", "solver", {});
  sc.alpha = read<double>(s, "alpha", "solver", sc.alpha);
  sc.beta = read<double>(s, "beta", "solver", sc.beta);
  sc.safety = read<double>(s, "safety", "solver", sc.safety);
  sc.region_tolerance = read<double>(s, "region_tolerance", "solver", sc.region_tolerance);
  sc.max_steps = read<std::size_t>(s, "max_steps", "solver", sc.max_steps);
  {
    const auto p = read<std::string>(s, "region_policy", "solver", "abort");
    if (p == "abort")
      sc.region_policy = RegionPolicy::abort;
    else if (p == "record")
      sc.region_policy = RegionPolicy::record;
    else
      fail(ErrorKind::config, "solver.region_policy must be abort or record");
  }

  const YAML::Node d = root["data"];
  reject_unknown(d, "data",
                 {"kind", "q", "theta", "modes", "amplitude", "amplitude_fraction", "path",
                  "mollify_width"});
  DataSection& ds = c.data;
  {
    const auto k = read<std::string>(d, "kind", "data", "constant");
    if (k == "constant")
      ds.kind = DataKind::constant;
    else if (k == "perturbation")
      ds.kind = DataKind::perturbation;
    else if (k == "file")
      ds.kind = DataKind::file;
    else
      fail(ErrorKind::config, "data.kind must be constant, perturbation or file");
  }
  ds.q = read<double>(d, "q", "data", ds.q);
  ds.theta = read_opt<double>(d, "theta", "data");
  ds.modes = read<int>(d, "modes", "data", ds.modes);
  ds.amplitude = read_opt<double>(d, "amplitude", "data");
  ds.amplitude_fraction = read_opt<double>(d, "amplitude_fraction", "data");
  ds.path = resolve_path(read<std::string>(d, "path", "data", ""), base_dir);
  ds.mollify_width = read<double>(d, "mollify_width", "data", ds.mollify_width);

  const YAML::Node v = root["verify"];
  reject_unknown(v, "verify",
                 {"centers_t", "centers_s", "half_width_t", "half_width_s", "window_fraction"});
  VerifySection& vs = c.verify;
  vs.family.centers_t = read<int>(v, "centers_t", "verify", vs.family.centers_t);
  vs.family.centers_s = read<int>(v, "centers_s", "verify", vs.family.centers_s);
  vs.family.half_width_t = read<double>(v, "half_width_t", "verify", vs.family.half_width_t);
  vs.family.half_width_s = read<double>(v, "half_width_s", "verify", vs.family.half_width_s);
  vs.window_fraction = read<double>(v, "window_fraction", "verify", vs.window_fraction);

  const YAML::Node r = root["reconstruct"];
  reject_unknown(r, "reconstruct", {"enabled", "base_row", "base_col", "lattice"});
  c.reconstruct.enabled = read<bool>(r, "enabled", "reconstruct", c.reconstruct.enabled);
  c.reconstruct.base_row = read<long>(r, "base_row", "reconstruct", c.reconstruct.base_row);
  c.reconstruct.base_col = read<long>(r, "base_col", "reconstruct", c.reconstruct.base_col);
  c.reconstruct.lattice = read<std::size_t>(r, "lattice", "reconstruct", c.reconstruct.lattice);

  const YAML::Node o = root["output"];
  reject_unknown(o, "output", {"directory", "snapshot_stride"});
  c.output.directory = read<std::string>(o, "directory", "output", "");
  c.output.snapshot_stride =
      read<std::size_t>(o, "snapshot_stride", "output", c.output.snapshot_stride);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path p(path);
  const std::string dir = p.has_parent_path() ? p.parent_path().string() : ".";
  return parse_config(ss.str(), dir, p.stem().string());
}

std::string config_to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "seed" << YAML::Value << c.seed;

  const MetricSection& m = c.metric;
  out << YAML::Key << "metric" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << m.family;
  if (m.family == "catenoid") {
    out << YAML::Key << "c" << YAML::Value << num(m.c);
    out << YAML::Key << "beta" << YAML::Value << num(m.beta);
    if (m.kappa0) out << YAML::Key << "kappa0" << YAML::Value << num(*m.kappa0);
    out << YAML::Key << "relation" << YAML::Value
        << (m.relation == BetaRelation::ode1 ? "ode1" : "ode2");
  } else if (m.family == "helicoid-isothermal") {
    out << YAML::Key << "lambda" << YAML::Value << num(m.lambda);
  } else if (m.family == "torus-isothermal") {
    out << YAML::Key << "a" << YAML::Value << num(m.a);
    out << YAML::Key << "b" << YAML::Value << num(m.b);
  } else {
    out << YAML::Key << "path" << YAML::Value << m.path;
  }
  if (m.periodicize_period) {
    out << YAML::Key << "periodicize" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "period" << YAML::Value << num(*m.periodicize_period);
    out << YAML::Key << "beta" << YAML::Value << num(m.periodicize_beta.value_or(m.beta));
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const SolverConfig& s = c.solver;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "orientation" << YAML::Value
      << (s.orientation == Orientation::x_time_like ? "x" : "y");
  out << YAML::Key << "t_start" << YAML::Value << num(s.t_start);
  out << YAML::Key << "t_end" << YAML::Value << num(s.t_end);
  out << YAML::Key << "period" << YAML::Value << num(s.period);
  out << YAML::Key << "n_space" << YAML::Value << s.n_space;
  out << YAML::Key << "n_time" << YAML::Value << s.n_time;
  out << YAML::Key << "epsilon" << YAML::Value << num(s.epsilon);
  out << YAML::Key << "epsilon_sweep" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double e : s.epsilon_sweep) out << num(e);
  out << YAML::EndSeq;
  out << YAML::Key << "alpha" << YAML::Value << num(s.alpha);
  out << YAML::Key << "beta" << YAML::Value << num(s.beta);
  out << YAML::Key << "safety" << YAML::Value << num(s.safety);
  out << YAML::Key << "region_tolerance" << YAML::Value << num(s.region_tolerance);
  out << YAML::Key << "region_policy" << YAML::Value << to_string(s.region_policy);
  out << YAML::Key << "max_steps" << YAML::Value << s.max_steps;
  out << YAML::EndMap;

  const DataSection& d = c.data;
  out << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(d.kind);
  switch (d.kind) {
    case DataKind::constant:
      out << YAML::Key << "q" << YAML::Value << num(d.q);
      if (d.theta) out << YAML::Key << "theta" << YAML::Value << num(*d.theta);
      break;
    case DataKind::perturbation:
      out << YAML::Key << "modes" << YAML::Value << d.modes;
      if (d.amplitude) out << YAML::Key << "amplitude" << YAML::Value << num(*d.amplitude);
      if (d.amplitude_fraction)
        out << YAML::Key << "amplitude_fraction" << YAML::Value << num(*d.amplitude_fraction);
      break;
    case DataKind::file:
      out << YAML::Key << "path" << YAML::Value << d.path;
      break;
  }
  out << YAML::Key << "mollify_width" << YAML::Value << num(d.mollify_width);
  out << YAML::EndMap;

  const VerifySection& v = c.verify;
  out << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "centers_t" << YAML::Value << v.family.centers_t;
  out << YAML::Key << "centers_s" << YAML::Value << v.family.centers_s;
  out << YAML::Key << "half_width_t" << YAML::Value << num(v.family.half_width_t);
  out << YAML::Key << "half_width_s" << YAML::Value << num(v.family.half_width_s);
  out << YAML::Key << "window_fraction" << YAML::Value << num(v.window_fraction);
  out << YAML::EndMap;

  out << YAML::Key << "reconstruct" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << c.reconstruct.enabled;
  out << YAML::Key << "base_row" << YAML::Value << c.reconstruct.base_row;
  out << YAML::Key << "base_col" << YAML::Value << c.reconstruct.base_col;
  out << YAML::Key << "lattice" << YAML::Value << c.reconstruct.lattice;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << c.output.directory;
  out << YAML::Key << "snapshot_stride" << YAML::Value << c.output.snapshot_stride;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) fail(ErrorKind::config, "empty entry in epsilon list");
    cell = cell.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      fail(ErrorKind::config, "bad epsilon '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorKind::config, "epsilon list is empty");
  return out;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto parse = [&](const std::string& part) {
    std::size_t v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size() || v == 0)
      fail(ErrorKind::config, "grid must look like NsxNt, got '" + text + "'");
    return v;
  };
  if (x == std::string::npos) fail(ErrorKind::config, "grid must look like NsxNt, got '" + text + "'");
  return {parse(text.substr(0, x)), parse(text.substr(x + 1))};
}

Metric build_metric(const MetricSection& m) {
  Metric metric = [&] {
    if (m.family == "catenoid") {
      const double k0 = m.kappa0.value_or(catenoid_consistent_kappa0(m.c, m.beta, m.relation));
      return catenoid(m.c, m.beta, k0, m.relation, 1e-8);
    }
    if (m.family == "helicoid-isothermal") return isothermal_helicoid(m.lambda);
    if (m.family == "torus-isothermal") return isothermal_torus(m.a, m.b);
    if (m.family == "custom") {
      if (m.path.empty()) fail(ErrorKind::config, "custom metric needs metric.path");
      if (!fs::exists(m.path)) fail(ErrorKind::io, "metric table '" + m.path + "' does not exist");
      return load_tabulated_metric(m.path);
    }
    fail(ErrorKind::config, "unknown metric family '" + m.family + "' (see list-metrics)");
  }();
  if (m.periodicize_period)
    metric = periodicize_metric(metric, *m.periodicize_period, m.periodicize_beta.value_or(m.beta));
  return metric;
}

RiemannRow build_initial_row(const RunConfig& c) {
  const DiamondRegion region = c.solver.region();
  const std::size_t n = c.solver.n_space;
  RiemannRow row;
  switch (c.data.kind) {
    case DataKind::constant: {
      const double theta = c.data.theta.value_or(region.center());
      if (!region.contains(c.data.q, theta))
        fail(ErrorKind::region, "constant data (q, theta) = (" + format_double(c.data.q) + ", " +
                                    format_double(theta) + ") lies outside the diamond region");
      row = constant_row(n, c.data.q, theta);
      break;
    }
    case DataKind::perturbation: {
      if (c.data.amplitude && c.data.amplitude_fraction)
        fail(ErrorKind::config, "give data.amplitude or data.amplitude_fraction, not both");
      const double amp = c.data.amplitude
                             ? *c.data.amplitude
                             : c.data.amplitude_fraction.value_or(0.25) * region.wp_extent();
      if (!(amp >= 0.0)) fail(ErrorKind::config, "perturbation amplitude must be non-negative");
      if (c.data.modes < 1) fail(ErrorKind::config, "perturbation needs at least one mode");
      row = perturbed_row(region, n, c.data.modes, amp, c.seed);
      break;
    }
    case DataKind::file: {
      if (c.data.path.empty()) fail(ErrorKind::config, "file data needs data.path");
      if (!fs::exists(c.data.path))
        fail(ErrorKind::io, "data table '" + c.data.path + "' does not exist");
      const Table t = read_csv(c.data.path);
      const int iq = t.column("q"), it = t.column("theta");
      if (iq < 0 || it < 0) fail(ErrorKind::config, "data table needs columns q and theta");
      if (t.rows.size() != n)
        fail(ErrorKind::config, "data table has " + std::to_string(t.rows.size()) +
                                    " rows, solver.n_space is " + std::to_string(n));
      std::vector<double> q(n), th(n);
      for (std::size_t j = 0; j < n; ++j) {
        q[j] = t.rows[j][static_cast<std::size_t>(iq)];
        th[j] = t.rows[j][static_cast<std::size_t>(it)];
      }
      return mollify_initial_data(q, th, region, c.solver.period, c.data.mollify_width);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!region.contains_invariants(row.wp[j], row.wm[j]))
      fail(ErrorKind::region, "initial data leaves the diamond region; reduce the amplitude");
  return row;
}

void validate_config(const RunConfig& c) {
  c.solver.validate();
  if (c.output.snapshot_stride < 1) fail(ErrorKind::config, "output.snapshot_stride must be >= 1");
  if (c.verify.window_fraction <= 0.0 || c.verify.window_fraction > 1.0)
    fail(ErrorKind::config, "verify.window_fraction must lie in (0, 1]");
  const Metric metric = build_metric(c.metric);
  check_metric_admissible(c.solver, metric);
  // every strip node must be hyperbolic
  const StripGrid g = c.solver.strip();
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) (void)eval_metric(metric, g.x(i, j), g.y(i, j));
  (void)build_initial_row(c);
}

std::string resolve_output_directory(const RunConfig& c) {
  const char* root = std::getenv("CODAZZI_OUTPUT_ROOT");
  const bool has_root = root && *root;
  fs::path dir(c.output.directory);
  if (dir.empty()) dir = (has_root ? fs::path(root) : fs::path("codazzi-out")) / c.name;
  else if (dir.is_relative() && has_root) dir = fs::path(root) / dir;
  return dir.lexically_normal().string();
}

}  // namespace codazzi
