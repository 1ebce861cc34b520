#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "codazzi/metric.hpp"
#include "codazzi/solver.hpp"
#include "codazzi/verify.hpp"

namespace codazzi {

struct MetricSection {
  std::string family = "helicoid-isothermal";
  double c = 1.0;
  double beta = 1.4142135623730951;
  std::optional<double> kappa0;  ///< catenoid; defaults to the consistent value
  BetaRelation relation = BetaRelation::ode1;
  double lambda = 1.0;
  double a = 2.0;
  double b = 1.0;
  std::string path;  ///< custom table
  std::optional<double> periodicize_period;
  std::optional<double> periodicize_beta;
};

enum class DataKind { constant, perturbation, file };

struct DataSection {
  DataKind kind = DataKind::constant;
  double q = 1.4142135623730951;
  std::optional<double> theta;  ///< defaults to the region centre
  int modes = 3;
  std::optional<double> amplitude;           ///< W units
  std::optional<double> amplitude_fraction;  ///< of the diamond's W₊ extent
  std::string path;                          ///< table with columns q,theta
  double mollify_width = 0.0;
};

struct VerifySection {
  TestFamilySpec family;
  double window_fraction = 1.0 / 16.0;  ///< averaging window as a fraction of the period
};

struct ReconstructSection {
  bool enabled = false;
  long base_row = -1;  ///< -1: data row
  long base_col = -1;  ///< -1: middle column
  std::size_t lattice = 8;
};

struct OutputSection {
  std::string directory;
  std::size_t snapshot_stride = 16;
};

struct RunConfig {
  std::string name = "run";
  MetricSection metric;
  SolverConfig solver;
  DataSection data;
  VerifySection verify;
  ReconstructSection reconstruct;
  OutputSection output;
  std::uint64_t seed = 0;
};

/// Reads a config file, or the `config` node of a manifest. Relative paths inside are resolved
/// against the file's directory. Unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir = ".",
                       const std::string& name = "run");

/// Normalized YAML text of the config; parsing it back gives an identical config.
std::string config_to_yaml(const RunConfig& config);

/// `--eps` override: comma-separated list.
std::vector<double> parse_eps_list(const std::string& text);
/// `--grid` override: "NsxNt".
std::pair<std::size_t, std::size_t> parse_grid(const std::string& text);

/// Checks everything that can be checked before compute: solver fields, metric construction and
/// negative curvature on the strip, initial data inside the diamond region.
void validate_config(const RunConfig& config);

Metric build_metric(const MetricSection& section);
RiemannRow build_initial_row(const RunConfig& config);

/// Output directory after `CODAZZI_OUTPUT_ROOT` is applied to relative or empty entries.
std::string resolve_output_directory(const RunConfig& config);

std::string to_string(DataKind kind);
std::string to_string(RegionPolicy policy);

}  // namespace codazzi
