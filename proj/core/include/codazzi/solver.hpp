#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codazzi/error.hpp"
#include "codazzi/fluid.hpp"
#include "codazzi/grid.hpp"
#include "codazzi/metric.hpp"

namespace codazzi {

enum class RegionPolicy {
  abort,   ///< stop the march at the first breach beyond tolerance
  record,  ///< keep marching, count breach events
};

struct SolverConfig {
  Orientation orientation = Orientation::x_time_like;
  double t_start = 0.0;
  double t_end = 1.0;
  double period = 6.283185307179586;
  std::size_t n_space = 256;
  std::size_t n_time = 256;  ///< output intervals; rows = n_time + 1
  double epsilon = 0.05;
  std::vector<double> epsilon_sweep;
  double alpha = 1.3;
  double beta = 1.4142135623730951;
  double safety = 0.4;
  double region_tolerance = 1e-6;
  RegionPolicy region_policy = RegionPolicy::abort;
  double sonic_guard = kSonicGuard;
  std::size_t max_steps = 20'000'000;

  void validate() const;
  DiamondRegion region() const { return DiamondRegion(alpha, beta, orientation); }
  StripGrid strip() const;
};

/// One row of Riemann invariants on the periodic space-like grid.
struct RiemannRow {
  std::vector<double> wp;
  std::vector<double> wm;
};

/// Tilde connection at each space-like node of one time-like level.
struct MetricSlice {
  std::vector<Symbols> tilde;
};

MetricSlice metric_slice(const Metric& metric, const StripGrid& grid, double t);

/// Values and space-like derivatives at one node. `*_up` is the upwinded derivative used
/// for the transverse term.
struct RiemannJet {
  double wp = 0, wm = 0;
  double wp_s = 0, wm_s = 0;
  double wp_ss = 0, wm_ss = 0;
  double wp_up = 0, wm_up = 0;
};

struct Rates {
  double wp = 0;
  double wm = 0;
};

/// Pointwise time derivative of W± from the viscous Riemann-form system:
/// q√(q²-1)(τ± ∂ₜW± + σ± ∂ₛW±) = ±ε∂ₛ²W± ± (2εq/ρ)∂ₛW± ∂ₛ(ρq) + (ε/ρ)(∂ₛW±)² ± S₁ - (q²-1)S₂
/// with (τ, σ) = (λ, μ) when x is time-like and (μ, λ) when y is time-like.
Rates assemble_rates(const RiemannJet& jet, const Symbols& tilde, double epsilon,
                     Orientation orientation, double sonic_guard = kSonicGuard);

/// Row of ∂ₜW± with periodic central differences and 2nd-order upwinding of the transverse term.
RiemannRow viscous_rhs(const RiemannRow& row, const MetricSlice& slice, double ds, double epsilon,
                       Orientation orientation, double sonic_guard = kSonicGuard);

/// Largest stable step for the current row.
double stable_step(const RiemannRow& row, double ds, double epsilon, Orientation orientation,
                   double safety, double sonic_guard = kSonicGuard);

struct MarchDiagnostics {
  std::size_t steps = 0;
  std::size_t retries = 0;
  std::size_t breach_events = 0;  ///< (step, node) pairs beyond tolerance after retry
  std::size_t breach_steps = 0;
  double max_breach = 0.0;
  double first_breach_t = 0.0;
  double min_dt = 0.0;
  double max_dt = 0.0;
  bool completed = false;
  std::optional<ErrorKind> failure_kind;
  std::string failure;
};

struct Trajectory {
  StripGrid grid;  ///< rows = stored output rows
  RiemannState w;
  double epsilon = 0.0;
  MarchDiagnostics diag;
};

/// Marches the initial row from t_start to t_end. Configuration errors throw; failures during
/// the march are reported in diag with the rows computed so far.
Trajectory march(const SolverConfig& config, const Metric& metric, const RiemannRow& initial);

/// Checks orientation/periodicity requirements of the metric for this configuration.
void check_metric_admissible(const SolverConfig& config, const Metric& metric);

/// W± rows from (q, θ) samples on the periodic grid: converted, checked against the region,
/// mollified with a bump of support radius `width` (0 disables).
RiemannRow mollify_initial_data(const std::vector<double>& q0, const std::vector<double>& theta0,
                                const DiamondRegion& region, double period, double width);

/// Constant state.
RiemannRow constant_row(std::size_t n, double q, double theta);

/// Random trigonometric perturbation with modes 1..modes about the region centre, applied
/// independently to W₊ and W₋ and scaled to sup-norm `amplitude` (in W units).
RiemannRow perturbed_row(const DiamondRegion& region, std::size_t n, int modes, double amplitude,
                         std::uint64_t seed);

struct StripMetricFields {
  Grid gamma;
  Grid sqrt_det;
  Grid kappa;
};
StripMetricFields strip_metric_fields(const Metric& metric, const StripGrid& grid);

/// Converts a trajectory into the scaled/unscaled/h second forms on its strip.
SecondForm trajectory_second_form(const Trajectory& traj, const Metric& metric);
FluidState trajectory_fluid(const Trajectory& traj);

struct EnergyRecord {
  double energy = 0.0;        ///< ε∫∫(ρ³ q_s²/q² + ρ θ_s²)
  double sqrt_eps_q = 0.0;    ///< √ε ‖∂ₛq‖_{L²}
  double sqrt_eps_theta = 0.0;
  double source_integral = 0.0;      ///< ∫∫B
  double source_abs_integral = 0.0;  ///< ∫∫|B|
  double source_sup = 0.0;           ///< sup|B|
  double flux_start = 0.0;           ///< ∫ρu ds (x time-like) or ∫ρv ds at the first row
  double flux_end = 0.0;
  double bound = 0.0;             ///< ∫∫|B| + |flux_start| + |flux_end|
  double identity_residual = 0.0;  ///< energy - (∫∫B - (flux_end - flux_start))
};

EnergyRecord energy_diagnostics(const Trajectory& traj, const Metric& metric);

struct BalanceReport {
  double max_residual = 0.0;  ///< max over row pairs of |d/dt ∫flux - ∫source|
  double scale = 0.0;         ///< max |∫source|, for relative comparisons
};

/// Period-integrated momentum balance between consecutive output rows.
BalanceReport balance_check(const Trajectory& traj, const Metric& metric);

/// Top-hat moving average: periodic in columns, truncated at the first and last rows.
Grid box_average(const Grid& g, std::size_t window_rows, std::size_t window_cols);

struct SweepMember {
  double epsilon = 0.0;
  Trajectory trajectory;
  SecondForm form;
  EnergyRecord energy;
};

struct SweepResult {
  std::vector<SweepMember> members;
  std::vector<double> weak_distance;  ///< between successive members, after P/16 averaging
  bool completed = false;
  std::string failure;
};

/// One march per ε (strictly decreasing list); stops at the first failed member.
SweepResult epsilon_sweep(const SolverConfig& config, const Metric& metric,
                          const RiemannRow& initial);

struct WholePlaneResult {
  Trajectory forward;   ///< t from t_start to t_end
  Trajectory backward;  ///< mapped back to the original frame, t from t_start down to 2t_start - t_end
  Metric reflected;
};

/// Forward march plus a forward march on the reflected problem, mapped back. Both halves share
/// the initial row exactly.
WholePlaneResult whole_plane_march(const SolverConfig& config, const Metric& metric,
                                   const RiemannRow& initial);

/// Glues backward (reversed) and forward halves into one strip sharing the data row.
Trajectory glue(const WholePlaneResult& wp);

}  // namespace codazzi
