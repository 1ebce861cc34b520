#pragma once

#include <iosfwd>
#include <string>

#include "codazzi/config.hpp"
#include "codazzi/reconstruct.hpp"
#include "codazzi/solver.hpp"
#include "codazzi/table_io.hpp"
#include "codazzi/verify.hpp"

namespace codazzi {

const char* version();

enum class Command { run, whole_plane, sweep };

/// Exit codes shared by the pipeline entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitStageFailed = 1;
inline constexpr int kExitInvalid = 2;

/// Full-resolution W± per node: i,j,t,s,Wp,Wm.
Table trajectory_table(const Trajectory& traj);
/// `grid` carries the exact spacing; rows and cols must match the table.
Trajectory trajectory_from_table(const Table& table, const StripGrid& grid, double epsilon);

/// Every `stride`-th row plus the last: t,s,q,theta,Wp,Wm,Lt,Mt,Nt,L,M,N.
Table snapshot_table(const Trajectory& traj, const SecondForm& form, std::size_t stride);

struct VerifySummary {
  WeakFormReport weak;
  ConstraintStats constraint_raw;
  ConstraintStats constraint_averaged;
  ConstraintStats constraint_unscaled;
  EnergyRecord energy;
  BalanceReport balance;
};

VerifySummary verify_trajectory(const Trajectory& traj, const Metric& metric,
                                const RunConfig& config);

struct ReconstructSummary {
  FirstFormError first_form;
  double max_defect = 0.0;
  double max_normal_drift = 0.0;
  double max_normal_tangent = 0.0;
  double curvature_rel_l2 = 0.0;  ///< angle-defect curvature against κ at interior vertices
};

/// Frames, positions, mesh and vertex table for a trajectory. `base_row` < 0 picks `data_row`.
ReconstructSummary reconstruct_trajectory(const Trajectory& traj, const Metric& metric,
                                          const RunConfig& config, std::size_t data_row,
                                          const std::string& mesh_path,
                                          const std::string& table_path);

/// Validates, computes and writes artifacts into the resolved output directory.
int execute(const RunConfig& config, Command command, std::ostream& log);

/// Re-runs a stage from the artifacts of an earlier `execute` in `directory`.
int verify_artifacts(const std::string& directory, std::ostream& log);
int reconstruct_artifacts(const std::string& directory, std::ostream& log);

std::string list_metrics_text();

}  // namespace codazzi
