#pragma once

#include <string>
#include <vector>

#include "codazzi/fluid.hpp"
#include "codazzi/grid.hpp"
#include "codazzi/metric.hpp"
#include "codazzi/solver.hpp"

namespace codazzi {

/// C² quintic bump 1 - (10r³ - 15r⁴ + 6r⁵) on |r| < 1.
double quintic_bump(double r);
double quintic_bump_derivative(double r);

/// Tensor-product bumps on a lattice of centres at (k+1)/(n+1) of each extent, with half-widths
/// given as fractions of the time-like extent and of the period.
struct TestFamilySpec {
  int centers_t = 5;
  int centers_s = 5;
  double half_width_t = 1.0 / 6.0;
  double half_width_s = 1.0 / 6.0;
};

struct TestFunction {
  double ct = 0, cs = 0;  ///< centre
  double wt = 0, ws = 0;  ///< half-widths
};

std::vector<TestFunction> build_test_family(const StripGrid& grid, const TestFamilySpec& spec);

struct WeakFormReport {
  std::vector<TestFunction> functions;
  std::vector<double> residual1;  ///< ∫∫[-M̃φₓ + L̃φᵧ - (Γ̃²₂₂L̃ - 2Γ̃²₁₂M̃ + Γ̃²₁₁Ñ)φ]
  std::vector<double> residual2;  ///< ∫∫[-Ñφₓ + M̃φᵧ - (-Γ̃¹₂₂L̃ + 2Γ̃¹₁₂M̃ - Γ̃¹₁₁Ñ)φ]
  double max_abs = 0.0;
  double l2 = 0.0;        ///< root mean square over all residuals
  double scale = 0.0;     ///< largest single-term integral ∫∫|term|
  double relative = 0.0;  ///< max_abs / scale
};

/// Scaled fields on the strip; quadrature by tensor trapezoid on the grid.
WeakFormReport weak_form_residual(const Grid& Lt, const Grid& Mt, const Grid& Nt,
                                  const StripGrid& grid, const Metric& metric,
                                  const TestFamilySpec& spec = {});
WeakFormReport weak_form_residual(const SecondForm& form, const StripGrid& grid,
                                  const Metric& metric, const TestFamilySpec& spec = {});

struct ConstraintStats {
  double max = 0.0;
  double l2 = 0.0;  ///< root mean square
};

/// |L̃Ñ - M̃² + 1| pointwise.
ConstraintStats constraint_residual(const Grid& Lt, const Grid& Mt, const Grid& Nt);
ConstraintStats constraint_residual(const SecondForm& form);
/// |LN - M² - κ| pointwise.
ConstraintStats constraint_residual_unscaled(const SecondForm& form, const Grid& kappa);

struct AveragedSequence {
  std::vector<SecondForm> averaged;
  std::vector<ConstraintStats> before;
  std::vector<ConstraintStats> after;
};

/// Top-hat average over window_rows × window_cols cells (periodic in s).
AveragedSequence weak_star_average(const std::vector<SecondForm>& fields, std::size_t window_rows,
                                   std::size_t window_cols);
/// Window given as a physical length along the space-like direction; each time-like level is
/// averaged on its own.
AveragedSequence weak_star_average(const std::vector<SecondForm>& fields, const StripGrid& grid,
                                   double window);
SecondForm average_form(const SecondForm& f, std::size_t window_rows, std::size_t window_cols);

struct CompactnessEntry {
  double epsilon = 0.0;
  double sup_norm = 0.0;  ///< sup over the strip of max(|L|, |M|, |N|)
  EnergyRecord energy;
  ConstraintStats averaged_constraint;
  std::size_t rows = 0, cols = 0;
};

struct CompactnessReport {
  std::vector<CompactnessEntry> entries;
  double sup_variation = 0.0;  ///< (max - min)/max of sup norms
  double energy_ratio = 0.0;   ///< max/min energy (inf when min is 0 and max > 0; 1 when all 0)
  double energy_slope = 0.0;   ///< least-squares slope of energy against ε
  bool energy_grows_as_eps_decreases = false;
};

CompactnessReport compactness_report(const SweepResult& sweep, double window);

}  // namespace codazzi
