#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace codazzi {

enum class MetricFamily { catenoid, helicoid_isothermal, torus_isothermal, custom };

std::string_view to_string(MetricFamily family);

/// Which of the two constant-state conditions a metric is built for.
/// ode1: (1/β²) κ'/κ + E'/E = 0, constant state (β, 0) with x time-like.
/// ode2: ((β²-1)/β²) κ'/κ + E'/E = 0, constant state (β, π/2) with y time-like.
enum class BetaRelation { ode1, ode2 };

struct MetricParams {
  double c = 0.0;
  double beta = 0.0;
  double kappa0 = 0.0;
  double lambda = 0.0;
  double a = 0.0;
  double b = 0.0;
  double period = 0.0;  ///< nonzero once periodicized
};

/// Point evaluation of the first fundamental form and curvature.
struct MetricValues {
  double E = 0, F = 0, G = 0;
  double E_x = 0, E_y = 0, F_x = 0, F_y = 0, G_x = 0, G_y = 0;
  double E_xx = 0, E_xy = 0, E_yy = 0;
  double F_xx = 0, F_xy = 0, F_yy = 0;
  double G_xx = 0, G_xy = 0, G_yy = 0;
  double kappa = 0, kappa_x = 0, kappa_y = 0;
  double gamma = 0, gamma_x = 0, gamma_y = 0;  ///< γ = √(-κ); NaN when κ >= 0

  double det() const { return E * G - F * F; }
};

/// Γ^(k)_ij stored once per symmetric pair; s{k}{ij}.
struct Symbols {
  double s111 = 0, s112 = 0, s122 = 0;
  double s211 = 0, s212 = 0, s222 = 0;
};

struct ChristoffelSet {
  Symbols plain;
  Symbols tilde;  ///< connection of the γ-rescaled system
};

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

class MetricModel;

/// Immutable, cheap to copy, safe to share between threads.
class Metric {
 public:
  Metric(std::shared_ptr<const MetricModel> model, MetricFamily family, MetricParams params,
         std::string name);

  MetricFamily family() const { return family_; }
  const MetricParams& params() const { return params_; }
  const std::string& name() const { return name_; }

  Interval domain_x() const;
  Interval domain_y() const;
  bool contains(double x, double y) const;

  /// E = G = E(x), F = 0.
  bool is_x_isothermal() const;
  /// 0 when the metric is not periodic in x.
  double period_x() const { return params_.period; }
  /// κ supplied by formula rather than derived from E, F, G.
  bool curvature_prescribed() const;
  /// Skip the Brioschi consistency requirement (periodicized metrics).
  bool curvature_consistency_exempt() const;

  /// All coefficients; γ filled only when κ < 0. No sign or domain checks.
  MetricValues values(double x, double y) const;

  const MetricModel& model() const { return *model_; }

 private:
  std::shared_ptr<const MetricModel> model_;
  MetricFamily family_;
  MetricParams params_;
  std::string name_;
};

class MetricModel {
 public:
  virtual ~MetricModel() = default;
  virtual MetricValues values(double x, double y) const = 0;
  virtual Interval domain_x() const = 0;
  virtual Interval domain_y() const;
  virtual bool x_isothermal() const = 0;
  virtual bool curvature_prescribed() const { return true; }
  virtual bool consistency_exempt() const { return false; }
};

/// Checked evaluation: throws on domain violation, degeneracy, or κ >= 0.
MetricValues eval_metric(const Metric& metric, double x, double y);

ChristoffelSet christoffel(const MetricValues& v);

/// κ from the two-determinant Brioschi expression using the second derivatives in v.
double brioschi_curvature(const MetricValues& v);
double gauss_curvature_brioschi(const Metric& metric, double x, double y);

struct ConsistencyReport {
  double max_relative_error = 0.0;
  double worst_x = 0.0;
  double worst_y = 0.0;
  bool consistent = true;
};

/// Compares supplied κ with Brioschi κ at the given sample points.
ConsistencyReport check_curvature_consistency(const Metric& metric, const std::vector<double>& xs,
                                              const std::vector<double>& ys, double tolerance);

struct BetaReport {
  bool satisfied = false;
  double max_residual = 0.0;
  std::vector<double> xs;
  std::vector<double> residual;
  std::vector<double> ratio;  ///< (κ'/κ)/(E'/E); NaN where E' vanishes
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double ratio_variation = 0.0;  ///< (max - min) / max|ratio| over finite entries
};

BetaReport check_beta_condition(const Metric& metric, double beta, BetaRelation relation,
                                const std::vector<double>& xs, double tolerance = 1e-8);

/// Uniform samples of the metric's x domain (shrunk by a margin), used by default checks.
std::vector<double> sample_domain(const Metric& metric, int count, double lo, double hi);

// Families.

/// Catenoid family E = cosh(cx)^p, κ = -κ₀ E^(-m). For ode1, p = 2/(β²-1), m = β²;
/// for ode2, p = 2(β²-1), m = β²/(β²-1). κ₀ must match Brioschi within tolerance.
Metric catenoid(double c, double beta, double kappa0, BetaRelation relation = BetaRelation::ode1,
                double consistency_tolerance = 1e-6);
/// The κ₀ that makes the catenoid family consistent.
double catenoid_consistent_kappa0(double c, double beta, BetaRelation relation);

Metric isothermal_helicoid(double lambda);

/// E = (a + b cos Y)², κ = cos Y / (b (a + b cos Y)), Y = φ⁻¹(x).
/// Domain is the negative-curvature band Y ∈ (π/2, 3π/2).
Metric isothermal_torus(double a, double b);
double torus_phi(double a, double b, double Y);
double torus_phi_inverse(double a, double b, double x);
/// κ at x on the full φ range without the band restriction (for flagging).
double torus_curvature_unrestricted(double a, double b, double x);

/// General (E, F, G) given as functions; derivatives by 4th-order centered differences with
/// step 2e-3·scale, κ from Brioschi.
struct CustomMetricSpec {
  std::function<double(double, double)> E;
  std::function<double(double, double)> F;
  std::function<double(double, double)> G;
  double scale = 1.0;
  Interval x_domain{-1e300, 1e300};
  Interval y_domain{-1e300, 1e300};
  bool x_isothermal = false;  ///< caller asserts F = 0, E = G = E(x)
  std::string name = "custom";
};
Metric custom_metric(CustomMetricSpec spec);
Metric custom_isothermal(std::function<double(double)> E, double scale = 1.0,
                         Interval x_domain = {-1e300, 1e300}, std::string name = "custom");

/// Tabulated E(x) with natural cubic interpolation; F = 0, G = E.
Metric tabulated_metric(std::vector<double> xs, std::vector<double> Es, std::string name = "custom");
/// Reads a CSV with header `x,E`.
Metric load_tabulated_metric(const std::string& path);

/// Periodic version in x: a = E'/E on [-P/4, P/4], odd reflections about ±P/4, P-periodic
/// extension, mollified with a bump of support radius P/20 and zero mean; E^P = E(0) exp(∫₀ˣ a^P),
/// κ^P = κ(0) exp(-β²/(β²-1) ∫₀ˣ a^P).
Metric periodicize_metric(const Metric& metric, double period, double beta);

/// x → -x.
Metric reflect_metric(const Metric& metric);

struct CatalogEntry {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string note;
};
std::vector<CatalogEntry> metric_catalog();

}  // namespace codazzi
