#include "codazzi/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "codazzi/error.hpp"

namespace codazzi {

std::string_view to_string(MetricFamily family) {
  switch (family) {
    case MetricFamily::catenoid: return "catenoid";
    case MetricFamily::helicoid_isothermal: return "helicoid-isothermal";
    case MetricFamily::torus_isothermal: return "torus-isothermal";
    case MetricFamily::custom: return "custom";
  }
  return "unknown";
}

Interval MetricModel::domain_y() const {
  const double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

Metric::Metric(std::shared_ptr<const MetricModel> model, MetricFamily family, MetricParams params,
               std::string name)
    : model_(std::move(model)), family_(family), params_(params), name_(std::move(name)) {}

Interval Metric::domain_x() const { return model_->domain_x(); }
Interval Metric::domain_y() const { return model_->domain_y(); }

bool Metric::contains(double x, double y) const {
  return domain_x().contains(x) && domain_y().contains(y);
}

bool Metric::is_x_isothermal() const { return model_->x_isothermal(); }
bool Metric::curvature_prescribed() const { return model_->curvature_prescribed(); }
bool Metric::curvature_consistency_exempt() const { return model_->consistency_exempt(); }

MetricValues Metric::values(double x, double y) const {
  MetricValues v = model_->values(x, y);
  if (v.kappa < 0.0) {
    v.gamma = std::sqrt(-v.kappa);
    v.gamma_x = -v.kappa_x / (2.0 * v.gamma);
    v.gamma_y = -v.kappa_y / (2.0 * v.gamma);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    v.gamma = v.gamma_x = v.gamma_y = nan;
  }
  return v;
}

MetricValues eval_metric(const Metric& metric, double x, double y) {
  if (!metric.contains(x, y)) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ") outside the domain of metric '" << metric.name()
       << "' [" << metric.domain_x().lo << ", " << metric.domain_x().hi << "]";
    fail(ErrorKind::domain, os.str());
  }
  MetricValues v = metric.values(x, y);
  if (!(v.E > 0.0) || !(v.G > 0.0) || !(v.det() > 0.0)) {
    std::ostringstream os;
    os << "metric '" << metric.name() << "' is not positive definite at (" << x << ", " << y
       << ")";
    fail(ErrorKind::degenerate, os.str());
  }
  if (!(v.kappa < 0.0)) {
    std::ostringstream os;
    os << "Gauss curvature must be strictly negative; metric '" << metric.name() << "' has kappa = "
       << v.kappa << " at (" << x << ", " << y << ")";
    fail(ErrorKind::curvature, os.str());
  }
  return v;
}

ChristoffelSet christoffel(const MetricValues& v) {
  const double D = v.det();
  if (!(D > 0.0)) fail(ErrorKind::degenerate, "EG - F^2 <= 0 in christoffel");
  const double inv = 1.0 / (2.0 * D);
  ChristoffelSet out;
  Symbols& s = out.plain;
  s.s111 = (v.G * v.E_x - 2.0 * v.F * v.F_x + v.F * v.E_y) * inv;
  s.s211 = (2.0 * v.E * v.F_x - v.E * v.E_y - v.F * v.E_x) * inv;
  s.s112 = (v.G * v.E_y - v.F * v.G_x) * inv;
  s.s212 = (v.E * v.G_x - v.F * v.E_y) * inv;
  s.s122 = (2.0 * v.G * v.F_y - v.G * v.G_x - v.F * v.G_y) * inv;
  s.s222 = (v.E * v.G_y - 2.0 * v.F * v.F_y + v.F * v.G_x) * inv;

  out.tilde = s;
  if (std::isfinite(v.gamma) && v.gamma > 0.0) {
    const double gx = v.gamma_x / v.gamma;
    const double gy = v.gamma_y / v.gamma;
    out.tilde.s111 += gx;
    out.tilde.s112 += 0.5 * gy;
    out.tilde.s212 += 0.5 * gx;
    out.tilde.s222 += gy;
  }
  return out;
}

namespace {

double det3(double a11, double a12, double a13, double a21, double a22, double a23, double a31,
            double a32, double a33) {
  return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
         a13 * (a21 * a32 - a22 * a31);
}

}  // namespace

double brioschi_curvature(const MetricValues& v) {
  const double D = v.det();
  if (!(D > 0.0)) fail(ErrorKind::degenerate, "EG - F^2 <= 0 in Brioschi curvature");
  const double first = det3(-0.5 * v.E_yy + v.F_xy - 0.5 * v.G_xx, 0.5 * v.E_x,
                            v.F_x - 0.5 * v.E_y,  //
                            v.F_y - 0.5 * v.G_x, v.E, v.F,  //
                            0.5 * v.G_y, v.F, v.G);
  const double second = det3(0.0, 0.5 * v.E_y, 0.5 * v.G_x,  //
                             0.5 * v.E_y, v.E, v.F,          //
                             0.5 * v.G_x, v.F, v.G);
  return (first - second) / (D * D);
}

double gauss_curvature_brioschi(const Metric& metric, double x, double y) {
  if (!metric.contains(x, y)) fail(ErrorKind::domain, "Brioschi sample outside metric domain");
  return brioschi_curvature(metric.values(x, y));
}

ConsistencyReport check_curvature_consistency(const Metric& metric, const std::vector<double>& xs,
                                              const std::vector<double>& ys, double tolerance) {
  ConsistencyReport r;
  for (double x : xs) {
    for (double y : ys) {
      const MetricValues v = metric.values(x, y);
      const double kb = brioschi_curvature(v);
      const double scale = std::max(std::abs(v.kappa), std::abs(kb));
      const double err = scale > 0.0 ? std::abs(kb - v.kappa) / scale : 0.0;
      if (err > r.max_relative_error) {
        r.max_relative_error = err;
        r.worst_x = x;
        r.worst_y = y;
      }
    }
  }
  r.consistent = r.max_relative_error < tolerance;
  return r;
}

BetaReport check_beta_condition(const Metric& metric, double beta, BetaRelation relation,
                                const std::vector<double>& xs, double tolerance) {
  if (!metric.is_x_isothermal())
    fail(ErrorKind::structure, "beta condition needs F = 0 and E = G = E(x)");
  if (!(beta > 1.0)) fail(ErrorKind::config, "beta must exceed 1");
  const double b2 = beta * beta;
  const double coef = relation == BetaRelation::ode1 ? 1.0 / b2 : (b2 - 1.0) / b2;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  BetaReport r;
  r.xs = xs;
  r.residual.reserve(xs.size());
  r.ratio.reserve(xs.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double amax = 0.0;
  for (double x : xs) {
    const MetricValues v = metric.values(x, 0.0);
    const double lk = v.kappa_x / v.kappa;
    const double le = v.E_x / v.E;
    const double res = coef * lk + le;
    r.residual.push_back(res);
    r.max_residual = std::max(r.max_residual, std::abs(res));
    const double ratio = std::abs(le) > 1e-12 ? lk / le : nan;
    r.ratio.push_back(ratio);
    if (std::isfinite(ratio)) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      amax = std::max(amax, std::abs(ratio));
    }
  }
  r.satisfied = r.max_residual < tolerance;
  if (amax > 0.0) {
    r.ratio_min = lo;
    r.ratio_max = hi;
    r.ratio_variation = (hi - lo) / amax;
  }
  return r;
}

std::vector<double> sample_domain(const Metric& metric, int count, double lo, double hi) {
  const Interval d = metric.domain_x();
  lo = std::max(lo, d.lo);
  hi = std::min(hi, d.hi);
  std::vector<double> xs;
  if (count < 2 || !(hi > lo)) return xs;
  xs.reserve(count);
  for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
  return xs;
}

}  // namespace codazzi
