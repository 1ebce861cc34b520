#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cctype>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "codazzi/error.hpp"
#include "codazzi/metric.hpp"
#include "codazzi/numerics.hpp"

namespace codazzi {

namespace {

constexpr double pi = std::numbers::pi;

/// Fills an E = G = E(x), F = 0 record.
MetricValues isothermal_values(double E, double E1, double E2, double k, double k1) {
  MetricValues v;
  v.E = v.G = E;
  v.E_x = v.G_x = E1;
  v.E_xx = v.G_xx = E2;
  v.kappa = k;
  v.kappa_x = k1;
  return v;
}

Interval everywhere() {
  const double inf = std::numeric_limits<double>::infinity();
  return {-inf, inf};
}

// ---------------------------------------------------------------- catenoid

class CatenoidModel final : public MetricModel {
 public:
  CatenoidModel(double c, double p, double m, double kappa0, double half_width)
      : c_(c), p_(p), m_(m), k0_(kappa0), half_(half_width) {}

  MetricValues values(double x, double) const override {
    const double cx = c_ * x;
    const double th = std::tanh(cx);
    const double sech2 = 1.0 - th * th;
    const double E = std::pow(std::cosh(cx), p_);
    const double E1 = p_ * c_ * th * E;
    const double E2 = p_ * c_ * c_ * (sech2 + p_ * th * th) * E;
    const double k = -k0_ * std::pow(E, -m_);
    const double k1 = -m_ * k * E1 / E;
    return isothermal_values(E, E1, E2, k, k1);
  }
  Interval domain_x() const override { return {-half_, half_}; }
  bool x_isothermal() const override { return true; }

 private:
  double c_, p_, m_, k0_, half_;
};

// ---------------------------------------------------------------- helicoid

class HelicoidModel final : public MetricModel {
 public:
  explicit HelicoidModel(double lambda) : l_(lambda) {}

  MetricValues values(double x, double) const override {
    const double l2 = l_ * l_;
    const double ep = l2 * l2 * std::exp(2.0 * x);
    const double em = std::exp(-2.0 * x);
    const double E = 0.5 * l2 + 0.25 * (ep + em);
    const double E1 = 0.5 * (ep - em);
    const double E2 = ep + em;
    const double k = -l2 / (E * E);
    const double k1 = 2.0 * l2 * E1 / (E * E * E);
    return isothermal_values(E, E1, E2, k, k1);
  }
  Interval domain_x() const override { return {-20.0, 20.0}; }
  bool x_isothermal() const override { return true; }

 private:
  double l_;
};

// ---------------------------------------------------------------- torus

class TorusModel final : public MetricModel {
 public:
  TorusModel(double a, double b, bool band_only) : a_(a), b_(b), band_(band_only) {}

  MetricValues values(double x, double) const override {
    const double Y = torus_phi_inverse(a_, b_, x);
    const double cy = std::cos(Y), sy = std::sin(Y);
    const double w = a_ + b_ * cy;
    const double dY = w / b_;
    const double E = w * w;
    const double E1 = -2.0 * sy * w * w;
    const double dE1dY = -2.0 * cy * w * w + 4.0 * b_ * sy * sy * w;
    const double E2 = dE1dY * dY;
    const double k = cy / (b_ * w);
    const double k1 = -a_ * sy / (b_ * b_ * w);
    return isothermal_values(E, E1, E2, k, k1);
  }
  Interval domain_x() const override {
    if (band_) return {torus_phi(a_, b_, 0.5 * pi), torus_phi(a_, b_, 1.5 * pi)};
    return {torus_phi(a_, b_, -1.9 * pi), torus_phi(a_, b_, 1.9 * pi)};
  }
  bool x_isothermal() const override { return true; }

 private:
  double a_, b_;
  bool band_;
};

// ---------------------------------------------------------------- custom

class CustomModel final : public MetricModel {
 public:
  explicit CustomModel(CustomMetricSpec spec) : s_(std::move(spec)), h_(2e-3 * s_.scale) {}

  MetricValues values(double x, double y) const override {
    MetricValues v = base(x, y);
    v.kappa = brioschi_curvature(v);
    const double hk = 5.0 * h_;
    auto kx = [&](double t) { return brioschi_curvature(base(t, y)); };
    v.kappa_x = fd_first(kx, x, hk);
    if (s_.x_isothermal) {
      v.kappa_y = 0.0;
    } else {
      auto ky = [&](double t) { return brioschi_curvature(base(x, t)); };
      v.kappa_y = fd_first(ky, y, hk);
    }
    return v;
  }
  Interval domain_x() const override { return s_.x_domain; }
  Interval domain_y() const override { return s_.y_domain; }
  bool x_isothermal() const override { return s_.x_isothermal; }
  bool curvature_prescribed() const override { return false; }

 private:
  MetricValues base(double x, double y) const {
    MetricValues v;
    const double h = h_;
    auto fill = [&](const std::function<double(double, double)>& f, double& val, double& dx,
                    double& dy, double& dxx, double& dxy, double& dyy) {
      val = f(x, y);
      auto fx = [&](double t) { return f(t, y); };
      auto fy = [&](double t) { return f(x, t); };
      dx = fd_first(fx, x, h);
      dxx = fd_second(fx, x, h);
      if (s_.x_isothermal) {
        dy = dxy = dyy = 0.0;
        return;
      }
      dy = fd_first(fy, y, h);
      dyy = fd_second(fy, y, h);
      auto gx = [&](double t) {
        auto inner = [&](double u) { return f(t, u); };
        return fd_first(inner, y, h);
      };
      dxy = fd_first(gx, x, h);
    };
    fill(s_.E, v.E, v.E_x, v.E_y, v.E_xx, v.E_xy, v.E_yy);
    if (s_.x_isothermal) {
      v.G = v.E;
      v.G_x = v.E_x;
      v.G_xx = v.E_xx;
    } else {
      fill(s_.F, v.F, v.F_x, v.F_y, v.F_xx, v.F_xy, v.F_yy);
      fill(s_.G, v.G, v.G_x, v.G_y, v.G_xx, v.G_xy, v.G_yy);
    }
    return v;
  }

  CustomMetricSpec s_;
  double h_;
};

// ---------------------------------------------------------------- tabulated

class Spline {
 public:
  Spline(const std::vector<double>& xs, const std::vector<double>& ys)
      : spline_(gsl_spline_alloc(gsl_interp_cspline, xs.size())) {
    gsl_set_error_handler_off();
    if (gsl_spline_init(spline_, xs.data(), ys.data(), xs.size()) != GSL_SUCCESS)
      fail(ErrorKind::config, "cubic spline setup failed");
  }
  ~Spline() { gsl_spline_free(spline_); }
  Spline(const Spline&) = delete;
  Spline& operator=(const Spline&) = delete;

  double operator()(double x) const {
    // no accelerator: keeps evaluation reentrant
    return gsl_spline_eval(spline_, x, nullptr);
  }

 private:
  gsl_spline* spline_;
};

// ---------------------------------------------------------------- periodicized

class PeriodicModel final : public MetricModel {
 public:
  PeriodicModel(double period, double E0, double k0, double exponent, std::vector<double> a,
                std::vector<double> da, std::vector<double> A)
      : P_(period),
        E0_(E0),
        k0_(k0),
        c_(exponent),
        a_(std::move(a)),
        da_(std::move(da)),
        A_(std::move(A)),
        h_(period / static_cast<double>(a_.size())) {}

  MetricValues values(double x, double) const override {
    double u = std::fmod(x + 0.5 * P_, P_);
    if (u < 0.0) u += P_;
    const std::size_t n = a_.size();
    double cell = u / h_;
    auto i = static_cast<std::size_t>(std::floor(cell));
    if (i >= n) i = n - 1;
    const double t = cell - static_cast<double>(i);
    const std::size_t j = (i + 1) % n;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    const double a = h00 * a_[i] + h10 * h_ * da_[i] + h01 * a_[j] + h11 * h_ * da_[j];
    const double dh00 = 6 * t * t - 6 * t, dh10 = 3 * t * t - 4 * t + 1;
    const double dh01 = -6 * t * t + 6 * t, dh11 = 3 * t * t - 2 * t;
    const double da =
        (dh00 * a_[i] + dh10 * h_ * da_[i] + dh01 * a_[j] + dh11 * h_ * da_[j]) / h_;
    const double A = h00 * A_[i] + h10 * h_ * a_[i] + h01 * A_[j] + h11 * h_ * a_[j];
    const double E = E0_ * std::exp(A);
    const double k = k0_ * std::exp(-c_ * A);
    return isothermal_values(E, a * E, (da + a * a) * E, k, -c_ * a * k);
  }
  Interval domain_x() const override { return everywhere(); }
  bool x_isothermal() const override { return true; }
  bool consistency_exempt() const override { return true; }

 private:
  double P_, E0_, k0_, c_;
  std::vector<double> a_, da_, A_;
  double h_;
};

// ---------------------------------------------------------------- reflected

class ReflectedModel final : public MetricModel {
 public:
  explicit ReflectedModel(Metric base) : base_(std::move(base)) {}

  MetricValues values(double x, double y) const override {
    MetricValues v = base_.model().values(-x, y);
    v.E_x = -v.E_x;
    v.F_x = -v.F_x;
    v.G_x = -v.G_x;
    v.E_xy = -v.E_xy;
    v.F_xy = -v.F_xy;
    v.G_xy = -v.G_xy;
    v.kappa_x = -v.kappa_x;
    return v;
  }
  Interval domain_x() const override {
    const Interval d = base_.domain_x();
    return {-d.hi, -d.lo};
  }
  Interval domain_y() const override { return base_.domain_y(); }
  bool x_isothermal() const override { return base_.is_x_isothermal(); }
  bool curvature_prescribed() const override { return base_.curvature_prescribed(); }
  bool consistency_exempt() const override { return base_.curvature_consistency_exempt(); }

 private:
  Metric base_;
};

}  // namespace

// ---------------------------------------------------------------- factories

double catenoid_consistent_kappa0(double c, double beta, BetaRelation relation) {
  const double b2m1 = beta * beta - 1.0;
  return relation == BetaRelation::ode1 ? c * c / b2m1 : b2m1 * c * c;
}

Metric catenoid(double c, double beta, double kappa0, BetaRelation relation,
                double consistency_tolerance) {
  if (c == 0.0 || !std::isfinite(c)) fail(ErrorKind::config, "catenoid needs c != 0");
  if (!(beta > 1.0)) fail(ErrorKind::config, "catenoid needs beta > 1");
  if (!(kappa0 > 0.0)) fail(ErrorKind::config, "catenoid needs kappa0 > 0");
  const double b2 = beta * beta;
  const double p = relation == BetaRelation::ode1 ? 2.0 / (b2 - 1.0) : 2.0 * (b2 - 1.0);
  const double m = relation == BetaRelation::ode1 ? b2 : b2 / (b2 - 1.0);
  const double want = catenoid_consistent_kappa0(c, beta, relation);
  const double rel = std::abs(kappa0 - want) / want;
  if (rel > consistency_tolerance) {
    std::ostringstream os;
    os << "catenoid kappa0 = " << kappa0 << " is inconsistent with the Brioschi curvature of E;"
       << " expected " << want << " for c = " << c << ", beta = " << beta;
    fail(ErrorKind::config, os.str());
  }
  const double half = 20.0 / (std::abs(c) * std::max(p, 1.0));
  MetricParams params;
  params.c = c;
  params.beta = beta;
  params.kappa0 = kappa0;
  auto model = std::make_shared<CatenoidModel>(c, p, m, kappa0, half);
  return Metric(model, MetricFamily::catenoid, params, "catenoid");
}

Metric isothermal_helicoid(double lambda) {
  if (!(lambda > 0.0)) fail(ErrorKind::config, "helicoid needs lambda > 0");
  MetricParams params;
  params.lambda = lambda;
  params.beta = std::numbers::sqrt2;
  return Metric(std::make_shared<HelicoidModel>(lambda), MetricFamily::helicoid_isothermal, params,
                "helicoid-isothermal");
}

double torus_phi(double a, double b, double Y) {
  const double s = std::sqrt(a * a - b * b);
  return 2.0 * b / s * std::atan2(std::sqrt((a - b) / (a + b)) * std::sin(0.5 * Y),
                                  std::cos(0.5 * Y));
}

double torus_phi_inverse(double a, double b, double x) {
  const double lo = -1.95 * pi, hi = 1.95 * pi;
  const double xlo = torus_phi(a, b, lo), xhi = torus_phi(a, b, hi);
  if (!(x >= xlo && x <= xhi)) {
    std::ostringstream os;
    os << "torus coordinate x = " << x << " outside the invertible range [" << xlo << ", " << xhi
       << "]";
    fail(ErrorKind::domain, os.str());
  }
  auto f = [&](double Y) { return torus_phi(a, b, Y) - x; };
  auto tol = [](double l, double r) { return std::abs(r - l) < 1e-12; };
  const auto br = boost::math::tools::bisect(f, lo, hi, tol);
  double Y = 0.5 * (br.first + br.second);
  Y -= f(Y) * (a + b * std::cos(Y)) / b;  // Newton polish, φ'(Y) = b / (a + b cos Y)
  return Y;
}

double torus_curvature_unrestricted(double a, double b, double x) {
  const double Y = torus_phi_inverse(a, b, x);
  return std::cos(Y) / (b * (a + b * std::cos(Y)));
}

Metric isothermal_torus(double a, double b) {
  if (!(b > 0.0) || !(a > b)) fail(ErrorKind::config, "torus needs a > b > 0");
  MetricParams params;
  params.a = a;
  params.b = b;
  return Metric(std::make_shared<TorusModel>(a, b, true), MetricFamily::torus_isothermal, params,
                "torus-isothermal");
}

Metric custom_metric(CustomMetricSpec spec) {
  if (!spec.E || (!spec.x_isothermal && (!spec.F || !spec.G)))
    fail(ErrorKind::config, "custom metric needs E, F, G");
  if (!(spec.scale > 0.0)) fail(ErrorKind::config, "custom metric scale must be positive");
  std::string name = spec.name;
  return Metric(std::make_shared<CustomModel>(std::move(spec)), MetricFamily::custom,
                MetricParams{}, name);
}

Metric custom_isothermal(std::function<double(double)> E, double scale, Interval x_domain,
                         std::string name) {
  CustomMetricSpec spec;
  spec.E = [E](double x, double) { return E(x); };
  spec.scale = scale;
  spec.x_domain = x_domain;
  spec.x_isothermal = true;
  spec.name = std::move(name);
  return custom_metric(std::move(spec));
}

Metric tabulated_metric(std::vector<double> xs, std::vector<double> Es, std::string name) {
  if (xs.size() != Es.size() || xs.size() < 4)
    fail(ErrorKind::config, "tabulated metric needs at least 4 (x, E) rows");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(Es[i] > 0.0)) fail(ErrorKind::config, "tabulated metric needs E > 0");
    if (i > 0 && !(xs[i] > xs[i - 1]))
      fail(ErrorKind::config, "tabulated metric x column must be strictly increasing");
  }
  auto spline = std::make_shared<Spline>(xs, Es);
  const double scale = xs.back() - xs.front();
  // κ' uses nested differences reaching 2(h + 10h) beyond the point.
  const double margin = 2.0 * 11.0 * 1e-4 * scale * 1.01;
  Interval dom{xs.front() + margin, xs.back() - margin};
  return custom_isothermal([spline](double x) { return (*spline)(x); }, scale, dom,
                           std::move(name));
}

Metric load_tabulated_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open metric table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::config, "metric table '" + path + "' is empty");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "x,E") fail(ErrorKind::config, "metric table '" + path + "' must have header x,E");
  std::vector<double> xs, Es;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double x = 0, e = 0;
    char comma = 0;
    if (!(ls >> x >> comma >> e) || comma != ',')
      fail(ErrorKind::config, "metric table '" + path + "' row " + std::to_string(row) +
                                  " is not 'x,E'");
    xs.push_back(x);
    Es.push_back(e);
  }
  return tabulated_metric(std::move(xs), std::move(Es), "custom:" + path);
}

Metric periodicize_metric(const Metric& metric, double period, double beta) {
  if (!metric.is_x_isothermal())
    fail(ErrorKind::structure, "periodicization needs F = 0 and E = G = E(x)");
  if (!(period > 0.0)) fail(ErrorKind::config, "period must be positive");
  if (!(beta > 1.0)) fail(ErrorKind::config, "beta must exceed 1");
  const Interval d = metric.domain_x();
  if (!(d.lo <= -0.25 * period && d.hi >= 0.25 * period))
    fail(ErrorKind::domain, "metric domain does not cover [-P/4, P/4]");

  constexpr std::size_t n = 8192;
  const double h = period / static_cast<double>(n);
  auto ratio = [&](double x) {
    const MetricValues v = metric.values(x, 0.0);
    return v.E_x / v.E;
  };
  const double q = 0.25 * period;
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -0.5 * period + h * static_cast<double>(i);
    double val;
    if (x > q)
      val = -ratio(0.5 * period - x);
    else if (x < -q)
      val = -ratio(-0.5 * period - x);
    else
      val = ratio(x);
    raw[i] = val;
  }
  const double radius_cells = (period / 20.0) / h;
  std::vector<double> a = periodic_mollify(raw, radius_cells);
  std::vector<double> da = periodic_mollify_derivative(raw, radius_cells, h);
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : a) v -= mean;

  // A = ∫₀ˣ a, cubic-Hermite exact quadrature cell by cell, starting at x = 0 (node n/2).
  std::vector<double> A(n, 0.0);
  const std::size_t i0 = n / 2;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (i0 + k) % n, j = (i + 1) % n;
    A[i] = acc;
    acc += 0.5 * h * (a[i] + a[j]) + h * h / 12.0 * (da[i] - da[j]);
  }
  if (!(std::abs(acc) < 1e-10 * period)) {
    std::ostringstream os;
    os << "periodic quadrature did not close: residual " << acc;
    fail(ErrorKind::numerical, os.str());
  }

  const MetricValues v0 = metric.values(0.0, 0.0);
  const double b2 = beta * beta;
  MetricParams params = metric.params();
  params.period = period;
  params.beta = beta;
  auto model = std::make_shared<PeriodicModel>(period, v0.E, v0.kappa, b2 / (b2 - 1.0),
                                               std::move(a), std::move(da), std::move(A));
  return Metric(model, metric.family(), params, metric.name() + ":periodic");
}

Metric reflect_metric(const Metric& metric) {
  return Metric(std::make_shared<ReflectedModel>(metric), metric.family(), metric.params(),
                metric.name() + ":reflected");
}

std::vector<CatalogEntry> metric_catalog() {
  return {
      {"catenoid",
       {{"c", "nonzero scale, E = cosh(c x)^p"},
        {"beta", "outer speed > 1"},
        {"kappa0", "curvature amplitude > 0, must equal c^2/(beta^2-1) (ode1) or (beta^2-1)c^2 (ode2)"},
        {"relation", "ode1 (x time-like) or ode2 (y time-like)"}},
       "satisfies ode-1 (or ode-2) for the declared beta"},
      {"helicoid-isothermal",
       {{"lambda", "pitch > 0"}},
       "satisfies ode-1 and ode-2 with beta = sqrt(2)"},
      {"torus-isothermal",
       {{"a", "center radius"}, {"b", "tube radius, a > b > 0"}},
       "fails ode-1; verification-only"},
      {"custom",
       {{"path", "CSV table with header x,E; cubic interpolation, F = 0, G = E"}},
       "derivatives by 4th-order differences, curvature from Brioschi"},
  };
}

}  // namespace codazzi
