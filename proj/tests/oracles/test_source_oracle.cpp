#include <doctest.h>

#include <random>

#include "codazzi/fluid.hpp"
#include "codazzi/metric.hpp"
#include "oracle_common.hpp"

using namespace codazzi;

namespace {

double rel(double got, double ref, double scale) { return std::abs(got - ref) / std::max(scale, 1e-300); }

}  // namespace

TEST_SUITE("source") {
  TEST_CASE("closed-form combinations match the compositions") {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> uq(1.02, 3.0), ut(-3.0, 3.0), us(-2.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double q = uq(rng), th = ut(rng);
      const Symbols t{us(rng), us(rng), us(rng), us(rng), us(rng), us(rng)};
      const oracle::SourceReference r = oracle::source_reference(q, th, t);
      const double w = q * q - 1.0;
      const auto [plus, minus] = source_combinations_closed_form(q, th, t);
      const double scale_p = std::max(std::abs(r.S1 + w * r.S2), std::abs(r.S1) + w * std::abs(r.S2));
      const double scale_m = std::max(std::abs(r.S1 - w * r.S2), std::abs(r.S1) + w * std::abs(r.S2));
      worst = std::max({worst, rel(plus, r.S1 + w * r.S2, scale_p), rel(minus, r.S1 - w * r.S2, scale_m)});
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("source terms match their definitions on metric connections") {
    oracle::PointSampler sample(606);
    std::mt19937_64 rng(607);
    std::uniform_real_distribution<double> uq(1.05, 2.5), ut(-1.5, 1.5);
    for (const oracle::NamedMetric& m : oracle::sample_metrics()) {
      CAPTURE(m.name);
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const auto [x, y] = sample(m);
        const MetricValues v = m.metric.values(x, y);
        if (!(v.kappa < 0.0)) continue;
        const Symbols t = christoffel(v).tilde;
        const double q = uq(rng), th = ut(rng);
        const oracle::SourceReference r = oracle::source_reference(q, th, t);
        const SourceTerms s = source_terms(q, th, t);
        const double sr = std::abs(r.R1) + std::abs(r.R2);
        const double ss = std::abs(r.S1) + (q * q - 1) * std::abs(r.S2);
        worst = std::max({worst, rel(s.R1, r.R1, sr), rel(s.R2, r.R2, sr), rel(s.S1, r.S1, ss),
                          rel((q * q - 1) * s.S2, (q * q - 1) * r.S2, ss)});
        worst = std::max({worst, rel(s.plus, r.S1 + (q * q - 1) * r.S2, ss),
                          rel(s.minus, r.S1 - (q * q - 1) * r.S2, ss)});
      }
      CHECK(worst < 1e-10);
    }
  }
}
