#pragma once

#include <array>
#include <utility>

#include "codazzi/grid.hpp"
#include "codazzi/metric.hpp"

namespace codazzi {

inline constexpr double kSonicGuard = 1e-6;

struct FluidPoint {
  double q = 0.0;
  double theta = 0.0;
};

struct Invariants {
  double wp = 0.0;
  double wm = 0.0;
};

struct BernoulliValues {
  double rho = 0.0;
  double p = 0.0;
};

/// ρ = 1/√(q²-1), p = -1/ρ. Throws sonic when q <= 1 + guard.
BernoulliValues bernoulli(double q, double sonic_guard = kSonicGuard);

/// Scaled second form (L̃, M̃, Ñ).
struct ScaledForm {
  double Lt = 0.0;
  double Mt = 0.0;
  double Nt = 0.0;
};

/// L̃ = ρv² + p, M̃ = -ρuv, Ñ = ρu² + p.
ScaledForm fluid_to_second_form(double q, double theta, double sonic_guard = kSonicGuard);

/// Inverse of fluid_to_second_form. The sign of (u, v) is fixed by M̃ = -ρuv and the branch
/// by the angle nearest to reference_angle (θ is determined modulo π).
FluidPoint second_form_to_fluid(const ScaledForm& form, double reference_angle,
                                double constraint_tolerance = 1e-6);

/// W± = θ ± arccos(1/q).
Invariants riemann_invariants(double q, double theta);
/// q = 1/cos((W₊ - W₋)/2), θ = (W₊ + W₋)/2.
FluidPoint invariants_to_state(double wp, double wm);

struct WaveSpeeds {
  double lambda_p = 0.0;
  double lambda_m = 0.0;
  double mu_p = 0.0;
  double mu_m = 0.0;
};

/// λ± = sin θ ± cos θ/√(q²-1), μ± = -cos θ ± sin θ/√(q²-1).
WaveSpeeds wave_speeds(double q, double theta, double sonic_guard = kSonicGuard);

/// Coefficient matrices multiplying ∂ₓ(q, θ) and ∂ᵧ(q, θ) in the first-order polar system,
/// row-major 2×2.
struct CoefficientMatrices {
  std::array<double, 4> ax;
  std::array<double, 4> ay;
};
CoefficientMatrices coefficient_matrices(double q, double theta, double sonic_guard = kSonicGuard);

struct SourceTerms {
  double R1 = 0.0;
  double R2 = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double plus = 0.0;   ///< S₁ + (q²-1)S₂
  double minus = 0.0;  ///< S₁ - (q²-1)S₂
};

/// Momentum sources R₁ = -L̃Γ̃²₂₂ + 2M̃Γ̃²₁₂ - ÑΓ̃²₁₁, R₂ = -L̃Γ̃¹₂₂ + 2M̃Γ̃¹₁₂ - ÑΓ̃¹₁₁, and
/// S₁ = -(vR₂ - uR₁)/(ρq²), S₂ = (vR₁ + uR₂)/q². Throws numerical if the closed-form polar
/// combinations disagree with the compositions beyond 1e-10 relative.
SourceTerms source_terms(double q, double theta, const Symbols& tilde,
                         double sonic_guard = kSonicGuard);

/// Polar closed form of S₁ ± (q²-1)S₂: -q sin θ A₁ + q cos θ A₂ ± (q/ρ)(cos θ A₁ + sin θ A₂)
/// with A_k = Γ̃ᵏ₂₂cos²θ - 2Γ̃ᵏ₁₂ sin θ cos θ + Γ̃ᵏ₁₁ sin²θ - (Γ̃ᵏ₂₂ + Γ̃ᵏ₁₁)/q².
std::pair<double, double> source_combinations_closed_form(double q, double theta,
                                                          const Symbols& tilde);

/// θ±(q) from tan θ = ±√(q²-1)(β²-q²)/(β²-(β²-1)q²); θ₋ = -θ₊.
std::pair<double, double> theta_zero_curves(double q, double beta);

/// Square in (W₊, W₋) between speeds α < β, centred on the flow angle `center`
/// (0 when x is time-like, π/2 when y is time-like).
class DiamondRegion {
 public:
  /// Validates 1 < α < β and the sign of the time-like speeds on a 256×256 lattice.
  DiamondRegion(double alpha, double beta, Orientation orientation = Orientation::x_time_like);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double center() const { return center_; }
  Orientation orientation() const { return orientation_; }
  double w_alpha() const { return wa_; }  ///< arccos(1/α)
  double w_beta() const { return wb_; }   ///< arccos(1/β)
  double wp_mid() const { return center_ + 0.5 * (wa_ + wb_); }
  double wm_mid() const { return center_ - 0.5 * (wa_ + wb_); }
  double wp_extent() const { return wb_ - wa_; }

  bool contains(double q, double theta) const;
  bool contains_invariants(double wp, double wm, double pad = 0.0) const;
  /// Distance outside the square in the max norm; 0 inside.
  double breach(double wp, double wm) const;

 private:
  double alpha_, beta_, center_;
  Orientation orientation_;
  double wa_, wb_;
};

bool diamond_contains(const DiamondRegion& region, double q, double theta);

// Grid versions.

struct FluidState {
  Grid q;
  Grid theta;
};

struct RiemannState {
  Grid wp;
  Grid wm;
};

struct SecondForm {
  Grid Lt, Mt, Nt;
  Grid L, M, N;
  Grid h11, h12, h22;
  double constraint_max = 0.0;  ///< max |L̃Ñ - M̃² + 1| at creation
};

FluidState invariants_to_fluid(const RiemannState& w);
RiemannState fluid_to_invariants(const FluidState& f);

/// Fills scaled, unscaled (γ·) and h (√|g|·γ·) forms; gamma and sqrt_det aligned with state.
SecondForm fluid_to_second_form(const FluidState& state, const Grid& gamma, const Grid& sqrt_det,
                                double sonic_guard = kSonicGuard);

/// Grid inverse using the (q, θ) reference angles in `reference` pointwise (nearest branch).
FluidState second_form_to_fluid(const SecondForm& form, const Grid& reference_angle,
                                double constraint_tolerance = 1e-6);

}  // namespace codazzi
