#pragma once

// Exact analytics for a generic two-level Hamiltonian under Poissonian and
// general renewal measurement protocols.
//
// With ψ_c the post-failure state, the two overlap functions are
//   f(τ) = |<ψ_+| e^{iHτ} |ψ_c>|^2,   g(τ) = |<ψ_c| e^{iHτ} |ψ_c>|^2.
// Each is a single-frequency trigonometric series in τ, which gives closed
// forms for every Laplace transform used below.

#include "qreset/core.hpp"
#include "qreset/laplace.hpp"
#include "qreset/waiting_time.hpp"

namespace qreset {

/// e^{-iHτ}|ψ>; negative τ evolves backwards.
PureState evolve(const TwoLevelHamiltonian& h, const PureState& psi, double tau);

double f_of_tau(const TwoLevelHamiltonian& h, Scheme scheme, double tau);
double g_of_tau(const TwoLevelHamiltonian& h, Scheme scheme, double tau);

/// x(τ) = mean + Re(amplitude · e^{i·frequency·τ}).
struct OverlapSeries {
    double mean = 0.0;
    Complex amplitude{};
    double frequency = 0.0;

    double operator()(double tau) const;
    /// Laplace transform of x itself (Re s > 0 or s off the imaginary axis).
    Complex laplace(Complex s) const;
    /// Integral of p(τ) x(τ) e^{-sτ}, using the analytic continuation of p~.
    Complex weighted_laplace(const WaitingTimeDistribution& dist, Complex s) const;
};

OverlapSeries f_series(const TwoLevelHamiltonian& h, Scheme scheme);
OverlapSeries g_series(const TwoLevelHamiltonian& h, Scheme scheme);

/// σ² = |<ψ_+|H|ψ_->|^2.
double sigma_squared(const TwoLevelHamiltonian& h);

/// g~(s) by adaptive quadrature truncated at 40/s (closed form for JC
/// Hamiltonians). QuadratureFailure if relative accuracy 1e-10 is unmet.
double g_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double s);
double f_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double s);

/// g~(r) from the eigen-expansion: r g~(r) = Σ w_E w_E' r² / (r² + (E-E')²).
double g_laplace_spectral(const TwoLevelHamiltonian& h, double r);

/// S~_r(s) for the Poissonian protocol. PoleHit if |1 - r g~(r+s)| < 1e-14.
double survival_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, double s);
/// F~_r(s) = 1 - s S~_r(s), evaluated without cancellation.
double fdt_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, double s);
/// Continuation of F~_r to complex s (used by numerical inversion).
Complex fdt_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, Complex s);

/// Exact rational forms of S~_r(s) and F~_r(s) in s. Require σ² > 0.
RationalTransform survival_rational_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r);
RationalTransform fdt_rational_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r);

/// Poles of F~_r: the roots s of (r+s)^3 - r(r+s)^2 + Δ²(r+s) - r c0 Δ² with
/// Δ = E_+ - E_- and c0 = Σ w_E². Shared by both schemes.
std::vector<Complex> fdt_poles_poisson(const TwoLevelHamiltonian& h, double r);

/// Mean first-detection time; +inf when detection never happens.
double mean_fdt_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r);

/// Mean, second moment, variance, t_m and the small-t coefficient.
FirstDetectionStats stats_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r);

/// Scheme 1: p(0)·σ²; Scheme 2: p(0).
double small_t_coefficient(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist);

/// Transform evaluators of one (H, scheme, p) combination.
class ProtocolTransforms {
public:
    ProtocolTransforms(const TwoLevelHamiltonian& h, Scheme scheme, WaitingTimeDistribution dist);

    const TwoLevelHamiltonian& hamiltonian() const noexcept { return h_; }
    Scheme scheme() const noexcept { return scheme_; }
    const WaitingTimeDistribution& distribution() const noexcept { return dist_; }

    /// Poissonian f~, g~ (Laplace transforms of f and g).
    double f(double s) const;
    double g(double s) const;

    /// Renewal U~(s) = ∫ p f e^{-sτ}, V~(s) = ∫ p g e^{-sτ}. Real s >= 0 uses
    /// adaptive quadrature with an exact tail (series form for Lomax); complex
    /// s uses the series form.
    double U(double s) const;
    double V(double s) const;
    Complex U(Complex s) const;
    Complex V(Complex s) const;
    double V0() const noexcept { return v0_; }

private:
    double renewal_quadrature(const OverlapSeries& x, double s) const;

    TwoLevelHamiltonian h_;
    Scheme scheme_;
    WaitingTimeDistribution dist_;
    OverlapSeries fs_;
    OverlapSeries gs_;
    double v0_ = 0.0;
};

/// F~(s) for a renewal protocol: Scheme 1 (p~ - V~)/(1 - V~); Scheme 2
/// 1 - (1 - p~)(1 + p~ - 2V~)/(1 - V~). Equal to 1 at s = 0.
double fdt_laplace_renewal(const ProtocolTransforms& pt, double s);
Complex fdt_laplace_renewal(const ProtocolTransforms& pt, Complex s);
double fdt_laplace_renewal(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist,
                           double s);

/// Scheme 1: <τ>/(1 - V~(0)); Scheme 2: 2<τ>. InfiniteMean if <τ> diverges.
double mean_fdt_renewal(const ProtocolTransforms& pt);
double mean_fdt_renewal(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist);

/// Large-t law F(t) ~ amplitude · t^{-exponent}: Scheme 1 (A/(1 - V~(0)), μ+1),
/// Scheme 2 (2A, μ+1). NotHeavyTailed for light tails, IntegerExponent for
/// integer μ.
PowerLawTail tail_asymptote(const ProtocolTransforms& pt);
PowerLawTail tail_asymptote(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist);

} // namespace qreset
