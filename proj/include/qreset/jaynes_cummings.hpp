#pragma once

// Closed-form first-detection statistics of the resonant Jaynes-Cummings
// model in one excitation sector under Poissonian measurements at rate r.
//
// With a = g√n and μ = 2a²/r², the transforms in λ = s/r are
//   Scheme 1: F~ = μ / P(λ),   Scheme 2: F~ = (μ + λ(λ+1)) / P(λ),
//   P(λ) = λ³ + 2λ² + (1 + 2μ)λ + μ,
// so F(t) = r G(rt) with G a sum of three exponentials.

#include "qreset/core.hpp"
#include "qreset/laplace.hpp"

#include <span>
#include <vector>

namespace qreset {

struct JcSector {
    double g = 0.1;
    int n = 1;
    double omega_c = 1.0;
    double r = 1.0;

    /// a = g√n, the Rabi half-frequency of the sector.
    double coupling() const;
    /// μ = 2 g² n / r², recomputed on every call.
    double mu_scale() const;
    TwoLevelHamiltonian hamiltonian() const;
};

/// InvalidArgument unless g > 0, n >= 1, r > 0.
JcSector make_jc_sector(double g, int n, double r, double omega_c = 1.0);

/// One real root and a conjugate pair λ_R ± iλ_I (λ_I > 0) of P.
struct CubicRoots {
    double lambda1 = 0.0;
    double lambda_r = 0.0;
    double lambda_i = 0.0;
};

/// Closed-form roots, real root polished by Newton. InvalidMu for μ <= 0.
CubicRoots cubic_roots(double mu);
/// -4μ + 13μ² - 32μ³, negative for every μ > 0.
double cubic_discriminant(double mu);
/// P(λ) at a complex point.
Complex cubic_value(double mu, Complex lambda);

double pdf_scheme1(const JcSector& sector, double t);
double pdf_scheme2(const JcSector& sector, double t);
double pdf(const JcSector& sector, Scheme scheme, double t);
/// S(t) = ∫_t^∞ F.
double survival(const JcSector& sector, Scheme scheme, double t);

/// Data-parallel PDF evaluation over a time grid (OpenMP) and its serial
/// reference.
std::vector<double> pdf_grid(const JcSector& sector, Scheme scheme, std::span<const double> times);
std::vector<double> pdf_grid_serial(const JcSector& sector, Scheme scheme, std::span<const double> times);

/// g~(s) = (1/s)(2a² + s²)/(4a² + s²), shared by both schemes.
double jc_g_laplace(const JcSector& sector, double s);

/// F~(s) at complex s, and its exact rational form in s.
Complex jc_fdt_laplace(const JcSector& sector, Scheme scheme, Complex s);
RationalTransform jc_fdt_rational(const JcSector& sector, Scheme scheme);

FirstDetectionStats moments_scheme1(const JcSector& sector);
FirstDetectionStats moments_scheme2(const JcSector& sector);
FirstDetectionStats moments(const JcSector& sector, Scheme scheme);

struct RateOptimum {
    double rate = 0.0;
    double value = 0.0;
};

/// r* = 2g√n and t̄(r*) = 2/(g√n); the sector's own r is ignored.
/// NoFiniteOptimum for Scheme 2, whose mean 2/r decreases forever.
RateOptimum optimal_rate(const JcSector& sector, Scheme scheme = Scheme::One);

/// Root of dσ²/dr located by bisection on the analytic derivative.
double variance_argmin_scheme1(const JcSector& sector);

/// t_m = -1/(r λ1), identical for both schemes.
double maximal_time(const JcSector& sector);

/// Coefficient A in F(t) ~ A e^{-t/t_m} for large t.
double tail_amplitude(const JcSector& sector, Scheme scheme);

/// Numeric minimum of t_m over r on [1e-3 r*, 1e3 r*] after a 50-point
/// unimodality check (BracketFailure otherwise).
RateOptimum minimize_maximal_time(const JcSector& sector);

} // namespace qreset
