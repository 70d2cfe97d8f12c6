#pragma once

// Estimators applied to Monte Carlo output: power-law tail fits, small-t
// polynomial fits, goodness-of-fit statistics.

#include "qreset/montecarlo.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qreset {

struct PowerLawFit {
    /// Density exponent α in F(t) ≈ amplitude · t^{-α}.
    double exponent = 0.0;
    double amplitude = 0.0;
    /// Detections inside the fitting window.
    std::uint64_t samples = 0;
};

/// Binned Poisson maximum-likelihood fit of F(t) = K t^{-α} to the log
/// histogram bins whose lower edge is >= t_lo. The amplitude is normalized
/// by n_total trajectories. With fixed_exponent set only K is fitted.
/// InvalidArgument if the window holds fewer than 10 detections.
PowerLawFit fit_power_law_tail(const LogHistogram& hist, std::uint64_t n_total, double t_lo,
                               std::optional<double> fixed_exponent = std::nullopt);

/// Weighted least-squares fit of the density Σ_k c_k t^{order+k}, k = 0..terms-1,
/// to detection samples in [0, t_max] binned into `bins` equal bins. Returns
/// the leading coefficient c_0 (density normalized by n_total).
double fit_small_t_coefficient(std::span<const double> samples, std::uint64_t n_total, int order, double t_max,
                               int terms = 3, int bins = 200);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};

/// Pearson test of counts[n] against Poisson(mean); tail classes with
/// expectation below 5 are pooled.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean);

/// sup_t |F_emp(t) - cdf(t)| with F_emp normalized by n_total (censored
/// trajectories never enter the empirical CDF). `sorted` must be ascending.
double ks_statistic(std::span<const double> sorted, std::uint64_t n_total, const std::function<double(double)>& cdf);

/// Asymptotic 1% critical value 1.628/√n.
double ks_critical_1pct(std::uint64_t n);

} // namespace qreset
