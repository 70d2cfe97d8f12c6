#include "qreset/error.hpp"
#include "qreset/rng.hpp"
#include "qreset/statistics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace qreset;

namespace {

LogHistogram log_histogram(const std::vector<double>& samples, double lo, double hi, int per_decade)
{
    LogHistogram h;
    const int bins = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
    for (int k = 0; k <= bins; ++k)
        h.edges.push_back(lo * std::pow(10.0, double(k) / per_decade));
    h.counts.assign(bins, 0);
    for (double x : samples) {
        if (x < lo) {
            ++h.underflow;
            continue;
        }
        const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
        const auto i = static_cast<std::size_t>(it - h.edges.begin()) - 1;
        if (i < h.counts.size())
            ++h.counts[i];
    }
    return h;
}

} // namespace

TEST_CASE("power-law tail fit on Pareto samples")
{
    // Density 2.5 t^{-3.5} on t >= 1.
    Philox4x32 rng(3, 0);
    const std::uint64_t n = 400000;
    std::vector<double> xs(n);
    for (auto& x : xs)
        x = std::pow(rng.uniform(), -1.0 / 2.5);
    const auto hist = log_histogram(xs, 1.0, 1e5, 10);

    const auto fit = fit_power_law_tail(hist, n, 1.0);
    const double sd = 2.5 / std::sqrt(double(fit.samples));
    CHECK(std::abs(fit.exponent - 3.5) < 4 * sd);
    CHECK(fit.amplitude == doctest::Approx(2.5).epsilon(0.05));

    const auto fixed = fit_power_law_tail(hist, n, 1.0, 3.5);
    CHECK(fixed.exponent == 3.5);
    CHECK(fixed.amplitude == doctest::Approx(2.5).epsilon(0.01));

    const auto upper = fit_power_law_tail(hist, n, 10.0);
    CHECK(upper.samples < fit.samples);
    CHECK(std::abs(upper.exponent - 3.5) < 4 * 2.5 / std::sqrt(double(upper.samples)));

    CHECK_THROWS_AS(fit_power_law_tail(hist, n, 9e4), Error);
}

TEST_CASE("small-t coefficient fit")
{
    // F(t) = 3 t^2 on [0, 1]: the fitted leading coefficient of order 2 is 3.
    Philox4x32 rng(5, 0);
    const std::uint64_t n = 1000000;
    std::vector<double> xs(n);
    for (auto& x : xs)
        x = std::cbrt(rng.uniform());
    CHECK(fit_small_t_coefficient(xs, n, 2, 0.5, 3, 100) == doctest::Approx(3.0).epsilon(0.03));

    // F(t) = 2 e^{-2t}: order 0 coefficient 2 despite the curvature.
    std::vector<double> ys(n);
    for (auto& y : ys)
        y = -0.5 * std::log(rng.uniform());
    CHECK(fit_small_t_coefficient(ys, n, 0, 0.5, 3, 100) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("chi-square against Poisson")
{
    const double mean = 3.0;
    const std::uint64_t n = 100000;
    std::vector<std::uint64_t> exact;
    double p = std::exp(-mean);
    for (int k = 0; k < 20; ++k) {
        exact.push_back(static_cast<std::uint64_t>(std::llround(n * p)));
        p *= mean / (k + 1);
    }
    const auto good = chi_square_poisson(exact, mean);
    CHECK(good.p_value > 0.99);
    CHECK(good.dof > 5);

    const auto bad = chi_square_poisson(exact, 3.3);
    CHECK(bad.p_value < 1e-6);
    CHECK(bad.statistic > good.statistic);
}

TEST_CASE("Kolmogorov-Smirnov statistic")
{
    Philox4x32 rng(9, 0);
    const std::uint64_t n = 50000;
    std::vector<double> xs(n);
    for (auto& x : xs)
        x = rng.uniform();
    std::sort(xs.begin(), xs.end());
    const auto uniform_cdf = [](double t) { return std::clamp(t, 0.0, 1.0); };
    CHECK(ks_statistic(xs, n, uniform_cdf) < ks_critical_1pct(n));
    CHECK(ks_statistic(xs, n, [](double t) { return std::clamp(t * t, 0.0, 1.0); }) > ks_critical_1pct(n));
    CHECK(ks_critical_1pct(10000) == doctest::Approx(0.01628));

    // Censored mass never enters the empirical CDF: half the trajectories missing gives D = 1/2.
    CHECK(ks_statistic(xs, 2 * n, uniform_cdf) == doctest::Approx(0.5).epsilon(0.01));
}
