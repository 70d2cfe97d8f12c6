#include "qreset/error.hpp"
#include "qreset/laplace.hpp"
#include "qreset/optimize.hpp"
#include "qreset/quadrature.hpp"
#include "qreset/rng.hpp"
#include "qreset/waiting_time.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace qreset;

TEST_CASE("densities at known points")
{
    CHECK(waiting_time_density(make_exponential(2.0), 0.0) == doctest::Approx(2.0));
    CHECK(waiting_time_density(make_lomax(2.5, 1.0), 0.0) == doctest::Approx(2.5));
    CHECK(waiting_time_density(make_exponential(1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(waiting_time_density(make_gamma(2.0, 0.5), 1.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::isinf(density_at_zero(make_gamma(0.5, 1.0))));
    CHECK(density_at_zero(make_lomax(2.5, 2.0)) == doctest::Approx(1.25));
}

TEST_CASE("parameter validation and negative times")
{
    CHECK_THROWS_AS(make_exponential(0.0), Error);
    CHECK_THROWS_AS(make_gamma(1.0, -1.0), Error);
    CHECK_THROWS_AS(make_lomax(-2.0, 1.0), Error);
    try {
        waiting_time_density(make_exponential(1.0), -1.0);
        FAIL("expected NegativeTime");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeTime);
    }
    CHECK_THROWS_AS(waiting_time_survival(make_lomax(2.5, 1.0), -0.1), Error);
}

TEST_CASE("moments")
{
    CHECK(waiting_time_mean(make_exponential(4.0)) == doctest::Approx(0.25));
    CHECK(waiting_time_mean(make_gamma(3.0, 0.5)) == doctest::Approx(1.5));
    CHECK(waiting_time_mean(make_lomax(2.5, 1.0)) == doctest::Approx(1.0 / 1.5));
    CHECK(waiting_time_second_moment(make_exponential(1.0)) == doctest::Approx(2.0));
    CHECK(std::isinf(waiting_time_second_moment(make_lomax(1.5, 1.0))));
    try {
        waiting_time_mean(make_lomax(0.8, 1.0));
        FAIL("expected InfiniteMean");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfiniteMean);
    }
}

TEST_CASE("Laplace transforms")
{
    for (double s : {0.0, 0.3, 2.0, 50.0})
        CHECK(waiting_time_laplace(make_exponential(2.0), s) == doctest::Approx(2.0 / (2.0 + s)).epsilon(1e-14));
    CHECK(waiting_time_laplace(make_gamma(2.0, 0.5), 1.0) == doctest::Approx(1.0 / 2.25).epsilon(1e-14));
    for (const auto& d : {make_exponential(1.0), make_gamma(0.7, 2.0), make_lomax(2.5, 1.0)})
        CHECK(waiting_time_laplace(d, 0.0) == doctest::Approx(1.0));

    SUBCASE("Lomax at s = 1 against a direct quadrature")
    {
        // Independent route: integrate p(tau) e^{-tau} on [0, 60]; the rest is below 1e-26.
        QuadratureOptions opt;
        opt.rel_tol = 1e-13;
        opt.abs_tol = 1e-16;
        opt.initial_intervals = 64;
        const auto d = make_lomax(2.5, 1.0);
        const double oracle =
            integrate([&](double t) { return waiting_time_density(d, t) * std::exp(-t); }, 0.0, 60.0, opt).value;
        CHECK(waiting_time_laplace(d, 1.0) == doctest::Approx(oracle).epsilon(1e-11));
    }

    SUBCASE("complex continuation matches the real transform and its conjugate symmetry")
    {
        for (const auto& d : {make_exponential(1.5), make_gamma(2.5, 0.4), make_lomax(1.7, 2.0)}) {
            CHECK(std::abs(waiting_time_laplace(d, Complex{0.8, 0.0}) - waiting_time_laplace(d, 0.8)) < 1e-11);
            const Complex z{0.4, 1.3};
            CHECK(std::abs(waiting_time_laplace(d, std::conj(z)) - std::conj(waiting_time_laplace(d, z))) < 1e-11);
        }
    }

    SUBCASE("Lomax branch cut")
    {
        CHECK_THROWS_AS(waiting_time_laplace(make_lomax(2.5, 1.0), Complex{-1.0, 0.0}), Error);
        CHECK_THROWS_AS(waiting_time_laplace(make_exponential(1.0), -2.0), Error);
    }
}

TEST_CASE("p~(s) + s q~(s) = 1 on a log grid of s")
{
    const std::vector<WaitingTimeDistribution> dists{make_exponential(0.7), make_gamma(0.6, 1.3), make_gamma(3.0, 0.2),
                                                     make_lomax(2.5, 1.0), make_lomax(0.8, 0.5)};
    for (const auto& d : dists) {
        for (double s : log_grid(1e-3, 1e3, 25)) {
            const double lhs = waiting_time_laplace(d, s) + s * waiting_time_survival_laplace(d, s);
            CHECK(std::abs(lhs - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("power-law tails")
{
    const auto tail = power_law_tail(make_lomax(2.5, 2.0));
    REQUIRE(tail);
    CHECK(tail->exponent == doctest::Approx(2.5));
    CHECK(tail->amplitude == doctest::Approx(2.5 * std::pow(2.0, 2.5)));
    CHECK_FALSE(power_law_tail(make_gamma(2.0, 1.0)));
    CHECK_FALSE(power_law_tail(make_exponential(1.0)));
    const double t = 1e6;
    CHECK(waiting_time_density(make_lomax(2.5, 2.0), t) / (tail->amplitude * std::pow(t, -3.5)) ==
          doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("sampler reproduces the mean and survival function")
{
    for (const auto& d : {make_exponential(2.0), make_gamma(2.0, 0.75), make_lomax(3.5, 1.0)}) {
        Philox4x32 rng(11, 0);
        auto u = [&] { return rng.uniform(); };
        const int n = 200000;
        double sum = 0.0;
        int above = 0;
        const double probe = waiting_time_mean(d);
        for (int i = 0; i < n; ++i) {
            const double x = sample_waiting_time(d, u, rng);
            sum += x;
            above += x >= probe;
        }
        const double sd = std::sqrt(waiting_time_second_moment(d) - probe * probe);
        CHECK(std::abs(sum / n - probe) < 5.0 * sd / std::sqrt(n));
        const double q = waiting_time_survival(d, probe);
        CHECK(std::abs(above / double(n) - q) < 5.0 * std::sqrt(q * (1 - q) / n));
    }
}

TEST_CASE("describe")
{
    CHECK(describe(make_lomax(2.5, 1.0)) == "lomax(mu=2.5, tau0=1)");
    CHECK(describe(make_exponential(1.0)) == "exponential(r=1)");
}
