#include "qreset/error.hpp"
#include "qreset/jaynes_cummings.hpp"
#include "qreset/laplace.hpp"
#include "qreset/optimize.hpp"
#include "qreset/quadrature.hpp"
#include "qreset/twolevel.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace qreset;

TEST_CASE("cubic roots satisfy Vieta's relations")
{
    for (double mu : {1e-6, 1e-3, 0.1, 0.74, 1.0, 10.0, 1e3}) {
        const auto c = cubic_roots(mu);
        const double sum = c.lambda1 + 2 * c.lambda_r;
        const double pair = 2 * c.lambda1 * c.lambda_r + c.lambda_r * c.lambda_r + c.lambda_i * c.lambda_i;
        const double product = c.lambda1 * (c.lambda_r * c.lambda_r + c.lambda_i * c.lambda_i);
        CHECK(sum == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(pair == doctest::Approx(1.0 + 2 * mu).epsilon(1e-12));
        CHECK(product == doctest::Approx(-mu).epsilon(1e-10));
        CHECK(c.lambda_i > 0.0);
        CHECK(c.lambda1 < 0.0);
    }
}

TEST_CASE("mu -> 0: lambda1 ~ -mu and the pair tends to a double root at -1")
{
    const double mu = 1e-8;
    const auto c = cubic_roots(mu);
    CHECK(c.lambda1 / -mu == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.lambda_r == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(c.lambda_i == doctest::Approx(std::sqrt(2 * mu)).epsilon(1e-3));
}

TEST_CASE("closed-form roots agree with companion-matrix roots")
{
    const double mu = 0.74;
    const auto c = cubic_roots(mu);
    auto roots = Polynomial({mu, 1 + 2 * mu, 2.0, 1.0}).roots();
    int matched = 0;
    for (const auto& z : roots) {
        const std::vector<Complex> ours{{c.lambda1, 0}, {c.lambda_r, c.lambda_i}, {c.lambda_r, -c.lambda_i}};
        for (const auto& w : ours)
            matched += std::abs(z - w) < 1e-12;
    }
    CHECK(matched == 3);
    CHECK(std::abs(cubic_value(mu, Complex{c.lambda_r, c.lambda_i})) < 1e-13);
}

TEST_CASE("discriminant is negative for every mu > 0")
{
    for (double mu : log_grid(1e-6, 1e6, 121))
        CHECK(cubic_discriminant(mu) < 0.0);
    CHECK(cubic_discriminant(1.0) == doctest::Approx(-4 + 13 - 32));
}

TEST_CASE("invalid parameters")
{
    try {
        cubic_roots(0.0);
        FAIL("expected InvalidMu");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidMu);
    }
    CHECK_THROWS_AS(make_jc_sector(0.0, 1, 1.0), Error);
    CHECK_THROWS_AS(make_jc_sector(0.1, 0, 1.0), Error);
    CHECK_THROWS_AS(make_jc_sector(0.1, 1, -1.0), Error);
}

TEST_CASE("first-detection densities")
{
    const auto sector = make_jc_sector(0.1, 37, 0.8);
    const double a2 = 0.37;

    SUBCASE("small-t behaviour")
    {
        CHECK(pdf_scheme2(sector, 0.0) == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(std::abs(pdf_scheme1(sector, 0.0)) < 1e-14);
        const double t = 1e-4;
        CHECK(pdf_scheme1(sector, t) / (0.8 * a2 * t * t) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("normalization and mean by quadrature")
    {
        QuadratureOptions opt;
        opt.initial_intervals = 200;
        opt.rel_tol = 1e-11;
        for (Scheme scheme : {Scheme::One, Scheme::Two}) {
            const double mass = integrate([&](double t) { return pdf(sector, scheme, t); }, 0.0, 400.0, opt).value;
            const double mean = integrate([&](double t) { return t * pdf(sector, scheme, t); }, 0.0, 400.0, opt).value;
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(mean == doctest::Approx(moments(sector, scheme).mean).epsilon(1e-8));
            CHECK(survival(sector, scheme, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
            const double tail = integrate([&](double t) { return pdf(sector, scheme, t); }, 5.0, 400.0, opt).value;
            CHECK(survival(sector, scheme, 5.0) == doctest::Approx(tail).epsilon(1e-9));
        }
    }
    SUBCASE("Talbot inversion of the exact transform")
    {
        const auto F1 = [&](Complex s) { return jc_fdt_laplace(sector, Scheme::One, s); };
        CHECK(invert_talbot(F1, 2.0) == doctest::Approx(pdf_scheme1(sector, 2.0)).epsilon(1e-9));
        const auto s2 = make_jc_sector(0.1, 37, 0.5);
        const auto F2 = [&](Complex s) { return jc_fdt_laplace(s2, Scheme::Two, s); };
        CHECK(invert_talbot(F2, 1.0) == doctest::Approx(pdf_scheme2(s2, 1.0)).epsilon(1e-9));
    }
    SUBCASE("residue inversion of the rational form")
    {
        for (Scheme scheme : {Scheme::One, Scheme::Two}) {
            const auto rt = jc_fdt_rational(sector, scheme);
            for (double t : {0.5, 3.0, 12.0})
                CHECK(invert_rational(rt, t) == doctest::Approx(pdf(sector, scheme, t)).epsilon(1e-11));
        }
    }
    SUBCASE("JC transforms match the generic two-level route")
    {
        const auto h = sector.hamiltonian();
        for (Scheme scheme : {Scheme::One, Scheme::Two}) {
            const Complex s{0.3, 0.7};
            CHECK(std::abs(jc_fdt_laplace(sector, scheme, s) - fdt_laplace_poisson(h, scheme, 0.8, s)) < 1e-12);
        }
        CHECK(jc_g_laplace(sector, 0.9) == doctest::Approx(g_laplace_poisson(h, Scheme::One, 0.9)).epsilon(1e-13));
    }
    SUBCASE("negative time is rejected")
    {
        CHECK_THROWS_AS(pdf_scheme1(sector, -1.0), Error);
    }
}

TEST_CASE("parallel grid equals the serial reference")
{
    const auto sector = make_jc_sector(0.1, 37, 1.3);
    std::vector<double> times(1001);
    for (std::size_t i = 0; i < times.size(); ++i)
        times[i] = 0.06 * static_cast<double>(i);
    for (Scheme scheme : {Scheme::One, Scheme::Two}) {
        const auto par = pdf_grid(sector, scheme, times);
        const auto ser = pdf_grid_serial(sector, scheme, times);
        REQUIRE(par.size() == ser.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i] == ser[i]);
            CHECK(par[i] == doctest::Approx(pdf(sector, scheme, times[i])).epsilon(1e-14).scale(1e-14));
        }
    }
}

TEST_CASE("moments")
{
    SUBCASE("canonical sector at r = 1")
    {
        const auto sector = make_jc_sector(0.1, 37, 1.0);
        CHECK(moments_scheme1(sector).mean == doctest::Approx(3.351351).epsilon(1e-6));
        CHECK(moments_scheme2(sector).mean == doctest::Approx(2.0));
    }
    SUBCASE("second moment from finite differences of F~")
    {
        const auto sector = make_jc_sector(0.1, 37, 0.8);
        const double h = 1e-4;
        for (Scheme scheme : {Scheme::One, Scheme::Two}) {
            const auto F = [&](double s) { return jc_fdt_laplace(sector, scheme, Complex{s, 0.0}).real(); };
            const double mu2 = (F(h) - 2 * F(0.0) + F(-h)) / (h * h);
            const auto st = moments(sector, scheme);
            CHECK(st.second_moment == doctest::Approx(mu2).epsilon(1e-5));
            CHECK(st.variance == doctest::Approx(st.second_moment - st.mean * st.mean));
        }
    }
    SUBCASE("small-t coefficient")
    {
        const auto sector = make_jc_sector(0.2, 5, 0.6);
        CHECK(moments_scheme1(sector).small_t_coefficient == doctest::Approx(0.6 * 0.04 * 5));
        CHECK(moments_scheme2(sector).small_t_coefficient == doctest::Approx(0.6));
    }
}

TEST_CASE("optimal rate")
{
    for (auto [g, n] : {std::pair{0.1, 37}, std::pair{0.2, 1}}) {
        const auto sector = make_jc_sector(g, n, 1.0);
        const double a = g * std::sqrt(double(n));
        const auto opt = optimal_rate(sector);
        CHECK(opt.rate == doctest::Approx(2 * a));
        CHECK(opt.value == doctest::Approx(2 / a));
        // The numeric minimum of the closed-form mean lands on the same rate.
        const auto mean = [&](double r) { return moments_scheme1(make_jc_sector(g, n, r)).mean; };
        const auto res = minimize_scalar(mean, find_bracket(mean, 0.1));
        CHECK(res.x == doctest::Approx(2 * a).epsilon(1e-6));
    }
    CHECK(optimal_rate(make_jc_sector(0.1, 37, 1.0)).rate == doctest::Approx(1.216553).epsilon(1e-6));
    CHECK(optimal_rate(make_jc_sector(0.1, 37, 1.0)).value == doctest::Approx(3.287980).epsilon(1e-6));
    const auto unit = optimal_rate(make_jc_sector(1.0, 1, 5.0));
    CHECK(unit.rate == doctest::Approx(2.0));
    CHECK(unit.value == doctest::Approx(2.0));
    try {
        optimal_rate(make_jc_sector(0.1, 37, 1.0), Scheme::Two);
        FAIL("expected NoFiniteOptimum");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoFiniteOptimum);
    }
}

TEST_CASE("variance minimum and maximal time")
{
    const auto sector = make_jc_sector(0.1, 37, 1.0);
    const double a = 0.1 * std::sqrt(37.0);

    SUBCASE("variance is minimized at r* = 2a")
    {
        const double rv = variance_argmin_scheme1(sector);
        const auto var = [&](double r) { return moments_scheme1(make_jc_sector(0.1, 37, r)).variance; };
        const double h = 1e-4 * rv;
        CHECK(std::abs(var(rv + h) - var(rv - h)) / (2 * h) < 1e-5 * var(rv));
        CHECK(rv == doctest::Approx(2 * a).epsilon(1e-9));
        CHECK(var(rv) == doctest::Approx(2 / (a * a)));
    }
    SUBCASE("t_m limits")
    {
        // r -> 0: lambda1 -> -1/2 so t_m ~ 2/r; r -> inf: lambda1 ~ -mu so t_m ~ r / (2 a^2).
        const double small = 1e-4, big = 1e4;
        CHECK(maximal_time(make_jc_sector(0.1, 37, small)) == doctest::Approx(2.0 / small).epsilon(1e-3));
        CHECK(maximal_time(make_jc_sector(0.1, 37, big)) == doctest::Approx(big / (2 * a * a)).epsilon(1e-3));
    }
    SUBCASE("t_m matches an exponential fit of the pdf tail")
    {
        const auto s = make_jc_sector(0.1, 37, 2.0);
        const double t1 = 80.0, t2 = 120.0;
        const double fitted = (t2 - t1) / std::log(pdf_scheme1(s, t1) / pdf_scheme1(s, t2));
        CHECK(fitted == doctest::Approx(maximal_time(s)).epsilon(1e-6));
        CHECK(pdf_scheme1(s, t2) / (tail_amplitude(s, Scheme::One) * std::exp(-t2 / maximal_time(s))) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("t_m minimum scales like 1/a and differs from r*")
    {
        const auto m1 = minimize_maximal_time(make_jc_sector(0.1, 37, 1.0));
        const auto m2 = minimize_maximal_time(make_jc_sector(0.2, 37, 1.0));
        CHECK(m1.rate / m2.rate == doctest::Approx(0.5).epsilon(1e-5));
        CHECK(m1.value / m2.value == doctest::Approx(2.0).epsilon(1e-5));
        CHECK(std::abs(m1.rate - 2 * a) > 1e-3);
        CHECK(maximal_time(make_jc_sector(0.1, 37, m1.rate)) == doctest::Approx(m1.value));
        CHECK(maximal_time(make_jc_sector(0.1, 37, 2 * a)) > m1.value);
    }
}
