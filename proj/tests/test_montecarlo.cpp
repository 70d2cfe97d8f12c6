#include "qreset/error.hpp"
#include "qreset/jaynes_cummings.hpp"
#include "qreset/montecarlo.hpp"
#include "qreset/statistics.hpp"
#include "qreset/twolevel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace qreset;

namespace {

TwoLevelHamiltonian decoupled()
{
    return make_hamiltonian({{{Complex{0.5, 0}, Complex{0, 0}}, {Complex{0, 0}, Complex{-0.5, 0}}}});
}

TrajectoryConfig jc_config(Scheme scheme, double r, std::uint64_t n, std::uint64_t seed = 42)
{
    TrajectoryConfig cfg(make_jc_hamiltonian(0.1, 37), scheme, make_exponential(r));
    cfg.n_trajectories = n;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("decoupled Hamiltonian")
{
    SUBCASE("scheme 1 never detects")
    {
        TrajectoryConfig cfg(decoupled(), Scheme::One, make_exponential(1.0));
        cfg.n_trajectories = 2000;
        const auto res = run_ensemble(cfg);
        CHECK(res.n_detected == 0);
        CHECK(res.n_censored == 2000);
        CHECK(res.censored_fraction() == 1.0);
    }
    SUBCASE("scheme 2 detects at the first epoch, so t_detect ~ Exponential(r)")
    {
        TrajectoryConfig cfg(decoupled(), Scheme::Two, make_exponential(2.0));
        cfg.n_trajectories = 100000;
        cfg.keep_samples = true;
        const auto res = run_ensemble(cfg);
        CHECK(res.n_detected == cfg.n_trajectories);
        CHECK(std::abs(res.mean - 0.5) < 4 * res.mean_se);
        std::vector<double> sorted = res.samples;
        std::sort(sorted.begin(), sorted.end());
        const double d = ks_statistic(sorted, res.n_trajectories, [](double t) { return 1 - std::exp(-2 * t); });
        CHECK(d < ks_critical_1pct(res.n_trajectories));
        Philox4x32 rng(1, 0);
        for (int i = 0; i < 100; ++i)
            CHECK(sample_trajectory(cfg, rng).measurements == 1);
    }
}

TEST_CASE("empirical means agree with the closed forms")
{
    SUBCASE("scheme 2, r = 1 -> 2")
    {
        const auto res = run_ensemble(jc_config(Scheme::Two, 1.0, 1000000));
        CHECK(std::abs(res.mean - 2.0) < 4 * res.mean_se);
    }
    SUBCASE("scheme 1, r = 0.8 -> 3.581081")
    {
        const auto res = run_ensemble(jc_config(Scheme::One, 0.8, 1000000));
        CHECK(std::abs(res.mean - 3.581081) < 4 * res.mean_se);
        CHECK(res.mean_se == doctest::Approx(std::sqrt(res.variance / double(res.n_detected))));
    }
}

TEST_CASE("histogram mass and censoring add up to one")
{
    auto cfg = jc_config(Scheme::One, 0.3, 50000);
    cfg.t_cutoff = 20.0;
    const auto res = run_ensemble(cfg);
    CHECK(res.n_censored > 0);
    CHECK(std::abs(res.histogram_mass() + res.censored_fraction() - 1.0) < 1e-12);
    CHECK(res.t_cutoff == 20.0);
    CHECK(std::find_if(res.warnings.begin(), res.warnings.end(),
                       [](const std::string& w) { return w.find("CutoffTooSmall") != std::string::npos; }) !=
          res.warnings.end());
}

TEST_CASE("default cutoff")
{
    const auto cfg = jc_config(Scheme::One, 0.8, 10);
    CHECK(default_cutoff(cfg) == doctest::Approx(50 * mean_fdt_poisson(cfg.hamiltonian, Scheme::One, 0.8)));
    TrajectoryConfig heavy(make_jc_hamiltonian(0.1, 37), Scheme::One, make_lomax(0.8, 2.0));
    CHECK(default_cutoff(heavy) == doctest::Approx(2e4));
}

TEST_CASE("determinism")
{
    auto cfg = jc_config(Scheme::One, 1.0, 20000, 7);
    cfg.keep_samples = true;
    cfg.probe_times = {1.0, 4.0};
    const auto a = run_ensemble(cfg);
    const auto b = run_ensemble(cfg);
    cfg.workers = 3;
    const auto c = run_ensemble(cfg);
    const auto d = run_ensemble_serial(cfg);
    for (const auto* x : {&b, &c, &d}) {
        CHECK(x->histogram.counts == a.histogram.counts);
        CHECK(x->log_histogram.counts == a.log_histogram.counts);
        CHECK(x->samples == a.samples);
        CHECK(x->measurement_counts[1].counts == a.measurement_counts[1].counts);
        CHECK(x->n_detected == a.n_detected);
    }
    // Block-wise merging reorders floating-point sums, so only near equality is promised
    // between the blocked and the single-accumulator paths.
    CHECK(c.mean == a.mean);
    CHECK(d.mean == doctest::Approx(a.mean).epsilon(1e-12));
    CHECK(d.variance == doctest::Approx(a.variance).epsilon(1e-10));

    cfg.seed = 8;
    CHECK(run_ensemble(cfg).samples != a.samples);
}

TEST_CASE("survival estimate follows the closed form")
{
    const auto sector = make_jc_sector(0.1, 37, 0.8);
    auto cfg = jc_config(Scheme::One, 0.8, 200000);
    cfg.keep_samples = true;
    const auto res = run_ensemble(cfg);

    std::vector<double> grid(41);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = 0.5 * static_cast<double>(i);
    const auto s = survival_estimate(res, grid);
    CHECK(s[0] == 1.0);
    CHECK(std::is_sorted(s.rbegin(), s.rend()));

    const double n = static_cast<double>(res.n_trajectories);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double p = survival(sector, Scheme::One, grid[i]) - survival(sector, Scheme::One, grid[i + 1]);
        const double phat = s[i] - s[i + 1];
        CHECK(std::abs(phat - p) < 5 * std::sqrt(p * (1 - p) / n));
    }
    for (std::size_t i : {4u, 12u, 30u}) {
        const double q = survival(sector, Scheme::One, grid[i]);
        CHECK(std::abs(s[i] - q) < 5 * std::sqrt(q * (1 - q) / n));
    }
}

TEST_CASE("measurement counts are Poisson for the exponential protocol")
{
    auto cfg = jc_config(Scheme::One, 1.5, 100000);
    cfg.probe_times = {2.0};
    const auto res = run_ensemble(cfg);
    REQUIRE(res.measurement_counts.size() == 1);
    const auto& mc = res.measurement_counts[0];
    CHECK(std::accumulate(mc.counts.begin(), mc.counts.end(), std::uint64_t{0}) == cfg.n_trajectories);
    const auto chi = chi_square_poisson(mc.counts, 1.5 * 2.0);
    CHECK(chi.p_value > 0.01);
}

TEST_CASE("weighted survival agrees with the Bernoulli estimator")
{
    auto cfg = jc_config(Scheme::One, 1.0, 200000);
    cfg.keep_samples = true;
    const double t = 3.0;
    const std::vector<double> grid{t};
    const double bernoulli = survival_estimate(cfg, grid)[0];
    const double se_b = std::sqrt(bernoulli * (1 - bernoulli) / double(cfg.n_trajectories));
    auto small = cfg;
    small.n_trajectories = 20000;
    const auto w = weighted_survival_check(small, t);
    CHECK(std::abs(w.value - bernoulli) < 3 * std::hypot(se_b, w.standard_error));
    const double exact = survival(make_jc_sector(0.1, 37, 1.0), Scheme::One, t);
    CHECK(std::abs(w.value - exact) < 4 * w.standard_error);

    SUBCASE("no measurement before t gives weight one")
    {
        TrajectoryConfig slow(make_jc_hamiltonian(0.1, 37), Scheme::One, make_exponential(1e-6));
        slow.n_trajectories = 1000;
        const auto ws = weighted_survival_check(slow, 1.0);
        CHECK(ws.value == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("Laplace-domain estimate matches the renewal transform")
{
    const auto h = make_jc_hamiltonian(0.1, 37);
    TrajectoryConfig cfg(h, Scheme::Two, make_lomax(2.5, 1.0));
    cfg.n_trajectories = 200000;
    cfg.keep_samples = true;
    const auto res = run_ensemble(cfg);
    const auto est = laplace_estimate(res, 0.5);
    const double exact = fdt_laplace_renewal(h, Scheme::Two, make_lomax(2.5, 1.0), 0.5);
    CHECK(std::abs(est.value - exact) < 4 * est.standard_error);
}

TEST_CASE("invalid configurations")
{
    auto cfg = jc_config(Scheme::One, 1.0, 0);
    CHECK_THROWS_AS(run_ensemble(cfg), Error);
    cfg.n_trajectories = 10;
    cfg.probe_times = {-1.0};
    CHECK_THROWS_AS(run_ensemble(cfg), Error);
}
