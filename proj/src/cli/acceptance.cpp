#include "qreset/acceptance.hpp"

#include "qreset/cli.hpp"
#include "qreset/error.hpp"
#include "qreset/jaynes_cummings.hpp"
#include "qreset/laplace.hpp"
#include "qreset/montecarlo.hpp"
#include "qreset/optimize.hpp"
#include "qreset/quadrature.hpp"
#include "qreset/statistics.hpp"
#include "qreset/twolevel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace qreset::acceptance {

namespace {

// Verdict under construction: every check appends to the detail text and
// can only turn the verdict to failed.
class Verdict {
public:
    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            passed_ = false;
            failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
        }
    }
    void note(const std::string& text) { notes_ << (notes_.tellp() > 0 ? "; " : "") << text; }
    bool passed() const { return passed_; }
    std::string detail() const
    {
        std::string d = notes_.str();
        if (!passed_)
            d += (d.empty() ? "" : " | ") + std::string("FAILED: ") + failures_.str();
        return d;
    }

private:
    bool passed_ = true;
    std::ostringstream notes_;
    std::ostringstream failures_;
};

std::string fmt(double x, int precision = 6)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(precision);
    s << x;
    return s.str();
}

struct Pair {
    double g;
    int n;
};

const std::vector<Pair> kNinePairs = {{0.05, 1}, {0.05, 10}, {0.05, 37}, {0.1, 1}, {0.1, 10},
                                      {0.1, 37}, {0.5, 1},   {0.5, 10},  {0.5, 37}};
const std::vector<Pair> kMatrixPairs = {{0.1, 37}, {0.05, 1}, {0.5, 10}};

double coupling(const Pair& p)
{
    return p.g * std::sqrt(static_cast<double>(p.n));
}

EmpiricalFirstDetection simulate(const TwoLevelHamiltonian& h, Scheme scheme, WaitingTimeDistribution dist,
                                 std::uint64_t n, std::uint64_t seed, unsigned workers, double cutoff = 0.0,
                                 bool keep = false, std::vector<double> probes = {})
{
    TrajectoryConfig cfg(h, scheme, std::move(dist));
    cfg.n_trajectories = n;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.t_cutoff = cutoff;
    cfg.keep_samples = keep;
    cfg.probe_times = std::move(probes);
    return run_ensemble(cfg);
}

double elapsed(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

void scheme1_mean_vs_monte_carlo(Verdict& v, const Options& opt)
{
    const auto start = std::chrono::steady_clock::now();
    const Pair p{0.1, 37};
    const std::vector<double> rates{0.1, 0.8, 1.216553, 3.0};
    for (std::size_t k = 0; k < rates.size(); ++k) {
        const JcSector sector = make_jc_sector(p.g, p.n, rates[k]);
        const double exact = moments_scheme1(sector).mean;
        const auto res = simulate(sector.hamiltonian(), Scheme::One, make_exponential(rates[k]), 1000000,
                                  opt.seed + k, opt.workers);
        const double z = (res.mean - exact) / res.mean_se;
        v.note("r=" + fmt(rates[k]) + " exact " + fmt(exact) + " mc " + fmt(res.mean) + " z " + fmt(z, 3));
        v.check(std::abs(z) <= 4.0, "|z| > 4 at r=" + fmt(rates[k]));
    }
    const double t = elapsed(start);
    v.note("runtime " + fmt(t, 3) + " s");
    v.check(t < 30.0, "runtime above 30 s");
}

void optimal_rate_numeric(Verdict& v, const Options&)
{
    const auto start = std::chrono::steady_clock::now();
    double worst_r = 0.0;
    double worst_value = 0.0;
    for (const Pair& p : kNinePairs) {
        const JcSector base = make_jc_sector(p.g, p.n, 1.0);
        auto mean = [&](double r) {
            JcSector s = base;
            s.r = r;
            return moments_scheme1(s).mean;
        };
        const Bracket b = find_bracket(mean, 0.01);
        const MinimizeResult m = minimize_scalar(mean, b, 1e-10);
        const double a = coupling(p);
        const double rel = std::abs(m.x - 2.0 * a) / (2.0 * a);
        const double dv = std::abs(m.value - 2.0 / a);
        worst_r = std::max(worst_r, rel);
        worst_value = std::max(worst_value, dv);
        v.check(rel < 1e-6, "r* off by " + fmt(rel, 3) + " at g=" + fmt(p.g) + ", n=" + std::to_string(p.n));
        v.check(dv < 1e-8, "min value off by " + fmt(dv, 3) + " at g=" + fmt(p.g) + ", n=" + std::to_string(p.n));
    }
    const double t = elapsed(start);
    v.note("9 pairs; max rel r* error " + fmt(worst_r, 3) + ", max |t(r*) - 2/(g sqrt n)| " + fmt(worst_value, 3) +
           ", runtime " + fmt(t, 3) + " s");
    v.check(t < 1.0, "runtime above 1 s");
}

void scheme2_means(Verdict& v, const Options& opt)
{
    const double r = 1.0;
    const JcSector sector = make_jc_sector(0.1, 37, r);
    const double analytic = moments_scheme2(sector).mean;
    v.check(std::abs(analytic - 2.0 / r) < 1e-12, "closed-form mean differs from 2/r");
    const auto res =
        simulate(sector.hamiltonian(), Scheme::Two, make_exponential(r), 1000000, opt.seed, opt.workers);
    const double z1 = (res.mean - 2.0 / r) / res.mean_se;
    v.note("Poisson r=1: mc " + fmt(res.mean) + " vs 2, z " + fmt(z1, 3));
    v.check(std::abs(z1) <= 4.0, "Poisson |z| > 4");

    const auto lomax = make_lomax(2.5, 1.0);
    const double renewal = mean_fdt_renewal(sector.hamiltonian(), Scheme::Two, lomax);
    v.check(std::abs(renewal - 4.0 / 3.0) < 1e-12, "renewal mean differs from 2<tau> = 4/3");
    const auto res2 = simulate(sector.hamiltonian(), Scheme::Two, lomax, 1000000, opt.seed + 1, opt.workers, 1e4);
    const double z2 = (res2.mean - renewal) / res2.mean_se;
    v.note("Lomax{2.5,1}: analytic " + fmt(renewal) + " mc " + fmt(res2.mean) + " z " + fmt(z2, 3));
    v.check(std::abs(z2) <= 4.0, "Lomax |z| > 4");
}

void variance_co_minimum(Verdict& v, const Options&)
{
    double worst_closed = 0.0;
    double worst_numeric = 0.0;
    for (const Pair& p : kNinePairs) {
        const JcSector base = make_jc_sector(p.g, p.n, 1.0);
        const double target = 2.0 * coupling(p);
        const double closed = variance_argmin_scheme1(base);
        auto variance = [&](double r) {
            JcSector s = base;
            s.r = r;
            return moments_scheme1(s).variance;
        };
        const MinimizeResult m = minimize_scalar(variance, find_bracket(variance, 0.01), 1e-10);
        const double e1 = std::abs(closed - target) / target;
        const double e2 = std::abs(m.x - target) / target;
        worst_closed = std::max(worst_closed, e1);
        worst_numeric = std::max(worst_numeric, e2);
        v.check(e1 < 1e-9, "calculus argmin off at g=" + fmt(p.g) + ", n=" + std::to_string(p.n));
        v.check(e2 < 1e-6, "numeric argmin off at g=" + fmt(p.g) + ", n=" + std::to_string(p.n));
    }
    v.note("max rel error: derivative root " + fmt(worst_closed, 3) + ", golden section " + fmt(worst_numeric, 3));
}

void small_t_universality(Verdict& v, const Options& opt)
{
    for (const Pair& p : kMatrixPairs) {
        for (double r : {0.1, 0.8, 3.0}) {
            const JcSector s = make_jc_sector(p.g, p.n, r);
            const double t = 1e-3 / coupling(p);
            const double ratio = pdf_scheme1(s, t) / (r * p.g * p.g * p.n * t * t);
            v.check(ratio >= 0.995 && ratio <= 1.005,
                    "closed-form ratio " + fmt(ratio) + " out of band at g=" + fmt(p.g) + ", n=" + std::to_string(p.n) +
                        ", r=" + fmt(r) + " (r t = " + fmt(r * t, 3) + ")");
            const double f0 = pdf_scheme2(s, 0.0);
            v.check(std::abs(f0 - r) <= 1e-12 * r, "pdf_scheme2(0) = " + fmt(f0, 17) + " != r");
        }
    }
    v.note("closed-form t^2 ratios in [0.995, 1.005] and pdf_scheme2(0) = r on 9 (g, n, r) cases");

    const double r = 0.5;
    const JcSector s = make_jc_sector(0.1, 37, r);
    for (Scheme scheme : {Scheme::One, Scheme::Two}) {
        const auto res = simulate(s.hamiltonian(), scheme, make_exponential(r), 4000000,
                                  opt.seed + static_cast<int>(scheme), opt.workers, 0.0, true);
        const int order = scheme == Scheme::One ? 2 : 0;
        const double fitted = fit_small_t_coefficient(res.samples, res.n_trajectories, order, 0.8, 3, 100);
        const double expected = small_t_coefficient(s.hamiltonian(), scheme, make_exponential(r));
        const double rel = fitted / expected - 1.0;
        v.note("MC scheme " + std::to_string(static_cast<int>(scheme)) + " fit " + fmt(fitted) + " vs " +
               fmt(expected) + " (" + fmt(100.0 * rel, 3) + "%)");
        v.check(std::abs(rel) < 0.05, "Monte Carlo small-t fit off by more than 5%");
    }
}

void cubic_integrity(Verdict& v, const Options&)
{
    const std::vector<double> mus = log_grid(1e-6, 1e2, 801);
    double worst_vieta = 0.0;
    double worst_residual = 0.0;
    for (double mu : mus) {
        const CubicRoots c = cubic_roots(mu);
        const double mod2 = c.lambda_r * c.lambda_r + c.lambda_i * c.lambda_i;
        const double vieta = std::max({std::abs(c.lambda1 + 2.0 * c.lambda_r + 2.0), std::abs(c.lambda1 * mod2 + mu),
                                       std::abs(2.0 * c.lambda1 * c.lambda_r + mod2 - 1.0 - 2.0 * mu)});
        const double residual = std::max(std::abs(cubic_value(mu, Complex{c.lambda1, 0.0})),
                                          std::abs(cubic_value(mu, Complex{c.lambda_r, c.lambda_i})));
        worst_vieta = std::max(worst_vieta, vieta);
        worst_residual = std::max(worst_residual, residual);
        v.check(vieta < 1e-12 && residual < 1e-12, "residual above 1e-12 at mu=" + fmt(mu));
        v.check(c.lambda_i > 0.0 && c.lambda_r < c.lambda1 && c.lambda1 < 0.0, "root ordering broken at mu=" + fmt(mu));
    }
    bool negative = true;
    for (double mu : log_grid(1e-6, 1e6, 1201))
        negative = negative && cubic_discriminant(mu) < 0.0;
    v.check(negative, "non-negative discriminant found");
    v.note("mu in [1e-6, 1e2] (801 pts): max Vieta " + fmt(worst_vieta, 3) + ", max |P(lambda)| " +
           fmt(worst_residual, 3) + "; discriminant < 0 on [1e-6, 1e6]");
}

void pdf_normalization(Verdict& v, const Options&)
{
    double worst = 0.0;
    for (const Pair& p : kMatrixPairs) {
        for (double r : {0.1, 0.8, 1.216553, 3.0}) {
            const JcSector s = make_jc_sector(p.g, p.n, r);
            const CubicRoots c = cubic_roots(s.mu_scale());
            const double t_end = 80.0 * maximal_time(s);
            const double period = 2.0 * std::numbers::pi / (r * c.lambda_i);
            QuadratureOptions q;
            q.rel_tol = 1e-12;
            q.abs_tol = 1e-14;
            q.initial_intervals = static_cast<std::size_t>(std::clamp(t_end / period, 4.0, 2e5));
            q.max_intervals = 400000;
            for (Scheme scheme : {Scheme::One, Scheme::Two}) {
                const double total = integrate([&](double t) { return pdf(s, scheme, t); }, 0.0, t_end, q).value;
                worst = std::max(worst, std::abs(total - 1.0));
                v.check(std::abs(total - 1.0) < 1e-8, "integral " + fmt(total, 12) + " at g=" + fmt(p.g) +
                                                           ", n=" + std::to_string(p.n) + ", r=" + fmt(r));
            }
        }
    }
    v.note("24 (g, n, r, scheme) cases; max |integral - 1| = " + fmt(worst, 3));
}

double fitted_decay_time(const JcSector& s, Scheme scheme, double t_m)
{
    // Least-squares slope of log F over [20 t_m, 40 t_m].
    const int n = 41;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double t = t_m * (20.0 + 20.0 * i / (n - 1));
        const double y = std::log(pdf(s, scheme, t));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -1.0 / slope;
}

void maximal_time_scale(Verdict& v, const Options&)
{
    double worst = 0.0;
    for (const Pair& p : kMatrixPairs) {
        for (double r : {0.1, 0.8, 1.216553, 3.0}) {
            const JcSector s = make_jc_sector(p.g, p.n, r);
            const double t_m = maximal_time(s);
            for (Scheme scheme : {Scheme::One, Scheme::Two}) {
                const double rel = std::abs(fitted_decay_time(s, scheme, t_m) / t_m - 1.0);
                worst = std::max(worst, rel);
                v.check(rel < 0.005, "log-linear fit off by " + fmt(100 * rel, 3) + "% at g=" + fmt(p.g) +
                                         ", n=" + std::to_string(p.n) + ", r=" + fmt(r));
            }
        }
        const double r_star = 2.0 * coupling(p);
        const JcSector slow = make_jc_sector(p.g, p.n, 1e-3 * r_star);
        const JcSector fast = make_jc_sector(p.g, p.n, 1e3 * r_star);
        const double low = slow.r * maximal_time(slow) / 2.0;
        const double high = 2.0 * p.g * p.g * p.n * maximal_time(fast) / fast.r;
        v.check(std::abs(low - 1.0) < 0.02, "r t_m / 2 = " + fmt(low) + " at r = 1e-3 r*");
        v.check(std::abs(high - 1.0) < 0.02, "2 g^2 n t_m / r = " + fmt(high) + " at r = 1e3 r*");
        v.note("g=" + fmt(p.g) + ", n=" + std::to_string(p.n) + ": r t_m/2 = " + fmt(low) +
               ", 2g^2n t_m/r = " + fmt(high));
    }
    v.note("max fit deviation " + fmt(100 * worst, 3) + "%");
}

void laplace_oracles(Verdict& v, const Options& opt)
{
    double worst = 0.0;
    for (double r : {0.8, 1.0, 3.0}) {
        const JcSector s = make_jc_sector(0.1, 37, r);
        const double t_m = maximal_time(s);
        const CubicRoots c = cubic_roots(s.mu_scale());
        TalbotConfig tc;
        tc.singularities = {Complex{r * c.lambda1, 0.0}, Complex{r * c.lambda_r, r * c.lambda_i},
                            Complex{r * c.lambda_r, -r * c.lambda_i}};
        for (Scheme scheme : {Scheme::One, Scheme::Two}) {
            const RationalTransform rt = jc_fdt_rational(s, scheme);
            for (int i = 0; i < 60; ++i) {
                const double t = 0.1 + (10.0 * t_m - 0.1) * i / 59.0;
                const double talbot = invert_talbot([&](Complex z) { return jc_fdt_laplace(s, scheme, z); }, t, tc);
                const double closed = pdf(s, scheme, t);
                const double residue = invert_rational(rt, t);
                const double err = std::max(std::abs(talbot - closed), std::abs(residue - closed));
                worst = std::max(worst, err);
                v.check(err < 1e-7, "mismatch " + fmt(err, 3) + " at r=" + fmt(r) + ", t=" + fmt(t));
            }
        }
    }
    v.note("JC Talbot/residue/closed form on t in [0.1, 10 t_m], r in {0.8, 1, 3}: max |diff| " + fmt(worst, 3));

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_rt = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::vector<Pole> poles;
        Polynomial den({1.0});
        const int n_real = 1 + static_cast<int>(u(rng) * 2.0);
        const int n_pairs = static_cast<int>(u(rng) * 3.0);
        for (int i = 0; i < n_real; ++i) {
            const double p = -0.2 - 2.8 * u(rng);
            poles.push_back({Complex{p, 0.0}, 1});
            den = den * Polynomial({-p, 1.0});
        }
        for (int i = 0; i < n_pairs; ++i) {
            const Complex p{-0.2 - 1.8 * u(rng), 0.3 + 2.7 * u(rng)};
            poles.push_back({p, 1});
            poles.push_back({std::conj(p), 1});
            den = den * Polynomial({std::norm(p), -2.0 * p.real(), 1.0});
        }
        std::vector<double> num(static_cast<std::size_t>(den.degree()));
        for (auto& c : num)
            c = 2.0 * u(rng) - 1.0;
        const RationalTransform rt(Polynomial(num), den, poles);
        auto f = [&](double t) { return invert_rational(rt, t); };
        for (int j = 0; j < 10; ++j) {
            const double s = 0.2 + 4.8 * u(rng);
            const double err = std::abs(forward_transform(f, s) - rt(s)) / std::max(1.0, std::abs(rt(s)));
            worst_rt = std::max(worst_rt, err);
            v.check(err < 1e-7, "roundtrip error " + fmt(err, 3) + " on transform " + std::to_string(k));
        }
    }
    v.note("roundtrip on 20 random rational transforms x 10 s values: max rel error " + fmt(worst_rt, 3));
}

void heavy_tail_laws(Verdict& v, const Options& opt)
{
    const auto start = std::chrono::steady_clock::now();
    const auto dist = make_lomax(2.5, 1.0);
    const TwoLevelHamiltonian h = make_jc_hamiltonian(3.0, 1);
    const double t_lo = 30.0;
    for (Scheme scheme : {Scheme::One, Scheme::Two}) {
        const auto res = simulate(h, scheme, dist, 10000000, opt.seed + static_cast<int>(scheme), opt.workers, 1e4);
        const PowerLawFit fit = fit_power_law_tail(res.log_histogram, res.n_trajectories, t_lo);
        const PowerLawFit fixed = fit_power_law_tail(res.log_histogram, res.n_trajectories, t_lo, 3.5);
        const PowerLawTail law = tail_asymptote(h, scheme, dist);
        const std::string tag = "scheme " + std::to_string(static_cast<int>(scheme));
        v.note(tag + ": slope " + fmt(-fit.exponent, 4) + " from " + std::to_string(fit.samples) +
               " detections at t >= 30, amplitude " + fmt(fixed.amplitude, 4) + " vs " + fmt(law.amplitude, 4));
        v.check(std::abs(fit.exponent - 3.5) <= 0.15, tag + " slope outside -3.5 +/- 0.15");
        if (scheme == Scheme::Two)
            v.check(std::abs(fixed.amplitude / law.amplitude - 1.0) <= 0.2, "scheme 2 amplitude off by more than 20%");
    }
    const double t = elapsed(start);
    v.note("runtime " + fmt(t, 3) + " s");
    v.check(t < 300.0, "runtime above 5 min");
}

void protocol_statistics(Verdict& v, const Options& opt)
{
    const double r = 0.8;
    const JcSector s = make_jc_sector(0.1, 37, r);
    const std::vector<double> probes{1.0, 5.0, 20.0};
    const auto res = simulate(s.hamiltonian(), Scheme::One, make_exponential(r), 200000, opt.seed, opt.workers, 0.0,
                              false, probes);
    for (const MeasurementCounts& mc : res.measurement_counts) {
        const ChiSquareResult chi = chi_square_poisson(mc.counts, r * mc.time);
        v.note("t=" + fmt(mc.time) + ": chi2 " + fmt(chi.statistic, 4) + " dof " + std::to_string(chi.dof) + " p " +
               fmt(chi.p_value, 3));
        v.check(chi.p_value > 0.01, "chi-square rejects Poisson(rt) at t=" + fmt(mc.time));
        std::uint64_t total = 0;
        for (auto c : mc.counts)
            total += c;
        v.check(total == res.n_trajectories, "P(n|t) does not sum to one");
    }
}

void reproducibility(Verdict& v, const Options& opt)
{
    std::vector<cli::RunConfig> configs(3);
    configs[0].scheme = 1;
    configs[0].r = 0.8;
    configs[0].trajectories = 200000;
    configs[1].scheme = 2;
    configs[1].protocol = {"lomax", "2.5", "1"};
    configs[1].trajectories = 100000;
    configs[2] = configs[0];
    configs[2].format = "json";
    for (std::size_t k = 0; k < configs.size(); ++k) {
        cli::RunConfig cfg = configs[k];
        cfg.seed = opt.seed;
        std::string reference;
        for (unsigned workers : {1u, 4u, 8u}) {
            cfg.workers = workers;
            const cli::CommandOutput out = cli::cmd_simulate(cfg);
            const std::string bytes = out.primary + out.summary;
            if (workers == 1)
                reference = bytes;
            else
                v.check(bytes == reference, "output of run " + std::to_string(k) + " differs at " +
                                                std::to_string(workers) + " workers");
        }
        v.note("run " + std::to_string(k) + ": " + std::to_string(reference.size()) + " bytes identical for 1/4/8 workers");
    }
}

struct Entry {
    const char* title;
    std::function<void(Verdict&, const Options&)> body;
};

const std::vector<Entry>& registry()
{
    static const std::vector<Entry> entries = {
        {"Scheme 1 JC mean vs Monte Carlo", scheme1_mean_vs_monte_carlo},
        {"optimal rate r* = 2g sqrt(n)", optimal_rate_numeric},
        {"Scheme 2 means 2/r and 2<tau>", scheme2_means},
        {"variance co-minimum", variance_co_minimum},
        {"small-t universality", small_t_universality},
        {"cubic-root integrity", cubic_integrity},
        {"PDF normalization", pdf_normalization},
        {"maximal time scale", maximal_time_scale},
        {"Laplace oracle equivalence", laplace_oracles},
        {"heavy-tail laws", heavy_tail_laws},
        {"protocol statistics", protocol_statistics},
        {"reproducibility across workers", reproducibility},
    };
    return entries;
}

} // namespace

CriterionResult run_criterion(int id, const Options& opt)
{
    if (id < 1 || id > kCriterionCount)
        throw Error(ErrorCode::InvalidArgument, "criterion id out of range");
    const Entry& e = registry()[static_cast<std::size_t>(id - 1)];
    CriterionResult result;
    result.id = id;
    result.title = e.title;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        e.body(v, opt);
    } catch (const std::exception& ex) {
        v.check(false, std::string("exception: ") + ex.what());
    }
    result.seconds = elapsed(start);
    result.passed = v.passed();
    result.detail = v.detail();
    return result;
}

std::vector<CriterionResult> run_all(const Options& opt)
{
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end())
            continue;
        out.push_back(run_criterion(id, opt));
    }
    return out;
}

std::string format_line(const CriterionResult& r)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << "criterion " << (r.id < 10 ? " " : "") << r.id << (r.passed ? " PASS  " : " FAIL  ") << r.title << " | "
      << r.detail << " (" << fmt(r.seconds, 3) << " s)";
    return s.str();
}

} // namespace qreset::acceptance
