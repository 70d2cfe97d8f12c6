#include "qreset/cli.hpp"

#include "qreset/error.hpp"
#include "qreset/jaynes_cummings.hpp"
#include "qreset/laplace.hpp"
#include "qreset/montecarlo.hpp"
#include "qreset/optimize.hpp"
#include "qreset/quadrature.hpp"
#include "qreset/statistics.hpp"
#include "qreset/twolevel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qreset::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a command needs to know about the physical setup.
struct Model {
    TwoLevelHamiltonian h;
    Scheme scheme;
    WaitingTimeDistribution dist;
    std::optional<JcSector> jc;

    bool exponential() const { return std::holds_alternative<Exponential>(dist); }
    double rate() const { return std::get<Exponential>(dist).rate; }
    bool closed_form() const { return jc && exponential(); }
};

Model build_model(const RunConfig& cfg)
{
    Model m{build_hamiltonian(cfg), build_scheme(cfg), build_protocol(cfg), std::nullopt};
    if (cfg.model == "jc" && m.exponential())
        m.jc = make_jc_sector(cfg.g, cfg.n, m.rate(), cfg.omega_c);
    return m;
}

Json describe_model(const RunConfig& cfg, const Model& m)
{
    Json j;
    j["model"] = cfg.model;
    if (cfg.model == "jc") {
        j["g"] = cfg.g;
        j["n"] = cfg.n;
    }
    j["scheme"] = cfg.scheme;
    j["protocol"] = describe(m.dist);
    return j;
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

// Null for non-finite values so JSON stays valid.
Json number(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

std::string csv_row(std::initializer_list<std::string> cells)
{
    std::string line;
    bool first = true;
    for (const auto& c : cells) {
        if (!first)
            line += ',';
        line += c;
        first = false;
    }
    return line + '\n';
}

double analytic_mean(const Model& m)
{
    try {
        return m.exponential() ? mean_fdt_poisson(m.h, m.scheme, m.rate()) : mean_fdt_renewal(m.h, m.scheme, m.dist);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InfiniteMean)
            return std::numeric_limits<double>::infinity();
        throw;
    }
}

// Complex-s transforms and their singularities for the Talbot route.
struct TransformRoute {
    std::function<Complex(Complex)> fdt;
    std::vector<Complex> singularities;
    std::optional<PowerLawTail> tail;
};

TransformRoute transform_route(const Model& m)
{
    TransformRoute route;
    if (m.exponential()) {
        const double r = m.rate();
        route.fdt = [h = m.h, scheme = m.scheme, r](Complex s) { return fdt_laplace_poisson(h, scheme, r, s); };
        if (sigma_squared(m.h) > 0.0) {
            route.singularities = fdt_poles_poisson(m.h, r);
            route.singularities.push_back(Complex{-r, 0.0});
        } else {
            route.singularities.push_back(Complex{-r, 0.0});
        }
        return route;
    }
    auto pt = std::make_shared<ProtocolTransforms>(m.h, m.scheme, m.dist);
    route.fdt = [pt](Complex s) { return fdt_laplace_renewal(*pt, s); };
    const double omega = g_series(m.h, m.scheme).frequency;
    double shift = 0.0;
    if (const auto* g = std::get_if<Gamma>(&m.dist))
        shift = -1.0 / g->scale;
    route.singularities = {Complex{shift, 0.0}, Complex{shift, omega}, Complex{shift, -omega}};
    try {
        route.tail = tail_asymptote(*pt);
    } catch (const Error&) {
    }
    return route;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f)
{
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

void require_exponential(const Model& m, const char* command)
{
    if (!m.exponential())
        throw UsageError(std::string(command) + " sweeps the Poisson rate; use --protocol exponential");
}

} // namespace

CommandOutput cmd_pdf(const RunConfig& cfg)
{
    const Model m = build_model(cfg);
    const double tmax = cfg.tmax.value_or(60.0);
    if (!(tmax > 0.0))
        throw UsageError("--tmax must be > 0");
    const std::vector<double> grid = parse_grid(cfg.grid, 0.0, tmax, 601, false);
    if (grid.front() < 0.0)
        throw UsageError("time grid must start at t >= 0");

    std::vector<double> density;
    std::vector<double> asymptote_times;
    double normalization = kNaN;
    std::string method;

    if (m.closed_form()) {
        method = "closed_form";
        const JcSector& sector = *m.jc;
        density = pdf_grid(sector, m.scheme, grid);
        const double t_end = grid.back();
        QuadratureOptions opt;
        opt.rel_tol = 1e-12;
        opt.abs_tol = 1e-15;
        const double period = std::numbers::pi / sector.coupling();
        opt.initial_intervals = static_cast<std::size_t>(std::clamp(t_end / period, 1.0, 1e5));
        const auto body = integrate([&](double t) { return pdf(sector, m.scheme, t); }, 0.0, t_end, opt);
        normalization = body.value + survival(sector, m.scheme, t_end);
    } else {
        method = "talbot";
        const TransformRoute route = transform_route(m);
        TalbotConfig tc;
        tc.singularities = route.singularities;
        std::vector<double> failed;
        density.reserve(grid.size());
        const double f0 = m.scheme == Scheme::Two ? small_t_coefficient(m.h, m.scheme, m.dist) : 0.0;
        for (double t : grid) {
            if (t == 0.0) {
                density.push_back(f0);
                continue;
            }
            try {
                density.push_back(invert_talbot(route.fdt, t, tc));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::InversionUnstable)
                    throw;
                if (route.tail) {
                    asymptote_times.push_back(t);
                    density.push_back(route.tail->amplitude * std::pow(t, -route.tail->exponent));
                } else {
                    failed.push_back(t);
                    density.push_back(kNaN);
                }
            }
        }
        if (!failed.empty()) {
            std::string list;
            for (std::size_t i = 0; i < failed.size() && i < 20; ++i)
                list += (i ? ", " : "") + format_number(failed[i]);
            if (failed.size() > 20)
                list += ", ...";
            throw Error(ErrorCode::InversionUnstable, "Talbot inversion failed at t = " + list);
        }
        double tail_mass = kNaN;
        const double t_end = grid.back();
        try {
            auto fdt = route.fdt;
            tail_mass = invert_talbot([fdt](Complex s) { return (1.0 - fdt(s)) / s; }, t_end, tc);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InversionUnstable)
                throw;
            if (route.tail)
                tail_mass = route.tail->amplitude * std::pow(t_end, 1.0 - route.tail->exponent) /
                    (route.tail->exponent - 1.0);
        }
        normalization = trapezoid(grid, density) + tail_mass;
    }

    Json summary = describe_model(cfg, m);
    summary["command"] = "pdf";
    summary["method"] = method;
    summary["points"] = grid.size();
    summary["t_min"] = grid.front();
    summary["t_max"] = grid.back();
    summary["normalization"] = number(normalization);
    summary["normalization_method"] =
        method == "closed_form" ? "adaptive quadrature plus exact survival beyond t_max"
                                : "trapezoid on the grid plus inverted survival beyond t_max";
    summary["mean"] = number(analytic_mean(m));
    if (!asymptote_times.empty()) {
        summary["asymptote_times"] = asymptote_times;
        summary["note"] = "power-law asymptote used where contour inversion did not converge";
    }

    CommandOutput out;
    if (cfg.format == "json") {
        Json doc;
        doc["t"] = grid;
        Json values = Json::array();
        for (double v : density)
            values.push_back(number(v));
        doc["pdf"] = values;
        doc["summary"] = summary;
        out.primary = dump(doc);
    } else {
        out.primary = csv_row({"t", "pdf"});
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.primary += csv_row({format_number(grid[i]), format_number(density[i])});
        out.summary = dump(summary);
    }
    return out;
}

CommandOutput cmd_mean_sweep(const RunConfig& cfg)
{
    const Model m = build_model(cfg);
    require_exponential(m, "mean-sweep");
    const std::vector<double> rates = parse_grid(cfg.grid, 1e-2, 1e2, 201, true);

    struct Row {
        double r, mean, variance, t_m;
    };
    std::vector<Row> rows;
    for (double r : rates) {
        FirstDetectionStats st;
        if (m.jc) {
            const JcSector sector = make_jc_sector(cfg.g, cfg.n, r, cfg.omega_c);
            st = moments(sector, m.scheme);
        } else {
            st = stats_poisson(m.h, m.scheme, r);
        }
        rows.push_back({r, st.mean, st.variance, st.t_m});
    }
    auto argmin = [&](auto key) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (key(rows[i]) < key(rows[best]))
                best = i;
        return best;
    };
    const std::size_t i_mean = argmin([](const Row& r) { return r.mean; });
    const std::size_t i_tm = argmin([](const Row& r) { return r.t_m; });
    auto mark = [&](std::size_t i) {
        std::string s;
        if (i == i_mean)
            s = "mean";
        if (i == i_tm)
            s += s.empty() ? "t_m" : ";t_m";
        return s;
    };

    CommandOutput out;
    if (cfg.format == "json") {
        Json doc = describe_model(cfg, m);
        doc["command"] = "mean-sweep";
        Json list = Json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Json row;
            row["r"] = rows[i].r;
            row["mean"] = number(rows[i].mean);
            row["variance"] = number(rows[i].variance);
            row["t_m"] = number(rows[i].t_m);
            row["argmin"] = mark(i);
            list.push_back(row);
        }
        doc["rows"] = list;
        out.primary = dump(doc);
    } else {
        out.primary = csv_row({"r", "mean", "variance", "t_m", "argmin"});
        for (std::size_t i = 0; i < rows.size(); ++i)
            out.primary += csv_row({format_number(rows[i].r), format_number(rows[i].mean),
                                    format_number(rows[i].variance), format_number(rows[i].t_m), mark(i)});
    }
    return out;
}

CommandOutput cmd_simulate(const RunConfig& cfg)
{
    const Model m = build_model(cfg);
    TrajectoryConfig tc(m.h, m.scheme, m.dist);
    if (cfg.trajectories < 1)
        throw UsageError("--trajectories must be >= 1");
    tc.n_trajectories = cfg.trajectories;
    tc.seed = cfg.seed;
    tc.workers = cfg.workers;
    tc.keep_samples = m.closed_form();
    if (cfg.tmax) {
        if (!(*cfg.tmax > 0.0))
            throw UsageError("--tmax must be > 0");
        tc.t_cutoff = *cfg.tmax;
    }
    if (!cfg.grid.empty()) {
        std::size_t bins = 0;
        try {
            bins = std::stoul(cfg.grid);
        } catch (const std::exception&) {
            throw UsageError("simulate takes --grid as a histogram bin count");
        }
        if (bins < 1 || std::to_string(bins) != cfg.grid)
            throw UsageError("simulate takes --grid as a histogram bin count");
        tc.histogram_bins = bins;
    }

    EmpiricalFirstDetection res = run_ensemble(tc);
    const double mean_exact = analytic_mean(m);
    const double z = std::isfinite(mean_exact) && res.mean_se > 0.0 ? (res.mean - mean_exact) / res.mean_se : kNaN;

    Json summary = describe_model(cfg, m);
    summary["command"] = "simulate";
    summary["trajectories"] = res.n_trajectories;
    summary["seed"] = cfg.seed;
    summary["t_cutoff"] = res.t_cutoff;
    summary["detected"] = res.n_detected;
    summary["censored"] = res.n_censored;
    summary["censored_fraction"] = res.censored_fraction();
    summary["mean"] = number(res.mean);
    summary["mean_se"] = number(res.mean_se);
    summary["variance"] = number(res.variance);
    summary["analytic_mean"] = number(mean_exact);
    summary["z_score"] = number(z);

    std::vector<double> analytic_density(res.histogram.counts.size(), kNaN);
    if (m.closed_form()) {
        const JcSector& sector = *m.jc;
        std::sort(res.samples.begin(), res.samples.end());
        const double d = ks_statistic(res.samples, res.n_trajectories,
                                      [&](double t) { return 1.0 - survival(sector, m.scheme, t); });
        summary["ks_statistic"] = d;
        summary["ks_critical_1pct"] = ks_critical_1pct(res.n_trajectories);
        const double w = res.histogram.width();
        for (std::size_t k = 0; k < analytic_density.size(); ++k) {
            const double lo = res.histogram.lo + w * static_cast<double>(k);
            analytic_density[k] = (survival(sector, m.scheme, lo) - survival(sector, m.scheme, lo + w)) / w;
        }
    } else {
        summary["ks_statistic"] = nullptr;
    }

    if (const auto* lomax = std::get_if<Lomax>(&m.dist)) {
        const double t_lo = 30.0 * lomax->scale;
        try {
            const PowerLawFit free = fit_power_law_tail(res.log_histogram, res.n_trajectories, t_lo);
            summary["tail_slope"] = -free.exponent;
            summary["tail_window_start"] = t_lo;
            summary["tail_samples"] = free.samples;
            const PowerLawFit fixed =
                fit_power_law_tail(res.log_histogram, res.n_trajectories, t_lo, lomax->tail_exponent + 1.0);
            summary["tail_amplitude_fit"] = fixed.amplitude;
        } catch (const Error&) {
            summary["tail_slope"] = nullptr;
        }
        try {
            const PowerLawTail law = tail_asymptote(m.h, m.scheme, m.dist);
            summary["tail_amplitude_analytic"] = number(law.amplitude);
            summary["tail_exponent_analytic"] = law.exponent;
        } catch (const Error&) {
        }
    }
    summary["warnings"] = res.warnings;

    CommandOutput out;
    const double w = res.histogram.width();
    const double n = static_cast<double>(res.n_trajectories);
    if (cfg.format == "json") {
        Json hist;
        hist["bin_width"] = w;
        hist["counts"] = res.histogram.counts;
        Json doc;
        doc["summary"] = summary;
        doc["histogram"] = hist;
        out.primary = dump(doc);
    } else {
        out.primary = csv_row({"bin_lo", "bin_hi", "count", "density", "analytic_density"});
        for (std::size_t k = 0; k < res.histogram.counts.size(); ++k) {
            const double lo = res.histogram.lo + w * static_cast<double>(k);
            const auto c = res.histogram.counts[k];
            out.primary += csv_row({format_number(lo), format_number(lo + w), std::to_string(c),
                                    format_number(static_cast<double>(c) / (n * w)),
                                    std::isnan(analytic_density[k]) ? std::string() : format_number(analytic_density[k])});
        }
        out.summary = dump(summary);
    }
    for (const auto& warning : res.warnings)
        out.message += "warning: " + warning + "\n";
    if (std::isfinite(z) && std::abs(z) > 4.0) {
        out.exit_code = AcceptanceFailure;
        out.message += "simulated mean deviates from the analytic mean by z = " + format_number(z) + "\n";
    }
    return out;
}

CommandOutput cmd_asymptotics(const RunConfig& cfg)
{
    const Model m = build_model(cfg);
    Json doc = describe_model(cfg, m);
    doc["command"] = "asymptotics";
    const double c = small_t_coefficient(m.h, m.scheme, m.dist);
    doc["small_t_order"] = m.scheme == Scheme::One ? 2 : 0;
    doc["small_t_coefficient"] = c;
    if (m.scheme == Scheme::Two)
        doc["small_t_limit"] = c;

    if (m.exponential()) {
        doc["tail_form"] = "exponential";
        if (m.closed_form()) {
            doc["t_m"] = maximal_time(*m.jc);
            doc["tail_amplitude"] = tail_amplitude(*m.jc, m.scheme);
        } else if (sigma_squared(m.h) > 0.0) {
            const FirstDetectionStats st = stats_poisson(m.h, m.scheme, m.rate());
            doc["t_m"] = st.t_m;
            const RationalTransform rt = fdt_rational_poisson(m.h, m.scheme, m.rate());
            const auto res = rt.residues();
            std::size_t slow = 0;
            for (std::size_t i = 1; i < rt.poles().size(); ++i)
                if (rt.poles()[i].location.real() > rt.poles()[slow].location.real())
                    slow = i;
            const double scale = std::abs(rt.poles()[slow].location.imag()) > 1e-12 ? 2.0 : 1.0;
            doc["tail_amplitude"] = scale * std::abs(res[slow]);
        } else {
            doc["t_m"] = m.scheme == Scheme::Two ? Json(1.0 / m.rate()) : Json(nullptr);
            doc["tail_amplitude"] = m.scheme == Scheme::Two ? Json(m.rate()) : Json(0.0);
        }
    } else {
        try {
            const ProtocolTransforms pt(m.h, m.scheme, m.dist);
            const PowerLawTail law = tail_asymptote(pt);
            doc["tail_form"] = "power_law";
            doc["tail_amplitude"] = number(law.amplitude);
            doc["tail_exponent"] = law.exponent;
            if (m.scheme == Scheme::One)
                doc["V0"] = pt.V0();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotHeavyTailed)
                throw;
            doc["tail_form"] = nullptr;
            doc["tail_error"] = e.what();
        }
    }
    CommandOutput out;
    out.primary = dump(doc);
    return out;
}

CommandOutput cmd_optimal_rate(const RunConfig& cfg)
{
    const Model m = build_model(cfg);
    require_exponential(m, "optimal-rate");
    if (m.scheme == Scheme::Two)
        throw Error(ErrorCode::NoFiniteOptimum, "the scheme 2 mean 2/r decreases monotonically in r");
    const double sigma2 = sigma_squared(m.h);
    if (!(sigma2 > 0.0))
        throw Error(ErrorCode::NoFiniteOptimum, "the initial state is never detected");

    Json doc = describe_model(cfg, m);
    doc["command"] = "optimal-rate";

    std::function<double(double)> mean;
    std::function<double(double)> t_m;
    if (m.jc) {
        const JcSector base = *m.jc;
        mean = [base](double r) {
            JcSector s = base;
            s.r = r;
            return moments_scheme1(s).mean;
        };
        t_m = [base](double r) {
            JcSector s = base;
            s.r = r;
            return maximal_time(s);
        };
        const RateOptimum exact = optimal_rate(base);
        doc["r_star"] = exact.rate;
        doc["mean_at_r_star"] = exact.value;
        doc["variance_argmin"] = variance_argmin_scheme1(base);
    } else {
        mean = [h = m.h](double r) { return mean_fdt_poisson(h, Scheme::One, r); };
        t_m = [h = m.h](double r) { return stats_poisson(h, Scheme::One, r).t_m; };
    }

    const double scale = 2.0 * std::sqrt(sigma2);
    const Bracket b = find_bracket(mean, 1e-2 * scale);
    const MinimizeResult numeric = minimize_scalar(mean, b, 1e-10);
    doc["r_star_numeric"] = numeric.x;
    doc["mean_at_r_star_numeric"] = numeric.value;

    const Bracket bm = validate_unimodal(t_m, 1e-3 * scale, 1e3 * scale, 50);
    const MinimizeResult tm_opt = minimize_scalar(t_m, bm, 1e-10);
    doc["r_m_star"] = tm_opt.x;
    doc["t_m_at_r_m_star"] = tm_opt.value;

    CommandOutput out;
    out.primary = dump(doc);
    return out;
}

} // namespace qreset::cli
