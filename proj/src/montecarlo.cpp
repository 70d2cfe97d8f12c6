#include "qreset/montecarlo.hpp"

#include "qreset/error.hpp"
#include "qreset/twolevel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <locale>
#include <sstream>

namespace qreset {

namespace {

constexpr std::uint64_t kBlock = 4096;
constexpr std::uint64_t kWeightedStreamFlag = std::uint64_t{1} << 63;

std::optional<double> analytic_mean(const TrajectoryConfig& cfg)
{
    try {
        double m = 0.0;
        if (const auto* e = std::get_if<Exponential>(&cfg.dist))
            m = mean_fdt_poisson(cfg.hamiltonian, cfg.scheme, e->rate);
        else
            m = mean_fdt_renewal(cfg.hamiltonian, cfg.scheme, cfg.dist);
        if (std::isfinite(m))
            return m;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InfiniteMean)
            throw;
    }
    return std::nullopt;
}

double waiting_scale(const WaitingTimeDistribution& dist)
{
    if (const auto* e = std::get_if<Exponential>(&dist))
        return 1.0 / e->rate;
    if (const auto* g = std::get_if<Gamma>(&dist))
        return g->shape * g->scale;
    return std::get<Lomax>(dist).scale;
}

void validate(const TrajectoryConfig& cfg)
{
    if (cfg.n_trajectories < 1)
        throw Error(ErrorCode::InvalidArgument, "need at least one trajectory");
    if (cfg.histogram_bins < 1 || cfg.log_bins_per_decade < 1 || !(cfg.log_min > 0.0))
        throw Error(ErrorCode::InvalidArgument, "histogram settings must be positive");
    if (!std::isfinite(cfg.t_cutoff))
        throw Error(ErrorCode::InvalidArgument, "cutoff must be finite");
    for (double p : cfg.probe_times)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw Error(ErrorCode::InvalidArgument, "probe times must be finite and >= 0");
}

struct Geometry {
    double cutoff = 0.0;
    std::size_t bins = 0;
    std::vector<double> log_edges;
    std::vector<double> probes;
    double max_probe = -1.0;
    bool keep_samples = false;

    explicit Geometry(const TrajectoryConfig& cfg)
    {
        validate(cfg);
        cutoff = cfg.t_cutoff > 0.0 ? cfg.t_cutoff : default_cutoff(cfg);
        bins = cfg.histogram_bins;
        const double step = std::pow(10.0, 1.0 / cfg.log_bins_per_decade);
        log_edges.push_back(cfg.log_min);
        while (log_edges.back() < cutoff)
            log_edges.push_back(log_edges.back() * step);
        probes = cfg.probe_times;
        for (double p : probes)
            max_probe = std::max(max_probe, p);
        keep_samples = cfg.keep_samples;
    }
};

struct Accumulator {
    std::uint64_t n = 0;
    std::uint64_t detected = 0;
    std::uint64_t censored = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::vector<std::uint64_t> hist;
    std::vector<std::uint64_t> log_hist;
    std::uint64_t underflow = 0;
    std::vector<std::vector<std::uint64_t>> probe_counts;
    std::vector<double> samples;

    explicit Accumulator(const Geometry& g)
        : hist(g.bins, 0), log_hist(g.log_edges.size() - 1, 0), probe_counts(g.probes.size())
    {}

    void add(const Geometry& g, const TrajectoryOutcome& o, const std::vector<std::uint64_t>& n_at_probe)
    {
        ++n;
        for (std::size_t i = 0; i < n_at_probe.size(); ++i) {
            auto& c = probe_counts[i];
            if (c.size() <= n_at_probe[i])
                c.resize(n_at_probe[i] + 1, 0);
            ++c[n_at_probe[i]];
        }
        if (!o.detected) {
            ++censored;
            return;
        }
        ++detected;
        const double delta = o.time - mean;
        mean += delta / static_cast<double>(detected);
        m2 += delta * (o.time - mean);

        const auto bin = static_cast<std::size_t>(o.time / g.cutoff * static_cast<double>(g.bins));
        ++hist[std::min(bin, g.bins - 1)];
        if (o.time < g.log_edges.front()) {
            ++underflow;
        } else {
            auto it = std::upper_bound(g.log_edges.begin(), g.log_edges.end(), o.time);
            const auto k = static_cast<std::size_t>(it - g.log_edges.begin()) - 1;
            ++log_hist[std::min(k, log_hist.size() - 1)];
        }
        if (g.keep_samples)
            samples.push_back(o.time);
    }

    void merge(const Accumulator& b)
    {
        if (b.detected > 0) {
            const double na = static_cast<double>(detected);
            const double nb = static_cast<double>(b.detected);
            const double delta = b.mean - mean;
            const double tot = na + nb;
            mean += delta * nb / tot;
            m2 += b.m2 + delta * delta * na * nb / tot;
        }
        n += b.n;
        detected += b.detected;
        censored += b.censored;
        underflow += b.underflow;
        for (std::size_t i = 0; i < hist.size(); ++i)
            hist[i] += b.hist[i];
        for (std::size_t i = 0; i < log_hist.size(); ++i)
            log_hist[i] += b.log_hist[i];
        for (std::size_t i = 0; i < probe_counts.size(); ++i) {
            auto& c = probe_counts[i];
            if (c.size() < b.probe_counts[i].size())
                c.resize(b.probe_counts[i].size(), 0);
            for (std::size_t k = 0; k < b.probe_counts[i].size(); ++k)
                c[k] += b.probe_counts[i][k];
        }
        samples.insert(samples.end(), b.samples.begin(), b.samples.end());
    }
};

class TrajectorySimulator {
public:
    TrajectorySimulator(const TrajectoryConfig& cfg, double cutoff)
        : cfg_(cfg), cutoff_(cutoff), interest_(interest_state(cfg.scheme)), complement_(complement_state(cfg.scheme))
    {}

    double draw_wait(Philox4x32& rng) const
    {
        return sample_waiting_time(cfg_.dist, [&rng] { return rng.uniform(); }, rng);
    }

    // Runs to detection or censoring; epoch times up to max_probe are appended to `epochs`.
    TrajectoryOutcome run(Philox4x32& rng, double max_probe, std::vector<double>* epochs) const
    {
        PureState psi = PureState::plus();
        double t = 0.0;
        TrajectoryOutcome out;
        for (;;) {
            const double tau = draw_wait(rng);
            if (t + tau > cutoff_) {
                out.time = t + tau;
                if (epochs && out.time <= max_probe)
                    epochs->push_back(out.time);
                break;
            }
            t += tau;
            ++out.measurements;
            if (epochs && t <= max_probe)
                epochs->push_back(t);
            psi = evolve(cfg_.hamiltonian, psi, tau);
            const double p = std::norm(inner(interest_, psi));
            if (rng.uniform() <= p) {
                out.detected = true;
                out.time = t;
                return out;
            }
            psi = complement_;
        }
        return out;
    }

private:
    const TrajectoryConfig& cfg_;
    double cutoff_;
    PureState interest_;
    PureState complement_;
};

// Simulates trajectory `index` and records it.
void simulate_into(const TrajectoryConfig& cfg, const Geometry& g, const TrajectorySimulator& sim,
                   std::uint64_t index, Accumulator& acc, std::vector<double>& epochs,
                   std::vector<std::uint64_t>& n_at_probe)
{
    Philox4x32 rng(cfg.seed, index);
    const bool probing = !g.probes.empty();
    epochs.clear();
    const TrajectoryOutcome o = sim.run(rng, g.max_probe, probing ? &epochs : nullptr);
    if (probing) {
        // The protocol keeps running after detection; extend it to the last probe.
        double t = epochs.empty() ? 0.0 : epochs.back();
        if (o.time > t)
            t = o.time;
        while (t <= g.max_probe) {
            t += sim.draw_wait(rng);
            if (t <= g.max_probe)
                epochs.push_back(t);
        }
        for (std::size_t i = 0; i < g.probes.size(); ++i)
            n_at_probe[i] = static_cast<std::uint64_t>(
                std::upper_bound(epochs.begin(), epochs.end(), g.probes[i]) - epochs.begin());
    }
    acc.add(g, o, n_at_probe);
}

EmpiricalFirstDetection finish(const TrajectoryConfig& cfg, const Geometry& g, Accumulator&& acc)
{
    EmpiricalFirstDetection r;
    r.n_trajectories = acc.n;
    r.n_detected = acc.detected;
    r.n_censored = acc.censored;
    r.t_cutoff = g.cutoff;
    r.mean = acc.detected > 0 ? acc.mean : std::numeric_limits<double>::quiet_NaN();
    r.variance = acc.detected > 1 ? acc.m2 / static_cast<double>(acc.detected - 1)
                                  : std::numeric_limits<double>::quiet_NaN();
    r.mean_se = acc.detected > 1 ? std::sqrt(r.variance / static_cast<double>(acc.detected))
                                 : std::numeric_limits<double>::quiet_NaN();
    r.histogram = {0.0, g.cutoff, std::move(acc.hist)};
    r.log_histogram = {g.log_edges, std::move(acc.log_hist), acc.underflow};
    for (std::size_t i = 0; i < g.probes.size(); ++i)
        r.measurement_counts.push_back({g.probes[i], std::move(acc.probe_counts[i])});
    r.samples = std::move(acc.samples);

    if (r.censored_fraction() > 1e-3 && analytic_mean(cfg)) {
        std::ostringstream msg;
        msg.imbue(std::locale::classic());
        msg << "CutoffTooSmall: censored fraction " << r.censored_fraction() << " exceeds 1e-3 at t_cutoff = "
            << g.cutoff;
        r.warnings.push_back(msg.str());
    }
    return r;
}

template <class Body>
void parallel_blocks(std::uint64_t blocks, unsigned workers, Body&& body)
{
    std::exception_ptr failure;
    const auto n = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1u, workers))
    for (std::int64_t b = 0; b < n; ++b) {
        try {
            body(static_cast<std::uint64_t>(b));
        } catch (...) {
#pragma omp critical(qreset_mc_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace

double default_cutoff(const TrajectoryConfig& cfg)
{
    if (const auto m = analytic_mean(cfg))
        return 50.0 * *m;
    return 1e4 * waiting_scale(cfg.dist);
}

TrajectoryOutcome sample_trajectory(const TrajectoryConfig& cfg, Philox4x32& rng)
{
    const double cutoff = cfg.t_cutoff > 0.0 ? cfg.t_cutoff : default_cutoff(cfg);
    return TrajectorySimulator(cfg, cutoff).run(rng, -1.0, nullptr);
}

double EmpiricalFirstDetection::censored_fraction() const
{
    return n_trajectories ? static_cast<double>(n_censored) / static_cast<double>(n_trajectories) : 0.0;
}

double EmpiricalFirstDetection::histogram_mass() const
{
    std::uint64_t total = 0;
    for (auto c : histogram.counts)
        total += c;
    return n_trajectories ? static_cast<double>(total) / static_cast<double>(n_trajectories) : 0.0;
}

EmpiricalFirstDetection run_ensemble(const TrajectoryConfig& cfg)
{
    const Geometry g(cfg);
    const TrajectorySimulator sim(cfg, g.cutoff);
    const std::uint64_t blocks = (cfg.n_trajectories + kBlock - 1) / kBlock;
    std::vector<Accumulator> parts(blocks, Accumulator(g));
    parallel_blocks(blocks, cfg.workers, [&](std::uint64_t b) {
        std::vector<double> epochs;
        std::vector<std::uint64_t> n_at_probe(g.probes.size(), 0);
        const std::uint64_t end = std::min(cfg.n_trajectories, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < end; ++i)
            simulate_into(cfg, g, sim, i, parts[b], epochs, n_at_probe);
    });
    Accumulator total(g);
    for (const auto& p : parts)
        total.merge(p);
    return finish(cfg, g, std::move(total));
}

EmpiricalFirstDetection run_ensemble_serial(const TrajectoryConfig& cfg)
{
    const Geometry g(cfg);
    const TrajectorySimulator sim(cfg, g.cutoff);
    Accumulator acc(g);
    std::vector<double> epochs;
    std::vector<std::uint64_t> n_at_probe(g.probes.size(), 0);
    for (std::uint64_t i = 0; i < cfg.n_trajectories; ++i)
        simulate_into(cfg, g, sim, i, acc, epochs, n_at_probe);
    return finish(cfg, g, std::move(acc));
}

std::vector<double> survival_estimate(const EmpiricalFirstDetection& result, std::span<const double> grid)
{
    if (result.samples.size() != result.n_detected)
        throw Error(ErrorCode::InvalidArgument, "survival estimate needs an ensemble run with keep_samples");
    std::vector<double> sorted = result.samples;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(result.n_trajectories);
    for (double t : grid) {
        if (!(t >= 0.0) || t > result.t_cutoff)
            throw Error(ErrorCode::InvalidArgument, "survival grid must lie in [0, t_cutoff]");
        const auto alive = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t);
        out.push_back((static_cast<double>(alive) + static_cast<double>(result.n_censored)) / n);
    }
    return out;
}

std::vector<double> survival_estimate(const TrajectoryConfig& cfg, std::span<const double> grid)
{
    TrajectoryConfig c = cfg;
    c.keep_samples = true;
    return survival_estimate(run_ensemble(c), grid);
}

WeightedEstimate weighted_survival_check(const TrajectoryConfig& cfg, double t)
{
    validate(cfg);
    if (!(t >= 0.0))
        throw Error(ErrorCode::NegativeTime, "survival time must be >= 0");
    const std::uint64_t blocks = (cfg.n_trajectories + kBlock - 1) / kBlock;
    struct Part {
        double sum = 0.0;
        double sum2 = 0.0;
    };
    std::vector<Part> parts(blocks);
    parallel_blocks(blocks, cfg.workers, [&](std::uint64_t b) {
        const std::uint64_t end = std::min(cfg.n_trajectories, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < end; ++i) {
            Philox4x32 rng(cfg.seed, i | kWeightedStreamFlag);
            double elapsed = 0.0;
            double weight = 1.0;
            bool first = true;
            for (;;) {
                const double tau = sample_waiting_time(cfg.dist, [&rng] { return rng.uniform(); }, rng);
                if (elapsed + tau > t)
                    break;
                elapsed += tau;
                weight *= first ? f_of_tau(cfg.hamiltonian, cfg.scheme, tau)
                                : g_of_tau(cfg.hamiltonian, cfg.scheme, tau);
                first = false;
                if (weight == 0.0)
                    break;
            }
            parts[b].sum += weight;
            parts[b].sum2 += weight * weight;
        }
    });
    double sum = 0.0;
    double sum2 = 0.0;
    for (const auto& p : parts) {
        sum += p.sum;
        sum2 += p.sum2;
    }
    const double n = static_cast<double>(cfg.n_trajectories);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

WeightedEstimate laplace_estimate(const EmpiricalFirstDetection& result, double s)
{
    if (result.samples.size() != result.n_detected)
        throw Error(ErrorCode::InvalidArgument, "Laplace estimate needs an ensemble run with keep_samples");
    if (!(s >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "Laplace variable must be >= 0");
    double sum = 0.0;
    double sum2 = 0.0;
    for (double t : result.samples) {
        const double v = std::exp(-s * t);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(result.n_trajectories);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

} // namespace qreset
