#pragma once

// Trajectory Monte Carlo of the measurement protocol. Each trajectory starts
// in ψ_+, waits τ_k ~ p(τ) between measurements, evolves unitarily, and at
// every measurement is detected with probability |<ψ_int|ψ>|²; a failed
// measurement leaves the system in ψ_c.

#include "qreset/core.hpp"
#include "qreset/rng.hpp"
#include "qreset/waiting_time.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qreset {

struct TrajectoryConfig {
    TrajectoryConfig(TwoLevelHamiltonian h, Scheme s, WaitingTimeDistribution d)
        : hamiltonian(std::move(h)), scheme(s), dist(std::move(d))
    {}

    TwoLevelHamiltonian hamiltonian;
    Scheme scheme;
    WaitingTimeDistribution dist;
    std::uint64_t n_trajectories = 100000;
    /// Abort horizon; <= 0 selects default_cutoff().
    double t_cutoff = 0.0;
    std::uint64_t seed = 42;
    unsigned workers = 1;
    /// Uniform bins over [0, t_cutoff].
    std::size_t histogram_bins = 400;
    /// Logarithmic bins over [log_min, t_cutoff] for tail regression.
    double log_min = 1e-3;
    int log_bins_per_decade = 10;
    /// Times at which the number of measurements N(t) is tallied.
    std::vector<double> probe_times;
    /// Keep every detection time (trajectory order) in the result.
    bool keep_samples = false;
};

/// 50 x analytic mean when it is finite, otherwise 1e4 x the waiting-time scale.
double default_cutoff(const TrajectoryConfig& cfg);

struct TrajectoryOutcome {
    bool detected = false;
    /// Detection time, or the epoch that crossed the cutoff when censored.
    double time = 0.0;
    std::uint64_t measurements = 0;
};

/// One trajectory with the given generator; censored past cfg.t_cutoff (or
/// default_cutoff when unset).
TrajectoryOutcome sample_trajectory(const TrajectoryConfig& cfg, Philox4x32& rng);

struct UniformHistogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

struct LogHistogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    /// Detections earlier than edges.front().
    std::uint64_t underflow = 0;
};

/// counts[n] = number of trajectories with exactly n measurements in [0, time].
struct MeasurementCounts {
    double time = 0.0;
    std::vector<std::uint64_t> counts;
};

struct EmpiricalFirstDetection {
    std::uint64_t n_trajectories = 0;
    std::uint64_t n_detected = 0;
    std::uint64_t n_censored = 0;
    double t_cutoff = 0.0;
    /// Moments over detected trajectories.
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    UniformHistogram histogram;
    LogHistogram log_histogram;
    std::vector<MeasurementCounts> measurement_counts;
    std::vector<double> samples;
    std::vector<std::string> warnings;

    double censored_fraction() const;
    /// Fraction of trajectories recorded in the uniform histogram.
    double histogram_mass() const;
};

/// Parallel ensemble (OpenMP, cfg.workers threads). Trajectories are processed
/// in fixed blocks merged in index order, so the result does not depend on
/// the worker count or scheduling.
EmpiricalFirstDetection run_ensemble(const TrajectoryConfig& cfg);

/// Single-threaded reference with one running accumulator.
EmpiricalFirstDetection run_ensemble_serial(const TrajectoryConfig& cfg);

/// Ŝ(t) = Prob[t_detect >= t] from kept samples; grid must lie in [0, t_cutoff].
std::vector<double> survival_estimate(const EmpiricalFirstDetection& result, std::span<const double> grid);
std::vector<double> survival_estimate(const TrajectoryConfig& cfg, std::span<const double> grid);

struct WeightedEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Variance-reduced survival: samples only the measurement epochs and weights
/// each path by f(τ_1) Π_k g(τ_k) over the measurements made before t.
WeightedEstimate weighted_survival_check(const TrajectoryConfig& cfg, double t);

/// Laplace-domain estimate E[e^{-s t_detect}] (censored paths contribute 0).
WeightedEstimate laplace_estimate(const EmpiricalFirstDetection& result, double s);

} // namespace qreset
