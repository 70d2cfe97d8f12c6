#pragma once

// Inter-measurement waiting-time densities p(tau) of a renewal measurement
// protocol. Exponential waits give the Poissonian protocol.

#include "qreset/core.hpp"

#include <optional>
#include <random>
#include <string>
#include <variant>

namespace qreset {

/// p(tau) = r exp(-r tau)
struct Exponential {
    double rate = 1.0;
};

/// p(tau) = tau^{k-1} exp(-tau/theta) / (Gamma(k) theta^k)
struct Gamma {
    double shape = 1.0;
    double scale = 1.0;
};

/// p(tau) = (mu/tau0) (1 + tau/tau0)^{-(mu+1)}; p(0) = mu/tau0 and the tail
/// behaves as A tau^{-(mu+1)} with A = mu tau0^mu.
struct Lomax {
    double tail_exponent = 2.5;
    double scale = 1.0;
};

using WaitingTimeDistribution = std::variant<Exponential, Gamma, Lomax>;

/// Validating constructors (InvalidArgument unless every parameter is > 0).
WaitingTimeDistribution make_exponential(double rate);
WaitingTimeDistribution make_gamma(double shape, double scale);
WaitingTimeDistribution make_lomax(double tail_exponent, double scale);

std::string describe(const WaitingTimeDistribution& dist);

/// p(tau). NegativeTime for tau < 0.
double waiting_time_density(const WaitingTimeDistribution& dist, double tau);

/// q(tau) = integral of p over [tau, inf). NegativeTime for tau < 0.
double waiting_time_survival(const WaitingTimeDistribution& dist, double tau);

/// p(0+); +inf for Gamma with shape < 1.
double density_at_zero(const WaitingTimeDistribution& dist);

/// <tau>; InfiniteMean for Lomax with tail exponent <= 1.
double waiting_time_mean(const WaitingTimeDistribution& dist);

/// <tau^2>, or +inf when it diverges.
double waiting_time_second_moment(const WaitingTimeDistribution& dist);

/// p~(s) for real s inside the convergence region of the Laplace integral
/// (s > -r, s > -1/theta, s >= 0 respectively); DivergentTransform otherwise.
double waiting_time_laplace(const WaitingTimeDistribution& dist, double s);

/// Analytic continuation of p~(s) to the complex plane cut along the
/// distribution's singular half-line. DivergentTransform on the cut.
Complex waiting_time_laplace(const WaitingTimeDistribution& dist, Complex s);

/// q~(s) = (1 - p~(s)) / s, with the s -> 0 limit <tau>.
double waiting_time_survival_laplace(const WaitingTimeDistribution& dist, double s);

/// Integral of p(tau) exp(-s tau) over [T, inf), Re(s) >= 0.
Complex waiting_time_tail_transform(const WaitingTimeDistribution& dist, double horizon, Complex s);

/// Power-law tail p(tau) ~ amplitude * tau^{-(exponent+1)}.
struct PowerLawTail {
    double amplitude = 0.0;
    double exponent = 0.0;
};

/// Set only for heavy-tailed families (Lomax).
std::optional<PowerLawTail> power_law_tail(const WaitingTimeDistribution& dist);

/// Draws one waiting time. `uniform` must return values in (0, 1]; `engine`
/// is a uniform random bit generator used by the Gamma sampler.
template <class Uniform, class Engine>
double sample_waiting_time(const WaitingTimeDistribution& dist, Uniform&& uniform, Engine& engine)
{
    struct Visitor {
        Uniform& uniform;
        Engine& engine;
        double operator()(const Exponential& e) const { return -std::log(uniform()) / e.rate; }
        double operator()(const Gamma& g) const
        {
            std::gamma_distribution<double> d(g.shape, g.scale);
            return d(engine);
        }
        double operator()(const Lomax& l) const
        {
            return l.scale * (std::pow(uniform(), -1.0 / l.tail_exponent) - 1.0);
        }
    };
    return std::visit(Visitor{uniform, engine}, dist);
}

} // namespace qreset
