#include "qreset/waiting_time.hpp"

#include "qreset/error.hpp"
#include "qreset/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace qreset {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite and > 0");
}

void require_nonnegative_time(double tau)
{
    if (tau < 0.0 || std::isnan(tau))
        throw Error(ErrorCode::NegativeTime, "waiting time must be >= 0");
}

// Inverse survival of the Lomax law: tau(u) with q(tau(u)) = u.
double lomax_time_at_survival(const Lomax& l, double u)
{
    return l.scale * std::expm1(-std::log(u) / l.tail_exponent);
}

Complex lomax_density(const Lomax& l, Complex tau)
{
    return (l.tail_exponent / l.scale) *
        std::exp(-(l.tail_exponent + 1.0) * std::log(1.0 + tau / l.scale));
}

// Integral over [0, q_end] of exp(-s tau(u)) du; with q_end = 1 this is the
// Laplace transform itself. Valid for Re(s) >= 0.
Complex lomax_survival_space_transform(const Lomax& l, Complex s, double q_end)
{
    if (s == Complex{0.0, 0.0})
        return q_end;
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.initial_intervals = 8;
    auto f = [&](double u) -> Complex {
        if (u <= 0.0)
            return 0.0;
        return std::exp(-s * lomax_time_at_survival(l, u));
    };
    return integrate(f, 0.0, q_end, opt).value;
}

// Analytic continuation by rotating the integration ray tau = x e^{i phi} so
// that s e^{i phi} has positive real part.
Complex lomax_rotated_transform(const Lomax& l, Complex s)
{
    const double alpha = std::arg(s);
    constexpr double max_rotation = 0.75 * std::numbers::pi;
    const double phi = -std::copysign(std::min(std::abs(alpha), max_rotation), alpha);
    const Complex dir = std::polar(1.0, phi);
    const double length = 1.0 / (std::abs(s) + 1.0 / l.scale);
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.initial_intervals = 8;
    auto f = [&](double v) -> Complex {
        if (v >= 1.0)
            return 0.0;
        const double x = length * v / (1.0 - v);
        const double jac = length / ((1.0 - v) * (1.0 - v));
        const Complex tau = x * dir;
        return lomax_density(l, tau) * std::exp(-s * tau) * jac;
    };
    return dir * integrate(f, 0.0, 1.0, opt).value;
}

} // namespace

WaitingTimeDistribution make_exponential(double rate)
{
    require_positive(rate, "exponential rate");
    return Exponential{rate};
}

WaitingTimeDistribution make_gamma(double shape, double scale)
{
    require_positive(shape, "gamma shape");
    require_positive(scale, "gamma scale");
    return Gamma{shape, scale};
}

WaitingTimeDistribution make_lomax(double tail_exponent, double scale)
{
    require_positive(tail_exponent, "lomax tail exponent");
    require_positive(scale, "lomax scale");
    return Lomax{tail_exponent, scale};
}

std::string describe(const WaitingTimeDistribution& dist)
{
    auto num = [](double x) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    };
    return std::visit(Overloaded{
                          [&](const Exponential& e) { return "exponential(r=" + num(e.rate) + ")"; },
                          [&](const Gamma& g) { return "gamma(k=" + num(g.shape) + ", theta=" + num(g.scale) + ")"; },
                          [&](const Lomax& l) { return "lomax(mu=" + num(l.tail_exponent) + ", tau0=" + num(l.scale) + ")"; },
                      },
                      dist);
}

double waiting_time_density(const WaitingTimeDistribution& dist, double tau)
{
    require_nonnegative_time(tau);
    return std::visit(
        Overloaded{
            [&](const Exponential& e) { return e.rate * std::exp(-e.rate * tau); },
            [&](const Gamma& g) {
                if (tau == 0.0)
                    return density_at_zero(dist);
                return std::exp((g.shape - 1.0) * std::log(tau) - tau / g.scale -
                                std::lgamma(g.shape) - g.shape * std::log(g.scale));
            },
            [&](const Lomax& l) {
                return (l.tail_exponent / l.scale) *
                    std::pow(1.0 + tau / l.scale, -(l.tail_exponent + 1.0));
            },
        },
        dist);
}

double waiting_time_survival(const WaitingTimeDistribution& dist, double tau)
{
    require_nonnegative_time(tau);
    return std::visit(Overloaded{
                          [&](const Exponential& e) { return std::exp(-e.rate * tau); },
                          [&](const Gamma& g) { return boost::math::gamma_q(g.shape, tau / g.scale); },
                          [&](const Lomax& l) {
                              return std::pow(1.0 + tau / l.scale, -l.tail_exponent);
                          },
                      },
                      dist);
}

double density_at_zero(const WaitingTimeDistribution& dist)
{
    return std::visit(Overloaded{
                          [](const Exponential& e) { return e.rate; },
                          [](const Gamma& g) {
                              if (g.shape < 1.0)
                                  return std::numeric_limits<double>::infinity();
                              return g.shape == 1.0 ? 1.0 / g.scale : 0.0;
                          },
                          [](const Lomax& l) { return l.tail_exponent / l.scale; },
                      },
                      dist);
}

double waiting_time_mean(const WaitingTimeDistribution& dist)
{
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const Gamma& g) { return g.shape * g.scale; },
                          [](const Lomax& l) {
                              if (l.tail_exponent <= 1.0)
                                  throw Error(ErrorCode::InfiniteMean,
                                              "Lomax waiting time with tail exponent <= 1");
                              return l.scale / (l.tail_exponent - 1.0);
                          },
                      },
                      dist);
}

double waiting_time_second_moment(const WaitingTimeDistribution& dist)
{
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 2.0 / (e.rate * e.rate); },
                          [](const Gamma& g) { return g.shape * (g.shape + 1.0) * g.scale * g.scale; },
                          [](const Lomax& l) {
                              const double m = l.tail_exponent;
                              if (m <= 2.0)
                                  return std::numeric_limits<double>::infinity();
                              return 2.0 * l.scale * l.scale / ((m - 1.0) * (m - 2.0));
                          },
                      },
                      dist);
}

double waiting_time_laplace(const WaitingTimeDistribution& dist, double s)
{
    if (std::isnan(s))
        throw Error(ErrorCode::InvalidArgument, "Laplace variable is NaN");
    return std::visit(
        Overloaded{
            [&](const Exponential& e) {
                if (!(s > -e.rate))
                    throw Error(ErrorCode::DivergentTransform, "exponential transform needs s > -r");
                return e.rate / (e.rate + s);
            },
            [&](const Gamma& g) {
                if (!(s > -1.0 / g.scale))
                    throw Error(ErrorCode::DivergentTransform, "gamma transform needs s > -1/theta");
                return std::pow(1.0 + g.scale * s, -g.shape);
            },
            [&](const Lomax& l) {
                if (s < 0.0)
                    throw Error(ErrorCode::DivergentTransform, "power-law transform needs s >= 0");
                return lomax_survival_space_transform(l, s, 1.0).real();
            },
        },
        dist);
}

Complex waiting_time_laplace(const WaitingTimeDistribution& dist, Complex s)
{
    if (s.imag() == 0.0) {
        // On the real axis, defer to the real evaluator wherever it converges.
        const bool inside = std::visit(Overloaded{
                                           [&](const Exponential& e) { return s.real() > -e.rate; },
                                           [&](const Gamma& g) { return s.real() > -1.0 / g.scale; },
                                           [&](const Lomax&) { return s.real() >= 0.0; },
                                       },
                                       dist);
        if (inside)
            return waiting_time_laplace(dist, s.real());
    }
    return std::visit(
        Overloaded{
            [&](const Exponential& e) -> Complex {
                if (s == Complex{-e.rate, 0.0})
                    throw Error(ErrorCode::DivergentTransform, "pole of the exponential transform");
                return e.rate / (e.rate + s);
            },
            [&](const Gamma& g) -> Complex {
                const Complex base = 1.0 + g.scale * s;
                if (base.imag() == 0.0 && base.real() <= 0.0)
                    throw Error(ErrorCode::DivergentTransform, "gamma transform branch cut");
                return std::exp(-g.shape * std::log(base));
            },
            [&](const Lomax& l) -> Complex {
                if (s == Complex{0.0, 0.0})
                    return 1.0;
                if (s.imag() == 0.0 && s.real() < 0.0)
                    throw Error(ErrorCode::DivergentTransform, "power-law transform branch cut");
                // The survival-space integrand only decays fast enough when
                // damping dominates oscillation.
                if (s.real() >= std::abs(s.imag()))
                    return lomax_survival_space_transform(l, s, 1.0);
                return lomax_rotated_transform(l, s);
            },
        },
        dist);
}

double waiting_time_survival_laplace(const WaitingTimeDistribution& dist, double s)
{
    if (s == 0.0)
        return waiting_time_mean(dist);
    return (1.0 - waiting_time_laplace(dist, s)) / s;
}

Complex waiting_time_tail_transform(const WaitingTimeDistribution& dist, double horizon, Complex s)
{
    require_nonnegative_time(horizon);
    if (s.real() < 0.0)
        throw Error(ErrorCode::DivergentTransform, "tail transform needs Re(s) >= 0");
    return std::visit(
        Overloaded{
            [&](const Exponential& e) -> Complex {
                return e.rate * std::exp(-(e.rate + s) * horizon) / (e.rate + s);
            },
            [&](const Gamma& g) -> Complex {
                // Light tail: integrate out to where the density is negligible.
                const double span = 60.0 * g.scale * std::max(1.0, g.shape);
                QuadratureOptions opt;
                opt.abs_tol = 1e-17;
                opt.rel_tol = 1e-12;
                opt.initial_intervals = 4;
                auto f = [&](double x) -> Complex {
                    const double tau = horizon + x;
                    if (tau == 0.0)
                        return 0.0;
                    return waiting_time_density(dist, tau) * std::exp(-s * tau);
                };
                return integrate(f, 0.0, span, opt).value;
            },
            [&](const Lomax& l) -> Complex {
                const double q_end = std::pow(1.0 + horizon / l.scale, -l.tail_exponent);
                return lomax_survival_space_transform(l, s, q_end);
            },
        },
        dist);
}

std::optional<PowerLawTail> power_law_tail(const WaitingTimeDistribution& dist)
{
    if (const auto* l = std::get_if<Lomax>(&dist))
        return PowerLawTail{l->tail_exponent * std::pow(l->scale, l->tail_exponent), l->tail_exponent};
    return std::nullopt;
}

} // namespace qreset
