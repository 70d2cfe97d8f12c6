#include "qreset/twolevel.hpp"

#include "qreset/error.hpp"
#include "qreset/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qreset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The Poissonian transforms are rational in x = r + s. With δ = H_00 - H_11,
// σ² = |H_01|² and Δ² = δ² + 4σ², the common cubic is
//   C(x) = x³ - r x² + Δ² x - r(δ² + 2σ²).
struct PoissonCoefficients {
    double r;
    double delta2; // δ²
    double sigma2; // σ²
    double gap2;   // Δ²

    explicit PoissonCoefficients(const TwoLevelHamiltonian& h, double r_) : r(r_)
    {
        if (!(r > 0.0) || !std::isfinite(r))
            throw Error(ErrorCode::InvalidArgument, "measurement rate must be finite and > 0");
        const double d = (h.entry(0, 0) - h.entry(1, 1)).real();
        delta2 = d * d;
        sigma2 = std::norm(h.entry(0, 1));
        gap2 = delta2 + 4.0 * sigma2;
    }

    bool decoupled() const { return sigma2 == 0.0; }

    template <class T>
    T cubic(T x) const
    {
        return ((x - r) * x + gap2) * x - r * (delta2 + 2.0 * sigma2);
    }

    Polynomial cubic_poly() const { return Polynomial({-r * (delta2 + 2.0 * sigma2), gap2, -r, 1.0}); }

    // 1 - r g~(x) = C(x) / (x (x² + Δ²))
    template <class T>
    T one_minus_rg(T x) const
    {
        return cubic(x) / (x * (x * x + gap2));
    }
};

template <class T>
T fdt_poisson_impl(const PoissonCoefficients& k, Scheme scheme, T s)
{
    const T x = k.r + s;
    if (k.decoupled())
        return scheme == Scheme::One ? T{0.0} : T{k.r} / x;
    if (std::abs(k.one_minus_rg(x)) < 1e-14)
        throw Error(ErrorCode::PoleHit, "1 - r g~(r+s) vanishes");
    if (scheme == Scheme::One)
        return 2.0 * k.r * k.sigma2 / k.cubic(x);
    const T n2 = ((x - k.r) * x + (k.delta2 + 2.0 * k.sigma2)) * x - k.r * k.delta2;
    return k.r * n2 / (x * k.cubic(x));
}

template <class T>
T survival_poisson_impl(const PoissonCoefficients& k, Scheme scheme, T s)
{
    const T x = k.r + s;
    if (k.decoupled()) {
        if (scheme == Scheme::Two)
            return T{1.0} / x;
        if (std::abs(s) == 0.0)
            throw Error(ErrorCode::PoleHit, "survival transform of an undetectable state at s = 0");
        return T{1.0} / s;
    }
    if (std::abs(k.one_minus_rg(x)) < 1e-14)
        throw Error(ErrorCode::PoleHit, "1 - r g~(r+s) vanishes");
    const T c = k.cubic(x);
    if (scheme == Scheme::One)
        return (x * x + k.gap2) / c;
    return (c + 2.0 * k.r * k.sigma2) / (x * c);
}

void require_positive_s(double s)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw Error(ErrorCode::DivergentTransform, "Laplace variable must be finite and > 0");
}

std::size_t oscillation_panels(double frequency, double horizon)
{
    const double n = std::ceil(std::abs(frequency) * horizon / std::numbers::pi);
    return static_cast<std::size_t>(std::clamp(n, 16.0, 200000.0));
}

double jc_coupling_squared(const JcParameters& p)
{
    return p.g * p.g * static_cast<double>(p.n);
}

} // namespace

PureState evolve(const TwoLevelHamiltonian& h, const PureState& psi, double tau)
{
    std::array<Complex, 2> out{};
    for (std::size_t k = 0; k < 2; ++k) {
        const PureState& e = h.eigenvector(k);
        const Complex c = inner(e, psi) * std::polar(1.0, -h.eigenvalues()[k] * tau);
        out[0] += c * e[0];
        out[1] += c * e[1];
    }
    return PureState::from_amplitudes(out);
}

double f_of_tau(const TwoLevelHamiltonian& h, Scheme scheme, double tau)
{
    // <ψ_+|e^{iHτ}|ψ_c> = conj(<ψ_c|e^{-iHτ}|ψ_+>)
    return std::norm(inner(complement_state(scheme), evolve(h, PureState::plus(), tau)));
}

double g_of_tau(const TwoLevelHamiltonian& h, Scheme scheme, double tau)
{
    const PureState c = complement_state(scheme);
    return std::norm(inner(c, evolve(h, c, tau)));
}

double OverlapSeries::operator()(double tau) const
{
    return mean + (amplitude * std::polar(1.0, frequency * tau)).real();
}

Complex OverlapSeries::laplace(Complex s) const
{
    const Complex iw{0.0, frequency};
    return mean / s + 0.5 * amplitude / (s - iw) + 0.5 * std::conj(amplitude) / (s + iw);
}

Complex OverlapSeries::weighted_laplace(const WaitingTimeDistribution& dist, Complex s) const
{
    if (frequency == 0.0 || amplitude == Complex{})
        return (mean + amplitude.real()) * waiting_time_laplace(dist, s);
    const Complex iw{0.0, frequency};
    return mean * waiting_time_laplace(dist, s) + 0.5 * amplitude * waiting_time_laplace(dist, s - iw) +
        0.5 * std::conj(amplitude) * waiting_time_laplace(dist, s + iw);
}

namespace {

// |<a|e^{iHτ}|b>|² = |c0 e^{iE+τ} + c1 e^{iE-τ}|² with c_k = <a|E_k><E_k|b>.
OverlapSeries overlap_series(const TwoLevelHamiltonian& h, const PureState& a, const PureState& b)
{
    const Complex c0 = inner(a, h.eigenvector(0)) * inner(h.eigenvector(0), b);
    const Complex c1 = inner(a, h.eigenvector(1)) * inner(h.eigenvector(1), b);
    return {std::norm(c0) + std::norm(c1), 2.0 * c0 * std::conj(c1), h.gap()};
}

} // namespace

OverlapSeries f_series(const TwoLevelHamiltonian& h, Scheme scheme)
{
    return overlap_series(h, PureState::plus(), complement_state(scheme));
}

OverlapSeries g_series(const TwoLevelHamiltonian& h, Scheme scheme)
{
    const PureState c = complement_state(scheme);
    return overlap_series(h, c, c);
}

double sigma_squared(const TwoLevelHamiltonian& h)
{
    return std::norm(h.entry(0, 1));
}

double g_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double s)
{
    require_positive_s(s);
    if (h.jc()) {
        const double a2 = jc_coupling_squared(*h.jc());
        return (2.0 * a2 + s * s) / (s * (4.0 * a2 + s * s));
    }
    ForwardTransformOptions opt;
    opt.rel_tol = 1e-11;
    opt.initial_intervals = oscillation_panels(h.gap(), 40.0 / s);
    return forward_transform([&](double tau) { return g_of_tau(h, scheme, tau); }, s, opt);
}

double f_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double s)
{
    if (scheme == Scheme::One)
        return g_laplace_poisson(h, scheme, s);
    require_positive_s(s);
    if (h.jc()) {
        const double a2 = jc_coupling_squared(*h.jc());
        return 2.0 * a2 / (s * (4.0 * a2 + s * s));
    }
    ForwardTransformOptions opt;
    opt.rel_tol = 1e-11;
    opt.initial_intervals = oscillation_panels(h.gap(), 40.0 / s);
    return forward_transform([&](double tau) { return f_of_tau(h, scheme, tau); }, s, opt);
}

double g_laplace_spectral(const TwoLevelHamiltonian& h, double r)
{
    if (!(r > 0.0))
        throw Error(ErrorCode::InvalidArgument, "spectral g~ needs r > 0");
    const auto& w = h.overlap_weights();
    const double gap = h.gap();
    const double cross = 2.0 * w[0] * w[1] * r * r / (r * r + gap * gap);
    return (w[0] * w[0] + w[1] * w[1] + cross) / r;
}

double survival_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, double s)
{
    if (s < 0.0)
        throw Error(ErrorCode::DivergentTransform, "survival transform needs s >= 0");
    return survival_poisson_impl(PoissonCoefficients(h, r), scheme, s);
}

double fdt_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, double s)
{
    if (s < 0.0)
        throw Error(ErrorCode::DivergentTransform, "first-detection transform needs s >= 0");
    return fdt_poisson_impl(PoissonCoefficients(h, r), scheme, s);
}

Complex fdt_laplace_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r, Complex s)
{
    return fdt_poisson_impl(PoissonCoefficients(h, r), scheme, s);
}

RationalTransform survival_rational_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r)
{
    const PoissonCoefficients k(h, r);
    if (k.decoupled())
        throw Error(ErrorCode::InvalidArgument, "rational form needs a coupled Hamiltonian (sigma^2 > 0)");
    const Polynomial c = k.cubic_poly();
    if (scheme == Scheme::One)
        return {Polynomial({k.gap2, 0.0, 1.0}).shifted(r), c.shifted(r)};
    const Polynomial x({0.0, 1.0});
    const Polynomial num = c + Polynomial({2.0 * r * k.sigma2});
    return {num.shifted(r), (x * c).shifted(r)};
}

RationalTransform fdt_rational_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r)
{
    const PoissonCoefficients k(h, r);
    if (k.decoupled())
        throw Error(ErrorCode::InvalidArgument, "rational form needs a coupled Hamiltonian (sigma^2 > 0)");
    const Polynomial c = k.cubic_poly();
    if (scheme == Scheme::One)
        return {Polynomial({2.0 * r * k.sigma2}), c.shifted(r)};
    if (k.delta2 == 0.0) {
        // The factor x cancels between numerator and denominator.
        return {(r * Polynomial({2.0 * k.sigma2, -r, 1.0})).shifted(r), c.shifted(r)};
    }
    const Polynomial n2({-r * k.delta2, k.delta2 + 2.0 * k.sigma2, -r, 1.0});
    return {(r * n2).shifted(r), (Polynomial({0.0, 1.0}) * c).shifted(r)};
}

std::vector<Complex> fdt_poles_poisson(const TwoLevelHamiltonian& h, double r)
{
    const PoissonCoefficients k(h, r);
    auto roots = k.cubic_poly().roots();
    for (auto& z : roots)
        z -= r;
    return roots;
}

double mean_fdt_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r)
{
    const PoissonCoefficients k(h, r);
    if (scheme == Scheme::Two)
        return k.decoupled() ? 1.0 / r : 2.0 / r;
    if (k.decoupled())
        return kInf;
    return (r * r + k.gap2) / (2.0 * r * k.sigma2);
}

FirstDetectionStats stats_poisson(const TwoLevelHamiltonian& h, Scheme scheme, double r)
{
    FirstDetectionStats st;
    st.small_t_coefficient = small_t_coefficient(h, scheme, Exponential{r});
    const PoissonCoefficients k(h, r);
    if (k.decoupled()) {
        if (scheme == Scheme::One) {
            st.mean = st.second_moment = st.variance = st.t_m = kInf;
        } else {
            st.mean = 1.0 / r;
            st.second_moment = 2.0 / (r * r);
            st.variance = 1.0 / (r * r);
            st.t_m = 1.0 / r;
        }
        return st;
    }
    const RationalTransform sr = survival_rational_poisson(h, scheme, r);
    const double n0 = sr.numerator()(0.0);
    const double d0 = sr.denominator()(0.0);
    const double dn = sr.numerator().derivative()(0.0);
    const double dd = sr.denominator().derivative()(0.0);
    st.mean = n0 / d0;
    st.second_moment = -2.0 * (dn * d0 - n0 * dd) / (d0 * d0);
    st.variance = st.second_moment - st.mean * st.mean;
    double slowest = -kInf;
    for (const Complex& z : fdt_poles_poisson(h, r))
        slowest = std::max(slowest, z.real());
    st.t_m = -1.0 / slowest;
    return st;
}

double small_t_coefficient(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist)
{
    const double p0 = density_at_zero(dist);
    return scheme == Scheme::One ? p0 * sigma_squared(h) : p0;
}

// -------------------------------------------------------- ProtocolTransforms

ProtocolTransforms::ProtocolTransforms(const TwoLevelHamiltonian& h, Scheme scheme, WaitingTimeDistribution dist)
    : h_(h), scheme_(scheme), dist_(std::move(dist)), fs_(f_series(h, scheme)), gs_(g_series(h, scheme))
{
    v0_ = renewal_quadrature(gs_, 0.0);
}

double ProtocolTransforms::f(double s) const { return f_laplace_poisson(h_, scheme_, s); }
double ProtocolTransforms::g(double s) const { return g_laplace_poisson(h_, scheme_, s); }

double ProtocolTransforms::U(double s) const
{
    return scheme_ == Scheme::One ? V(s) : renewal_quadrature(fs_, s);
}

double ProtocolTransforms::V(double s) const
{
    return s == 0.0 ? v0_ : renewal_quadrature(gs_, s);
}

Complex ProtocolTransforms::U(Complex s) const { return fs_.weighted_laplace(dist_, s); }
Complex ProtocolTransforms::V(Complex s) const { return gs_.weighted_laplace(dist_, s); }

double ProtocolTransforms::renewal_quadrature(const OverlapSeries& x, double s) const
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw Error(ErrorCode::DivergentTransform, "renewal transforms need real s >= 0");
    const double w = x.frequency;
    const bool oscillates = w != 0.0 && x.amplitude != Complex{};

    double horizon = 0.0;
    if (const auto* e = std::get_if<Exponential>(&dist_)) {
        horizon = 40.0 / (e->rate + s);
    } else if (const auto* g = std::get_if<Gamma>(&dist_)) {
        horizon = g->scale * boost::math::gamma_q_inv(g->shape, 1e-17);
        if (s > 0.0)
            horizon = std::min(horizon, 40.0 / s);
    } else {
        // Power-law tails decay too slowly for a truncated quadrature; the
        // continued transform on the imaginary axis is exact.
        return x.weighted_laplace(dist_, Complex{s, 0.0}).real();
    }

    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-13;
    opt.initial_intervals = oscillation_panels(w, horizon);
    auto integrand = [&](double tau) {
        return waiting_time_density(dist_, tau) * x(tau) * std::exp(-s * tau);
    };
    double value = integrate(integrand, 0.0, horizon, opt).value;

    const Complex sc{s, 0.0};
    if (!oscillates) {
        value += ((x.mean + x.amplitude.real()) *
                  waiting_time_tail_transform(dist_, horizon, sc))
                     .real();
    } else {
        const Complex iw{0.0, w};
        const Complex tail = x.mean * waiting_time_tail_transform(dist_, horizon, sc) +
            0.5 * x.amplitude * waiting_time_tail_transform(dist_, horizon, sc - iw) +
            0.5 * std::conj(x.amplitude) * waiting_time_tail_transform(dist_, horizon, sc + iw);
        value += tail.real();
    }
    return value;
}

// ----------------------------------------------------------- renewal results

namespace {

template <class T>
T renewal_fdt(Scheme scheme, T p, T v)
{
    if (std::abs(1.0 - v) < 1e-14)
        throw Error(ErrorCode::PoleHit, "1 - V~(s) vanishes");
    if (scheme == Scheme::One)
        return (p - v) / (1.0 - v);
    return 1.0 - (1.0 - p) * (1.0 + p - 2.0 * v) / (1.0 - v);
}

} // namespace

double fdt_laplace_renewal(const ProtocolTransforms& pt, double s)
{
    if (s < 0.0)
        throw Error(ErrorCode::DivergentTransform, "renewal transform needs s >= 0");
    if (s == 0.0)
        return 1.0;
    return renewal_fdt(pt.scheme(), waiting_time_laplace(pt.distribution(), s), pt.V(s));
}

Complex fdt_laplace_renewal(const ProtocolTransforms& pt, Complex s)
{
    return renewal_fdt(pt.scheme(), waiting_time_laplace(pt.distribution(), s), pt.V(s));
}

double fdt_laplace_renewal(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist, double s)
{
    return fdt_laplace_renewal(ProtocolTransforms(h, scheme, dist), s);
}

double mean_fdt_renewal(const ProtocolTransforms& pt)
{
    const double tau = waiting_time_mean(pt.distribution());
    if (pt.scheme() == Scheme::Two)
        return sigma_squared(pt.hamiltonian()) == 0.0 ? tau : 2.0 * tau;
    const double gap = 1.0 - pt.V0();
    return gap > 0.0 ? tau / gap : kInf;
}

double mean_fdt_renewal(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist)
{
    return mean_fdt_renewal(ProtocolTransforms(h, scheme, dist));
}

PowerLawTail tail_asymptote(const ProtocolTransforms& pt)
{
    const auto tail = power_law_tail(pt.distribution());
    if (!tail)
        throw Error(ErrorCode::NotHeavyTailed, describe(pt.distribution()) + " has no power-law tail");
    if (std::abs(tail->exponent - std::round(tail->exponent)) < 1e-12)
        throw Error(ErrorCode::IntegerExponent, "integer tail exponents carry logarithmic corrections");
    if (pt.scheme() == Scheme::Two)
        return {2.0 * tail->amplitude, tail->exponent + 1.0};
    const double gap = 1.0 - pt.V0();
    return {gap > 0.0 ? tail->amplitude / gap : kInf, tail->exponent + 1.0};
}

PowerLawTail tail_asymptote(const TwoLevelHamiltonian& h, Scheme scheme, const WaitingTimeDistribution& dist)
{
    return tail_asymptote(ProtocolTransforms(h, scheme, dist));
}

} // namespace qreset
