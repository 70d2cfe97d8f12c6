#include "qreset/jaynes_cummings.hpp"

#include "qreset/error.hpp"
#include "qreset/optimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qreset {

double JcSector::coupling() const
{
    return g * std::sqrt(static_cast<double>(n));
}

double JcSector::mu_scale() const
{
    return 2.0 * g * g * static_cast<double>(n) / (r * r);
}

TwoLevelHamiltonian JcSector::hamiltonian() const
{
    return make_jc_hamiltonian(g, n, omega_c);
}

JcSector make_jc_sector(double g, int n, double r, double omega_c)
{
    if (!(g > 0.0) || !std::isfinite(g) || n < 1 || !(r > 0.0) || !std::isfinite(r) || !std::isfinite(omega_c))
        throw Error(ErrorCode::InvalidArgument, "JC sector needs g > 0, n >= 1 and r > 0");
    return {g, n, omega_c, r};
}

double cubic_discriminant(double mu)
{
    return mu * (-4.0 + mu * (13.0 - 32.0 * mu));
}

Complex cubic_value(double mu, Complex l)
{
    return ((l + 2.0) * l + (1.0 + 2.0 * mu)) * l + mu;
}

CubicRoots cubic_roots(double mu)
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw Error(ErrorCode::InvalidMu, "mu_scale must be finite and > 0");
    const double b0 = 1.0 - 6.0 * mu;
    const double b1 = -2.0 - 9.0 * mu;
    // Same-sign square root keeps C³ away from cancellation (b1 < 0 always).
    const Complex root = std::sqrt(Complex{b1 * b1 - 4.0 * b0 * b0 * b0, 0.0});
    const Complex c = std::pow(0.5 * (b1 - root), 1.0 / 3.0);
    const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

    Complex best{};
    double best_imag = std::numeric_limits<double>::infinity();
    Complex zk = c;
    for (int k = 0; k < 3; ++k) {
        const Complex lambda = -(2.0 + zk + b0 / zk) / 3.0;
        if (std::abs(lambda.imag()) < best_imag) {
            best_imag = std::abs(lambda.imag());
            best = lambda;
        }
        zk *= zeta;
    }

    double l1 = best.real();
    for (int it = 0; it < 4; ++it) {
        const double p = ((l1 + 2.0) * l1 + (1.0 + 2.0 * mu)) * l1 + mu;
        const double dp = (3.0 * l1 + 4.0) * l1 + (1.0 + 2.0 * mu);
        const double next = l1 - p / dp;
        const double pn = ((next + 2.0) * next + (1.0 + 2.0 * mu)) * next + mu;
        if (!(std::abs(pn) < std::abs(p)))
            break;
        l1 = next;
    }

    CubicRoots out;
    out.lambda1 = l1;
    out.lambda_r = -1.0 - 0.5 * l1;
    out.lambda_i = std::sqrt(std::max(0.0, -mu / l1 - out.lambda_r * out.lambda_r));
    return out;
}

namespace {

// G(z) for numerator N(λ) = μ + κ λ(λ+1); κ = 0 gives Scheme 1, κ = 1 Scheme 2.
struct Residues {
    double mu;
    double kappa;
    CubicRoots roots;
    double d, den, n1, a_cos, q_sin;

    Residues(double mu_, Scheme scheme) : mu(mu_), kappa(scheme == Scheme::One ? 0.0 : 1.0), roots(cubic_roots(mu_))
    {
        const double l1 = roots.lambda1;
        const double lr = roots.lambda_r;
        const double li = roots.lambda_i;
        d = lr - l1;
        den = d * d + li * li;
        n1 = mu + kappa * l1 * (l1 + 1.0);
        const double nr = mu + kappa * (lr * lr - li * li + lr);
        a_cos = nr - kappa * (2.0 * lr + 1.0) * d;
        q_sin = nr * d + kappa * li * li * (2.0 * lr + 1.0);
    }

    double g(double z) const
    {
        const double li = roots.lambda_i;
        // sin(λ_I z)/λ_I tends to z as the pair merges into a double root.
        const double sinc = li < 1e-8 ? z : std::sin(li * z) / li;
        return n1 * std::exp(roots.lambda1 * z) / den -
            std::exp(roots.lambda_r * z) * (a_cos * std::cos(li * z) - q_sin * sinc) / den;
    }
};

void require_time(double t)
{
    if (t < 0.0 || std::isnan(t))
        throw Error(ErrorCode::NegativeTime, "time must be >= 0");
}

} // namespace

double pdf(const JcSector& sector, Scheme scheme, double t)
{
    require_time(t);
    return sector.r * Residues(sector.mu_scale(), scheme).g(sector.r * t);
}

double pdf_scheme1(const JcSector& sector, double t) { return pdf(sector, Scheme::One, t); }
double pdf_scheme2(const JcSector& sector, double t) { return pdf(sector, Scheme::Two, t); }

double survival(const JcSector& sector, Scheme scheme, double t)
{
    require_time(t);
    const Residues res(sector.mu_scale(), scheme);
    const double z = sector.r * t;
    const auto& rt = res.roots;
    const Complex l2{rt.lambda_r, rt.lambda_i};
    const Complex n2 = res.mu + res.kappa * l2 * (l2 + 1.0);
    const Complex c2 = n2 / ((l2 - rt.lambda1) * Complex{0.0, 2.0 * rt.lambda_i});
    return -res.n1 / res.den * std::exp(rt.lambda1 * z) / rt.lambda1 - 2.0 * (c2 * std::exp(l2 * z) / l2).real();
}

std::vector<double> pdf_grid(const JcSector& sector, Scheme scheme, std::span<const double> times)
{
    for (double t : times)
        require_time(t);
    const Residues res(sector.mu_scale(), scheme);
    std::vector<double> out(times.size());
    const auto n = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = sector.r * res.g(sector.r * times[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<double> pdf_grid_serial(const JcSector& sector, Scheme scheme, std::span<const double> times)
{
    for (double t : times)
        require_time(t);
    const Residues res(sector.mu_scale(), scheme);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times)
        out.push_back(sector.r * res.g(sector.r * t));
    return out;
}

double jc_g_laplace(const JcSector& sector, double s)
{
    if (!(s > 0.0))
        throw Error(ErrorCode::DivergentTransform, "Laplace variable must be > 0");
    const double a2 = sector.coupling() * sector.coupling();
    return (2.0 * a2 + s * s) / (s * (4.0 * a2 + s * s));
}

Complex jc_fdt_laplace(const JcSector& sector, Scheme scheme, Complex s)
{
    const double mu = sector.mu_scale();
    const Complex l = s / sector.r;
    const Complex num = scheme == Scheme::One ? Complex{mu, 0.0} : mu + l * (l + 1.0);
    return num / cubic_value(mu, l);
}

RationalTransform jc_fdt_rational(const JcSector& sector, Scheme scheme)
{
    const double r = sector.r;
    const double mu = sector.mu_scale();
    const Polynomial den({mu * r * r * r, (1.0 + 2.0 * mu) * r * r, 2.0 * r, 1.0});
    const Polynomial num = scheme == Scheme::One ? Polynomial({mu * r * r * r})
                                                 : Polynomial({mu * r * r * r, r * r, r});
    const CubicRoots c = cubic_roots(mu);
    std::vector<Pole> poles{{Complex{r * c.lambda1, 0.0}, 1},
                            {Complex{r * c.lambda_r, r * c.lambda_i}, 1},
                            {Complex{r * c.lambda_r, -r * c.lambda_i}, 1}};
    return {num, den, std::move(poles)};
}

FirstDetectionStats moments_scheme1(const JcSector& sector)
{
    const double r = sector.r;
    const double a2 = sector.coupling() * sector.coupling();
    FirstDetectionStats st;
    st.mean = 2.0 / r + r / (2.0 * a2);
    st.variance = 4.0 / (r * r) + r * r / (4.0 * a2 * a2);
    st.second_moment = st.variance + st.mean * st.mean;
    st.t_m = maximal_time(sector);
    st.small_t_coefficient = r * a2;
    return st;
}

FirstDetectionStats moments_scheme2(const JcSector& sector)
{
    // S~(s) = (x² - r x + 4a²) / (x³ - r x² + 4a² x - 2a² r), x = r + s.
    const double r = sector.r;
    const double a2 = sector.coupling() * sector.coupling();
    const Polynomial num = Polynomial({4.0 * a2, -r, 1.0}).shifted(r);
    const Polynomial den = Polynomial({-2.0 * a2 * r, 4.0 * a2, -r, 1.0}).shifted(r);
    const double n0 = num(0.0);
    const double d0 = den(0.0);
    const double dn = num.derivative()(0.0);
    const double dd = den.derivative()(0.0);
    FirstDetectionStats st;
    st.mean = n0 / d0;
    st.second_moment = -2.0 * (dn * d0 - n0 * dd) / (d0 * d0);
    st.variance = st.second_moment - st.mean * st.mean;
    st.t_m = maximal_time(sector);
    st.small_t_coefficient = r;
    return st;
}

FirstDetectionStats moments(const JcSector& sector, Scheme scheme)
{
    return scheme == Scheme::One ? moments_scheme1(sector) : moments_scheme2(sector);
}

RateOptimum optimal_rate(const JcSector& sector, Scheme scheme)
{
    if (scheme == Scheme::Two)
        throw Error(ErrorCode::NoFiniteOptimum, "the scheme 2 mean 2/r decreases monotonically in r");
    const double a = sector.coupling();
    return {2.0 * a, 2.0 / a};
}

double variance_argmin_scheme1(const JcSector& sector)
{
    const double a2 = sector.coupling() * sector.coupling();
    auto derivative = [&](double r) { return -8.0 / (r * r * r) + r / (2.0 * a2 * a2); };
    double lo = 1e-3 * sector.coupling();
    double hi = 1e3 * sector.coupling();
    while (hi - lo > 1e-15 * hi) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi)
            break;
        (derivative(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double maximal_time(const JcSector& sector)
{
    return -1.0 / (sector.r * cubic_roots(sector.mu_scale()).lambda1);
}

double tail_amplitude(const JcSector& sector, Scheme scheme)
{
    const Residues res(sector.mu_scale(), scheme);
    return sector.r * res.n1 / res.den;
}

RateOptimum minimize_maximal_time(const JcSector& sector)
{
    const double r_star = 2.0 * sector.coupling();
    auto tm = [&](double r) {
        JcSector s = sector;
        s.r = r;
        return maximal_time(s);
    };
    const Bracket bracket = validate_unimodal(tm, 1e-3 * r_star, 1e3 * r_star, 50);
    const MinimizeResult m = minimize_scalar(tm, bracket, 1e-10);
    return {m.x, m.value};
}

} // namespace qreset
