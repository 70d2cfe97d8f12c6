#include "qreset/laplace.hpp"

#include "qreset/error.hpp"
#include "qreset/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <locale>
#include <sstream>

namespace qreset {

namespace {

template <class S>
auto transform_impl(const std::function<double(double)>& f, S s, const ForwardTransformOptions& opt)
{
    const double re = std::real(s);
    if (!opt.horizon && !(re > 0.0))
        throw Error(ErrorCode::DivergentTransform, "forward transform needs Re(s) > 0 or an explicit horizon");
    const double horizon = opt.horizon ? *opt.horizon : 40.0 / re;
    QuadratureOptions q;
    q.rel_tol = opt.rel_tol;
    q.abs_tol = opt.abs_tol;
    q.initial_intervals = opt.initial_intervals;
    auto integrand = [&](double tau) { return f(tau) * std::exp(-s * tau); };
    auto value = integrate(integrand, 0.0, horizon, q).value;
    if (opt.tail)
        value += static_cast<decltype(value)>(std::real(opt.tail(horizon, Complex(s))));
    return value;
}

using CPoly = std::vector<Complex>;

CPoly cmul(const CPoly& a, const CPoly& b)
{
    CPoly out(a.size() + b.size() - 1, Complex{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

// Taylor coefficients of a real polynomial about z0.
CPoly taylor_about(const Polynomial& p, Complex z0)
{
    CPoly c(p.coefficients().begin(), p.coefficients().end());
    // Repeated synthetic division (Horner shift).
    const std::size_t n = c.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 1; j > k; --j)
            c[j - 1] += z0 * c[j];
    return c;
}

} // namespace

double forward_transform(const std::function<double(double)>& f, double s, const ForwardTransformOptions& opt)
{
    return transform_impl(f, s, opt);
}

Complex forward_transform(const std::function<double(double)>& f, Complex s, const ForwardTransformOptions& opt)
{
    const double horizon = opt.horizon ? *opt.horizon : 40.0 / s.real();
    if (!opt.horizon && !(s.real() > 0.0))
        throw Error(ErrorCode::DivergentTransform, "forward transform needs Re(s) > 0 or an explicit horizon");
    QuadratureOptions q;
    q.rel_tol = opt.rel_tol;
    q.abs_tol = opt.abs_tol;
    q.initial_intervals = opt.initial_intervals;
    auto integrand = [&](double tau) -> Complex { return f(tau) * std::exp(-s * tau); };
    Complex value = integrate(integrand, 0.0, horizon, q).value;
    if (opt.tail)
        value += opt.tail(horizon, s);
    return value;
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending))
{
    for (double v : c_)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "polynomial coefficients must be finite");
    trim();
}

void Polynomial::trim()
{
    while (!c_.empty() && c_.back() == 0.0)
        c_.pop_back();
}

double Polynomial::operator()(double x) const noexcept
{
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

Complex Polynomial::operator()(Complex z) const noexcept
{
    Complex acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

Polynomial Polynomial::derivative() const
{
    if (c_.size() <= 1)
        return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

std::vector<Complex> Polynomial::roots() const
{
    const int n = degree();
    if (n < 1)
        return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
        companion(i, n - 1) = -c_[static_cast<std::size_t>(i)] / leading();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::QuadratureFailure, "companion eigenvalue solver did not converge");

    const Polynomial dp = derivative();
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Complex z = solver.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            const Complex d = dp(z);
            if (d == Complex{})
                break;
            const Complex next = z - (*this)(z) / d;
            if (!(std::abs((*this)(next)) < std::abs((*this)(z))))
                break;
            z = next;
        }
        out.push_back(z);
    }
    return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i)
        c[i] += b.c_[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b)
{
    return a + (-1.0) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.c_.empty() || b.c_.empty())
        return Polynomial{};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j)
            c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& a)
{
    std::vector<double> c = a.c_;
    for (double& v : c)
        v *= k;
    return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted(double shift) const
{
    std::vector<double> c = c_;
    const std::size_t n = c.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 1; j > k; --j)
            c[j - 1] += shift * c[j];
    return Polynomial(std::move(c));
}

// --------------------------------------------------------- RationalTransform

RationalTransform::RationalTransform(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator))
{
    if (den_.degree() < 1 || num_.degree() >= den_.degree())
        throw Error(ErrorCode::InvalidArgument, "rational transform must be strictly proper");
    const auto roots = den_.roots();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-8)
                throw Error(ErrorCode::ConfluentPoles,
                            "poles closer than 1e-8; supply multiplicities explicitly");
    for (const Complex& z : roots)
        poles_.push_back({z, 1});
    build_expansion();
}

RationalTransform::RationalTransform(Polynomial numerator, Polynomial denominator, std::vector<Pole> poles)
    : num_(std::move(numerator)), den_(std::move(denominator)), poles_(std::move(poles))
{
    if (den_.degree() < 1 || num_.degree() >= den_.degree())
        throw Error(ErrorCode::InvalidArgument, "rational transform must be strictly proper");
    int total = 0;
    for (const auto& p : poles_) {
        if (p.multiplicity < 1)
            throw Error(ErrorCode::InvalidArgument, "pole multiplicity must be >= 1");
        total += p.multiplicity;
    }
    if (total != den_.degree())
        throw Error(ErrorCode::InvalidArgument, "pole multiplicities must add up to the denominator degree");
    build_expansion();
}

void RationalTransform::build_expansion()
{
    terms_.clear();
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        const Complex p = poles_[i].location;
        const int m = poles_[i].multiplicity;
        // h(s) = (s - p)^m N(s) / D(s) expanded about p.
        CPoly q{Complex{den_.leading(), 0.0}};
        for (std::size_t j = 0; j < poles_.size(); ++j) {
            if (j == i)
                continue;
            const CPoly factor{p - poles_[j].location, Complex{1.0, 0.0}};
            for (int k = 0; k < poles_[j].multiplicity; ++k)
                q = cmul(q, factor);
        }
        const CPoly n = taylor_about(num_, p);
        std::vector<Complex> h(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            Complex acc = static_cast<std::size_t>(k) < n.size() ? n[static_cast<std::size_t>(k)] : Complex{};
            for (int j = 1; j <= k; ++j)
                if (static_cast<std::size_t>(j) < q.size())
                    acc -= q[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(k - j)];
            h[static_cast<std::size_t>(k)] = acc / q[0];
        }
        std::vector<Complex> c(static_cast<std::size_t>(m));
        double factorial = 1.0;
        for (int j = 1; j <= m; ++j) {
            if (j > 1)
                factorial *= static_cast<double>(j - 1);
            c[static_cast<std::size_t>(j - 1)] = h[static_cast<std::size_t>(m - j)] / factorial;
        }
        terms_.push_back(std::move(c));
    }
}

std::vector<Complex> RationalTransform::residues() const
{
    std::vector<Complex> out;
    out.reserve(terms_.size());
    for (const auto& c : terms_)
        out.push_back(c.front());
    return out;
}

Complex RationalTransform::inverse_complex(double t) const
{
    Complex total{};
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        Complex poly{};
        for (auto it = terms_[i].rbegin(); it != terms_[i].rend(); ++it)
            poly = poly * t + *it;
        total += poly * std::exp(poles_[i].location * t);
    }
    return total;
}

double invert_rational(const RationalTransform& rt, double t)
{
    if (t < 0.0)
        throw Error(ErrorCode::NegativeTime, "inverse transform needs t >= 0");
    const Complex value = rt.inverse_complex(t);
    double scale = 1.0;
    const auto res = rt.residues();
    for (std::size_t i = 0; i < res.size(); ++i)
        scale = std::max(scale, std::abs(res[i] * std::exp(rt.poles()[i].location * t)));
    if (std::abs(value.imag()) > 1e-10 * scale)
        throw Error(ErrorCode::InversionUnstable, "residue sum has a non-negligible imaginary part");
    return value.real();
}

// -------------------------------------------------------------------- Talbot

namespace {
constexpr double kTalbotA = 0.5017;
constexpr double kTalbotB = 0.6407;
constexpr double kTalbotC = 0.6122;
constexpr double kTalbotD = 0.2645;
constexpr double kTalbotMargin = 0.8;
} // namespace

namespace {

struct TalbotEstimate {
    double value;
    // Sum of term magnitudes; eps times this bounds the rounding error.
    double magnitude;
};

TalbotEstimate talbot_estimate(const std::function<Complex(Complex)>& transform, double t, int nodes, double scale)
{
    const double h = 2.0 * std::numbers::pi / nodes;
    double sum = 0.0;
    double magnitude = 0.0;
    for (int k = 0; k < nodes / 2; ++k) {
        const double theta = (k + 0.5) * h;
        const double a = kTalbotB * theta;
        const double sn = std::sin(a);
        const double cot = std::cos(a) / sn;
        const Complex s = scale * Complex{kTalbotA * theta * cot - kTalbotC, kTalbotD * theta};
        const Complex ds =
            scale * Complex{kTalbotA * cot - kTalbotA * kTalbotB * theta / (sn * sn), kTalbotD};
        const double term = (std::exp(s * t) * transform(s) * ds).imag();
        sum += term;
        magnitude += std::abs(term);
    }
    return {2.0 * sum / nodes, 2.0 * magnitude / nodes};
}

} // namespace

double talbot_sum(const std::function<Complex(Complex)>& transform, double t, int nodes, double scale)
{
    return talbot_estimate(transform, t, nodes, scale).value;
}

bool talbot_encloses(double scale, Complex z)
{
    const double theta = std::abs(z.imag()) / (kTalbotD * scale);
    if (theta >= std::numbers::pi)
        return false;
    const double shape = theta == 0.0 ? 1.0 / kTalbotB : theta / std::tan(kTalbotB * theta);
    return z.real() < scale * (kTalbotA * shape - kTalbotC);
}

double invert_talbot(const std::function<Complex(Complex)>& transform, double t, const TalbotConfig& cfg)
{
    if (!(t > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Talbot inversion needs t > 0");
    if (cfg.nodes < 16 || cfg.nodes % 2 != 0)
        throw Error(ErrorCode::InvalidArgument, "Talbot node count must be even and >= 16");
    double scale = cfg.scale ? *cfg.scale : cfg.nodes / t;
    if (!cfg.scale) {
        // A singularity hugging the contour slows the node convergence; widen
        // the contour (at some cost in rounding) until each hint would still be
        // enclosed by a contour a fifth smaller.
        const double widest = 1.5 * scale;
        for (const Complex& z : cfg.singularities)
            while (!talbot_encloses(scale * kTalbotMargin, z) && scale * 1.05 <= widest)
                scale *= 1.05;
    }
    for (const Complex& z : cfg.singularities) {
        if (!talbot_encloses(scale, z)) {
            std::ostringstream msg;
            msg.imbue(std::locale::classic());
            msg << "singularity " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
                << "i lies outside the Talbot contour at t = " << t;
            throw Error(ErrorCode::InversionUnstable, msg.str());
        }
    }
    const TalbotEstimate main = talbot_estimate(transform, t, cfg.nodes, scale);
    const double value = main.value;
    if (!cfg.self_check)
        return value;

    // Same contour, more nodes: rounding is set by the contour alone, so the
    // denser sum is at least as accurate and the gap measures the error.
    const int check_nodes = (3 * cfg.nodes / 2) / 2 * 2;
    const TalbotEstimate second = talbot_estimate(transform, t, check_nodes, scale);
    const double check = second.value;
    const double diff = std::abs(value - check);
    const double rounding = 100.0 * std::numeric_limits<double>::epsilon() * std::max(main.magnitude, second.magnitude);
    if (!(diff <= 1e-6 * std::max(std::abs(value), std::abs(check)) + rounding)) {
        std::ostringstream msg;
        msg.imbue(std::locale::classic());
        msg.precision(10);
        msg << "Talbot estimates with " << cfg.nodes << " and " << check_nodes << " nodes disagree at t = "
            << t << " (" << value << " vs " << check << ")";
        throw Error(ErrorCode::InversionUnstable, msg.str());
    }
    return value;
}

} // namespace qreset
