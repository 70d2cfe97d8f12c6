#pragma once

// Forward Laplace transforms by adaptive quadrature, inversion of rational
// transforms by residues, and numerical inversion on a Talbot contour.

#include "qreset/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qreset {

struct ForwardTransformOptions {
    /// Truncation point of the quadrature; 40/Re(s) when unset.
    std::optional<double> horizon;
    /// Exact contribution of [horizon, inf), added to the quadrature.
    std::function<Complex(double horizon, Complex s)> tail;
    double rel_tol = 1e-10;
    double abs_tol = 1e-15;
    /// Starting panels; oscillatory integrands want about one per period.
    std::size_t initial_intervals = 16;
};

/// Integral of f(tau) exp(-s tau) over [0, inf).
double forward_transform(const std::function<double(double)>& f, double s,
                         const ForwardTransformOptions& opt = {});
Complex forward_transform(const std::function<double(double)>& f, Complex s,
                          const ForwardTransformOptions& opt = {});

/// Real polynomial, coefficients in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> ascending);

    const std::vector<double>& coefficients() const noexcept { return c_; }
    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.back(); }

    double operator()(double x) const noexcept;
    Complex operator()(Complex z) const noexcept;
    Polynomial derivative() const;

    /// All complex roots: companion-matrix eigenvalues polished by Newton.
    std::vector<Complex> roots() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& a);

    /// p(x + shift) as a polynomial in x.
    Polynomial shifted(double shift) const;

private:
    void trim();
    std::vector<double> c_;
};

struct Pole {
    Complex location;
    int multiplicity = 1;
};

/// Strictly proper rational function N(s)/D(s) with resolved poles.
class RationalTransform {
public:
    /// Locates the poles of D; ConfluentPoles if two lie within 1e-8.
    RationalTransform(Polynomial numerator, Polynomial denominator);
    /// Caller-resolved poles (needed when some are repeated).
    RationalTransform(Polynomial numerator, Polynomial denominator, std::vector<Pole> poles);

    const Polynomial& numerator() const noexcept { return num_; }
    const Polynomial& denominator() const noexcept { return den_; }
    const std::vector<Pole>& poles() const noexcept { return poles_; }
    /// Residue of F(s) at each pole (coefficient of 1/(s - p)).
    std::vector<Complex> residues() const;

    Complex operator()(Complex s) const { return num_(s) / den_(s); }
    double operator()(double s) const { return num_(s) / den_(s); }

    /// Inverse transform at t: sum over poles of residues of F(s) e^{st}.
    Complex inverse_complex(double t) const;

private:
    void build_expansion();

    Polynomial num_;
    Polynomial den_;
    std::vector<Pole> poles_;
    // Per pole, c_k in sum_k c_k t^k e^{p t}.
    std::vector<std::vector<Complex>> terms_;
};

/// Real-valued inverse; InversionUnstable if the imaginary part exceeds
/// 1e-10 relative to the magnitude of the summed terms.
double invert_rational(const RationalTransform& rt, double t);

struct TalbotConfig {
    /// Node count M (even, >= 16).
    int nodes = 64;
    /// Contour scale c in s = c * (contour shape); M/t when unset.
    std::optional<double> scale;
    /// Known poles or branch points; each must lie inside the contour.
    std::vector<Complex> singularities;
    /// Compare against a 3M/2-node sum on the same contour; throw if they differ
    /// by more than 1e-6 relative plus the rounding floor of the sums.
    bool self_check = true;
};

/// Raw contour sum with M nodes and scale c (no validation).
double talbot_sum(const std::function<Complex(Complex)>& transform, double t, int nodes, double scale);

/// Real-axis crossing and whether point z lies to the left of the contour.
bool talbot_encloses(double scale, Complex z);

/// Numerical inverse Laplace transform at t > 0 on the optimized Talbot
/// contour s(th) = c (0.5017 th cot(0.6407 th) - 0.6122 + 0.2645 i th).
/// The transform must be analytic right of the contour and satisfy
/// F(conj s) = conj F(s).
double invert_talbot(const std::function<Complex(Complex)>& transform, double t,
                     const TalbotConfig& cfg = {});

} // namespace qreset
