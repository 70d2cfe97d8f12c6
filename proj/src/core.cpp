#include "qreset/core.hpp"

#include "qreset/error.hpp"

#include <cmath>
#include <string>

namespace qreset {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::DivergentTransform: return "DivergentTransform";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::InfiniteMean: return "InfiniteMean";
    case ErrorCode::NotHeavyTailed: return "NotHeavyTailed";
    case ErrorCode::IntegerExponent: return "IntegerExponent";
    case ErrorCode::InvalidMu: return "InvalidMu";
    case ErrorCode::ConfluentPoles: return "ConfluentPoles";
    case ErrorCode::InversionUnstable: return "InversionUnstable";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::BracketInvalid: return "BracketInvalid";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::MonotoneFunction: return "MonotoneFunction";
    case ErrorCode::NoFiniteOptimum: return "NoFiniteOptimum";
    }
    return "Unknown";
}

PureState PureState::from_amplitudes(std::array<Complex, 2> amplitudes)
{
    const double n2 = std::norm(amplitudes[0]) + std::norm(amplitudes[1]);
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw Error(ErrorCode::InvalidArgument, "state vector must be finite and non-zero");
    const double inv = 1.0 / std::sqrt(n2);
    return PureState({amplitudes[0] * inv, amplitudes[1] * inv});
}

double PureState::norm_squared() const noexcept
{
    return std::norm(amp_[0]) + std::norm(amp_[1]);
}

Complex inner(const PureState& a, const PureState& b) noexcept
{
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

PureState interest_state(Scheme scheme) noexcept
{
    return scheme == Scheme::One ? PureState::minus() : PureState::plus();
}

PureState complement_state(Scheme scheme) noexcept
{
    return scheme == Scheme::One ? PureState::plus() : PureState::minus();
}

TwoLevelHamiltonian TwoLevelHamiltonian::from_matrix(const Matrix2& m)
{
    for (const auto& row : m)
        for (const auto& z : row)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw Error(ErrorCode::InvalidArgument, "Hamiltonian entries must be finite");

    constexpr double tol = 1e-9;
    const double dev = std::max({std::abs(m[0][0].imag()), std::abs(m[1][1].imag()),
                                 std::abs(m[0][1] - std::conj(m[1][0]))});
    if (dev > tol)
        throw Error(ErrorCode::NonHermitian,
                    "|H - H^dagger| = " + std::to_string(dev) + " exceeds 1e-9");

    TwoLevelHamiltonian h;
    const double a = m[0][0].real();
    const double d = m[1][1].real();
    const Complex b = 0.5 * (m[0][1] + std::conj(m[1][0]));
    h.h_ = {{{Complex{a, 0.0}, b}, {std::conj(b), Complex{d, 0.0}}}};

    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double radius = std::hypot(half, std::abs(b));
    h.energies_ = {mean + radius, mean - radius};

    if (radius == 0.0) {
        h.degenerate_ = true;
        h.vectors_ = {PureState::plus(), PureState::minus()};
    } else {
        // Pick the row of (H - E_+) that avoids cancellation.
        std::array<Complex, 2> v = half >= 0.0
            ? std::array<Complex, 2>{Complex{radius + half, 0.0}, std::conj(b)}
            : std::array<Complex, 2>{b, Complex{radius - half, 0.0}};
        const PureState up = PureState::from_amplitudes(v);
        const PureState down = PureState::from_amplitudes({-std::conj(up[1]), std::conj(up[0])});
        h.vectors_ = {up, down};
    }
    for (std::size_t k = 0; k < 2; ++k)
        h.weights_[k] = std::norm(h.vectors_[k][0]);
    return h;
}

TwoLevelHamiltonian TwoLevelHamiltonian::with_jc_tag(const JcParameters& p) const
{
    TwoLevelHamiltonian copy = *this;
    copy.jc_ = p;
    return copy;
}

TwoLevelHamiltonian make_jc_hamiltonian(double g, int n, double omega_c)
{
    if (!(g >= 0.0) || n < 1 || !std::isfinite(omega_c))
        throw Error(ErrorCode::InvalidArgument, "JC sector needs g >= 0 and n >= 1");
    const double diag = omega_c * (n - 0.5);
    const double coupling = g * std::sqrt(static_cast<double>(n));
    const Matrix2 m{{{Complex{diag, 0.0}, Complex{coupling, 0.0}},
                     {Complex{coupling, 0.0}, Complex{diag, 0.0}}}};
    return TwoLevelHamiltonian::from_matrix(m).with_jc_tag({g, n, omega_c});
}

} // namespace qreset
