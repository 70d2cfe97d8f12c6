#pragma once

// Shared domain types: two-level Hamiltonians, pure states and detection
// schemes. The Hilbert-space basis is fixed throughout the library:
//   index 0 = |psi_+>  (the initial state)
//   index 1 = |psi_->

#include <array>
#include <cstddef>
#include <complex>
#include <optional>

namespace qreset {

using Complex = std::complex<double>;
using Matrix2 = std::array<std::array<Complex, 2>, 2>;

/// Normalized two-component state vector.
class PureState {
public:
    /// Normalizes `amplitudes`; throws InvalidArgument for a zero or non-finite vector.
    static PureState from_amplitudes(std::array<Complex, 2> amplitudes);

    static PureState plus() noexcept { return PureState({Complex{1.0, 0.0}, Complex{0.0, 0.0}}); }
    static PureState minus() noexcept { return PureState({Complex{0.0, 0.0}, Complex{1.0, 0.0}}); }

    const std::array<Complex, 2>& amplitudes() const noexcept { return amp_; }
    Complex operator[](std::size_t i) const noexcept { return amp_[i]; }

    double norm_squared() const noexcept;

private:
    explicit PureState(std::array<Complex, 2> amp) noexcept : amp_(amp) {}

    std::array<Complex, 2> amp_;
};

/// <a|b>
Complex inner(const PureState& a, const PureState& b) noexcept;

enum class Scheme { One = 1, Two = 2 };

/// Scheme 1 watches for |psi_->, Scheme 2 for the initial state |psi_+>.
PureState interest_state(Scheme scheme) noexcept;
/// The state left behind by a failed measurement (the other basis vector).
PureState complement_state(Scheme scheme) noexcept;

/// Resonant Jaynes-Cummings sector parameters attached to a Hamiltonian built
/// by make_jc_hamiltonian, so evaluators can switch to closed forms.
struct JcParameters {
    double g = 0.0;
    int n = 1;
    double omega_c = 1.0;
};

/// 2x2 Hermitian Hamiltonian (hbar = 1) with its eigen-decomposition.
class TwoLevelHamiltonian {
public:
    /// Validates Hermiticity within 1e-9 (NonHermitian otherwise) and stores
    /// the symmetrized matrix so the stored entries are exactly Hermitian.
    static TwoLevelHamiltonian from_matrix(const Matrix2& entries);

    const Matrix2& entries() const noexcept { return h_; }
    Complex entry(std::size_t i, std::size_t j) const noexcept { return h_[i][j]; }

    /// (E_+, E_-), sorted E_+ >= E_-.
    const std::array<double, 2>& eigenvalues() const noexcept { return energies_; }
    /// Eigenvector of eigenvalues()[k], expressed in the (psi_+, psi_-) basis.
    const PureState& eigenvector(std::size_t k) const noexcept { return vectors_[k]; }
    /// |<E_k|psi_+>|^2 for k = 0, 1.
    const std::array<double, 2>& overlap_weights() const noexcept { return weights_; }
    /// E_+ - E_-  (>= 0).
    double gap() const noexcept { return energies_[0] - energies_[1]; }
    bool degenerate() const noexcept { return degenerate_; }

    const std::optional<JcParameters>& jc() const noexcept { return jc_; }
    TwoLevelHamiltonian with_jc_tag(const JcParameters& p) const;

private:
    TwoLevelHamiltonian() = default;

    Matrix2 h_{};
    std::array<double, 2> energies_{};
    std::array<PureState, 2> vectors_{PureState::plus(), PureState::minus()};
    std::array<double, 2> weights_{};
    bool degenerate_ = false;
    std::optional<JcParameters> jc_;
};

/// Summary statistics of a first-detection-time density F(t).
struct FirstDetectionStats {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
    /// Slowest exponential decay time of F(t).
    double t_m = 0.0;
    /// Scheme 1: c in F(t) ~ c t^2.  Scheme 2: F(0+).
    double small_t_coefficient = 0.0;
};

/// Free-function alias of TwoLevelHamiltonian::from_matrix.
inline TwoLevelHamiltonian make_hamiltonian(const Matrix2& entries)
{
    return TwoLevelHamiltonian::from_matrix(entries);
}

/// JC block in a fixed excitation sector n >= 1, resonant (omega_q = omega_c).
/// psi_+ = |up, n-1>, psi_- = |down, n>; off-diagonal element g*sqrt(n).
TwoLevelHamiltonian make_jc_hamiltonian(double g, int n, double omega_c = 1.0);

} // namespace qreset
