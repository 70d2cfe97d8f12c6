#include "qreset/core.hpp"
#include "qreset/error.hpp"
#include "qreset/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace qreset;

namespace {

Matrix2 real_matrix(double a, double b, double c, double d)
{
    return {{{Complex{a, 0}, Complex{b, 0}}, {Complex{c, 0}, Complex{d, 0}}}};
}

} // namespace

TEST_CASE("identity Hamiltonian is degenerate with eigenvalues (1, 1)")
{
    const auto h = make_hamiltonian(real_matrix(1, 0, 0, 1));
    CHECK(h.eigenvalues()[0] == doctest::Approx(1.0));
    CHECK(h.eigenvalues()[1] == doctest::Approx(1.0));
    CHECK(h.degenerate());
    const double overlap = std::abs(inner(h.eigenvector(0), h.eigenvector(1)));
    CHECK(overlap < 1e-12);
}

TEST_CASE("diag(2, -2) has the basis vectors as eigenvectors")
{
    const auto h = make_hamiltonian(real_matrix(2, 0, 0, -2));
    CHECK(h.eigenvalues()[0] == doctest::Approx(2.0));
    CHECK(h.eigenvalues()[1] == doctest::Approx(-2.0));
    CHECK(std::abs(h.eigenvector(0)[0]) == doctest::Approx(1.0));
    CHECK(std::abs(h.eigenvector(1)[1]) == doctest::Approx(1.0));
    CHECK(h.overlap_weights()[0] == doctest::Approx(1.0));
    CHECK(h.overlap_weights()[1] == doctest::Approx(0.0));
}

TEST_CASE("JC block: off-diagonal element g sqrt(n) and equal weights")
{
    const auto h = make_jc_hamiltonian(0.1, 37);
    CHECK(std::abs(h.entry(0, 1)) == doctest::Approx(0.1 * std::sqrt(37.0)).epsilon(1e-14));
    CHECK(std::abs(h.entry(0, 1)) == doctest::Approx(0.60828).epsilon(1e-5));
    CHECK(h.entry(0, 0).real() == doctest::Approx(h.entry(1, 1).real()));
    CHECK(h.overlap_weights()[0] == doctest::Approx(0.5));
    CHECK(h.gap() == doctest::Approx(2.0 * 0.1 * std::sqrt(37.0)));
    REQUIRE(h.jc());
    CHECK(h.jc()->n == 37);
}

TEST_CASE("Hamiltonian validation")
{
    SUBCASE("non-Hermitian matrix is rejected")
    {
        try {
            make_hamiltonian(real_matrix(1, 0.5, 0.2, 1));
            FAIL("expected NonHermitian");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonHermitian);
        }
    }
    SUBCASE("tiny asymmetry is symmetrized")
    {
        const auto h = make_hamiltonian(real_matrix(1, 0.5, 0.5 + 1e-12, 1));
        CHECK(h.entry(0, 1) == std::conj(h.entry(1, 0)));
    }
    SUBCASE("invalid JC parameters")
    {
        CHECK_THROWS_AS(make_jc_hamiltonian(0.1, 0), Error);
    }
}

TEST_CASE("pure states")
{
    const auto psi = PureState::from_amplitudes({Complex{3, 0}, Complex{0, 4}});
    CHECK(psi.norm_squared() == doctest::Approx(1.0));
    CHECK(std::abs(psi[0]) == doctest::Approx(0.6));
    CHECK_THROWS_AS(PureState::from_amplitudes({Complex{0, 0}, Complex{0, 0}}), Error);
    CHECK(std::abs(inner(PureState::plus(), PureState::minus())) == 0.0);
    CHECK(std::abs(interest_state(Scheme::One)[1]) == 1.0);
    CHECK(std::abs(interest_state(Scheme::Two)[0]) == 1.0);
    CHECK(std::abs(complement_state(Scheme::One)[0]) == 1.0);
    CHECK(std::abs(complement_state(Scheme::Two)[1]) == 1.0);
}

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams are reproducible and distinct")
{
    Philox4x32 a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint32_t> firsts;
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        CHECK(x == b());
        firsts.insert(x);
    }
    CHECK(c() != Philox4x32(7, 3)());
    CHECK(d() != Philox4x32(7, 3)());
    CHECK(firsts.size() == 10);

    Philox4x32 u(1, 1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x <= 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("error names prefix messages")
{
    const Error e(ErrorCode::PoleHit, "boom");
    CHECK(std::string(e.what()) == "PoleHit: boom");
    CHECK(error_name(ErrorCode::NoFiniteOptimum) == "NoFiniteOptimum");
}
