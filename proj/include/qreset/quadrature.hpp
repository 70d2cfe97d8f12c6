#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature for real- or
// complex-valued integrands on a finite interval.

#include "qreset/error.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

namespace qreset {

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 50000;
    /// Equal panels the interval is cut into before adaptivity starts.
    std::size_t initial_intervals = 1;
    bool throw_on_failure = true;
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kronrod_nodes{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kronrod_weights{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715224760006, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> gauss_weights{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T>
double magnitude(const T& v)
{
    return std::abs(v);
}

template <class T, class F>
Panel<T> gauss_kronrod(F& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T kronrod = f(centre) * kronrod_weights[10];
    T gauss{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kronrod_nodes[j];
        const T pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * kronrod_weights[j];
        if (j % 2 == 1)
            gauss += pair * gauss_weights[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}

} // namespace detail

/// Integrates f over [a, b]. The result type follows f's return type.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>>
{
    using T = std::decay_t<decltype(f(a))>;
    QuadratureResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double err = 0.0;
    const std::size_t pieces = std::max<std::size_t>(1, opt.initial_intervals);
    const double width = (b - a) / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = i + 1 == pieces ? b : lo + width;
        auto p = detail::gauss_kronrod<T>(f, lo, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    out.evaluations = 21 * pieces;

    auto done = [&] { return err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };

    while (!done() && heap.size() < opt.max_intervals) {
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break; // interval exhausted at machine precision
        heap.pop();
        auto left = detail::gauss_kronrod<T>(f, worst.a, mid);
        auto right = detail::gauss_kronrod<T>(f, mid, worst.b);
        out.evaluations += 42;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    total = T{};
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    out.converged = done();
    if (!out.converged && opt.throw_on_failure) {
        std::ostringstream msg;
        msg << "adaptive quadrature on [" << a << ", " << b << "] reached error " << err
            << " (requested abs " << opt.abs_tol << ", rel " << opt.rel_tol << ")";
        throw Error(ErrorCode::QuadratureFailure, msg.str());
    }
    return out;
}

} // namespace qreset
