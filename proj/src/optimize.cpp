#include "qreset/optimize.hpp"

#include "qreset/error.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <sstream>

namespace qreset {

Bracket::Bracket(double a, double b, double c, double fa, double fb, double fc)
    : a_(a), b_(b), c_(c), fa_(fa), fb_(fb), fc_(fc)
{
    if (!(a < b && b < c) || !(fb < std::min(fa, fc))) {
        std::ostringstream msg;
        msg.imbue(std::locale::classic());
        msg << "(" << a << ", " << b << ", " << c << ") with values (" << fa << ", " << fb << ", " << fc
            << ") is not a minimum bracket";
        throw Error(ErrorCode::BracketInvalid, msg.str());
    }
}

Bracket Bracket::evaluate(const ScalarFunction& f, double a, double b, double c)
{
    return Bracket(a, b, c, f(a), f(b), f(c));
}

MinimizeResult minimize_scalar(const ScalarFunction& f, const Bracket& bracket, double tol)
{
    if (!(tol >= 1e-12))
        throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 1e-12");
    constexpr double kInvPhi = 0.6180339887498949;
    constexpr int kMaxEvaluations = 200;

    double a = bracket.a();
    double c = bracket.c();
    double best_x = bracket.b();
    double best_f = bracket.fb();
    double x1 = c - kInvPhi * (c - a);
    double x2 = a + kInvPhi * (c - a);
    double f1 = f(x1);
    double f2 = f(x2);
    int evals = 2;

    auto track = [&](double x, double fx) {
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    };
    track(x1, f1);
    track(x2, f2);

    while (c - a > tol * std::abs(0.5 * (a + c)) && evals < kMaxEvaluations) {
        if (f1 < f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - kInvPhi * (c - a);
            f1 = f(x1);
            track(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (c - a);
            f2 = f(x2);
            track(x2, f2);
        }
        ++evals;
    }
    return {best_x, best_f, evals};
}

Bracket find_bracket(const ScalarFunction& f, double x_init, double growth)
{
    if (!(x_init > 0.0) || !(growth > 1.0))
        throw Error(ErrorCode::InvalidArgument, "bracket search needs x_init > 0 and growth > 1");
    constexpr int kMaxSteps = 60;
    double x0 = x_init;
    double x1 = x_init * growth;
    double f0 = f(x0);
    double f1 = f(x1);
    // Walk in the descending direction; step > 1 moves up, step < 1 moves down.
    const double step = f1 <= f0 ? growth : 1.0 / growth;
    if (step < 1.0) {
        std::swap(x0, x1);
        std::swap(f0, f1);
    }
    for (int i = 0; i < kMaxSteps; ++i) {
        const double x2 = x1 * step;
        const double f2 = f(x2);
        if (!std::isfinite(f2))
            break;
        if (f2 > f1) {
            if (step > 1.0)
                return Bracket(x0, x1, x2, f0, f1, f2);
            return Bracket(x2, x1, x0, f2, f1, f0);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    throw Error(ErrorCode::MonotoneFunction, "no interior minimum found by geometric expansion");
}

std::vector<double> log_grid(double lo, double hi, int points)
{
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw Error(ErrorCode::InvalidArgument, "log grid needs 0 < lo < hi and at least two points");
    std::vector<double> out(static_cast<std::size_t>(points));
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    out.back() = hi;
    return out;
}

Bracket validate_unimodal(const ScalarFunction& f, double lo, double hi, int points)
{
    const auto xs = log_grid(lo, hi, points);
    std::vector<double> fs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        fs[i] = f(xs[i]);
    const auto it = std::min_element(fs.begin(), fs.end());
    const auto k = static_cast<std::size_t>(it - fs.begin());
    if (k == 0 || k + 1 == fs.size())
        throw Error(ErrorCode::BracketFailure, "minimum sits on the edge of the search interval");
    for (std::size_t i = 1; i < fs.size(); ++i) {
        const bool ok = i <= k ? fs[i] < fs[i - 1] : fs[i] > fs[i - 1];
        if (!ok)
            throw Error(ErrorCode::BracketFailure, "sampled function is not unimodal");
    }
    return Bracket(xs[k - 1], xs[k], xs[k + 1], fs[k - 1], fs[k], fs[k + 1]);
}

} // namespace qreset
