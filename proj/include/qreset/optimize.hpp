#pragma once

// Derivative-free scalar minimization over the measurement rate.

#include <functional>
#include <vector>

namespace qreset {

using ScalarFunction = std::function<double(double)>;

/// (a, b, c) with a < b < c and f(b) < min(f(a), f(c)).
class Bracket {
public:
    /// BracketInvalid unless the defining inequality holds.
    Bracket(double a, double b, double c, double fa, double fb, double fc);
    static Bracket evaluate(const ScalarFunction& f, double a, double b, double c);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }
    double fa() const noexcept { return fa_; }
    double fb() const noexcept { return fb_; }
    double fc() const noexcept { return fc_; }

private:
    double a_, b_, c_, fa_, fb_, fc_;
};

struct MinimizeResult {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

/// Golden-section search until the bracket width falls below tol * |x|
/// (tol >= 1e-12); at most 200 evaluations of f.
MinimizeResult minimize_scalar(const ScalarFunction& f, const Bracket& bracket, double tol = 1e-10);

/// Geometric expansion from x_init (upwards or downwards, whichever
/// descends) until a bracket forms. MonotoneFunction after 60 steps.
Bracket find_bracket(const ScalarFunction& f, double x_init, double growth = 2.0);

/// Samples f on a log grid of `points` values over [lo, hi] and checks that
/// the samples strictly fall and then strictly rise. Returns a bracket around
/// the smallest sample; BracketFailure otherwise.
Bracket validate_unimodal(const ScalarFunction& f, double lo, double hi, int points = 50);

/// log-spaced grid including both end points.
std::vector<double> log_grid(double lo, double hi, int points);

} // namespace qreset
