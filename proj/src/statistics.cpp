#include "qreset/statistics.hpp"

#include "qreset/error.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace qreset {

namespace {

// ∫_a^b t^{-alpha} dt
double power_integral(double a, double b, double alpha)
{
    if (std::abs(alpha - 1.0) < 1e-12)
        return std::log(b / a);
    return (std::pow(a, 1.0 - alpha) - std::pow(b, 1.0 - alpha)) / (alpha - 1.0);
}

} // namespace

PowerLawFit fit_power_law_tail(const LogHistogram& hist, std::uint64_t n_total, double t_lo,
                               std::optional<double> fixed_exponent)
{
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> counts;
    double total = 0.0;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        if (hist.edges[k] < t_lo)
            continue;
        lo.push_back(hist.edges[k]);
        hi.push_back(hist.edges[k + 1]);
        counts.push_back(static_cast<double>(hist.counts[k]));
        total += counts.back();
    }
    if (total < 10.0)
        throw Error(ErrorCode::InvalidArgument, "too few detections in the tail window");

    auto norm = [&](double alpha) {
        double s = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k)
            s += power_integral(lo[k], hi[k], alpha);
        return s;
    };
    auto neg_loglik = [&](double alpha) {
        const double z = norm(alpha);
        double ll = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (counts[k] > 0.0)
                ll += counts[k] * std::log(power_integral(lo[k], hi[k], alpha) / z);
        return -ll;
    };

    PowerLawFit fit;
    fit.samples = static_cast<std::uint64_t>(total);
    if (fixed_exponent) {
        fit.exponent = *fixed_exponent;
    } else {
        const auto best = boost::math::tools::brent_find_minima(neg_loglik, 1.01, 12.0, 40);
        fit.exponent = best.first;
    }
    fit.amplitude = total / (static_cast<double>(n_total) * norm(fit.exponent));
    return fit;
}

double fit_small_t_coefficient(std::span<const double> samples, std::uint64_t n_total, int order, double t_max,
                               int terms, int bins)
{
    if (terms < 1 || bins < terms + 1 || !(t_max > 0.0) || n_total == 0)
        throw Error(ErrorCode::InvalidArgument, "invalid small-t fit settings");
    const double h = t_max / bins;
    Eigen::VectorXd observed = Eigen::VectorXd::Zero(bins);
    for (double t : samples) {
        if (t < t_max)
            observed[std::min(bins - 1, static_cast<int>(t / h))] += 1.0;
    }
    const double n = static_cast<double>(n_total);
    Eigen::MatrixXd design(bins, terms);
    for (int b = 0; b < bins; ++b) {
        for (int k = 0; k < terms; ++k) {
            const double p = order + k + 1.0;
            design(b, k) = n * (std::pow((b + 1) * h, p) - std::pow(b * h, p)) / p;
        }
    }

    // Inverse-variance weights from the current model; the first pass uses the
    // observed counts.
    Eigen::VectorXd variance = observed.cwiseMax(1.0);
    Eigen::VectorXd coef;
    for (int pass = 0; pass < 4; ++pass) {
        const Eigen::VectorXd w = variance.cwiseInverse().cwiseSqrt();
        coef = (w.asDiagonal() * design).colPivHouseholderQr().solve(w.cwiseProduct(observed));
        variance = (design * coef).cwiseMax(1.0);
    }
    return coef[0];
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean)
{
    if (!(mean > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Poisson mean must be > 0");
    double total = 0.0;
    for (auto c : counts)
        total += static_cast<double>(c);
    if (total <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "no counts");
    const boost::math::poisson_distribution<double> dist(mean);

    std::vector<double> obs;
    std::vector<double> exp;
    double class_obs = 0.0;
    double class_exp = 0.0;
    double used_obs = 0.0;
    double used_exp = 0.0;
    for (std::size_t k = 0;; ++k) {
        class_obs += k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
        class_exp += total * boost::math::pdf(dist, static_cast<double>(k));
        const double rest_exp = total - used_exp - class_exp;
        if (class_exp >= 5.0 && rest_exp >= 5.0) {
            obs.push_back(class_obs);
            exp.push_back(class_exp);
            used_obs += class_obs;
            used_exp += class_exp;
            class_obs = class_exp = 0.0;
        } else if (rest_exp < 5.0) {
            // Everything from here on forms the final class.
            obs.push_back(total - used_obs);
            exp.push_back(total - used_exp);
            break;
        }
    }

    ChiSquareResult res;
    for (std::size_t i = 0; i < obs.size(); ++i)
        res.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    res.dof = static_cast<int>(obs.size()) - 1;
    res.p_value = res.dof > 0 ? boost::math::gamma_q(0.5 * res.dof, 0.5 * res.statistic) : 1.0;
    return res;
}

double ks_statistic(std::span<const double> sorted, std::uint64_t n_total, const std::function<double(double)>& cdf)
{
    const double n = static_cast<double>(n_total);
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(static_cast<double>(i) / n - f)});
    }
    return d;
}

double ks_critical_1pct(std::uint64_t n)
{
    return 1.628 / std::sqrt(static_cast<double>(n));
}

} // namespace qreset
