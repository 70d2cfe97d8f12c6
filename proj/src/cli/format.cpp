#include "qreset/cli.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qreset::cli {

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

namespace {

double parse_double(const std::string& s, const std::string& what)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw UsageError("invalid number '" + s + "' in " + what);
    return v;
}

std::size_t parse_count(const std::string& s)
{
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 2)
        throw UsageError("grid point count must be an integer >= 2, got '" + s + "'");
    return v;
}

} // namespace

std::vector<double> parse_grid(const std::string& text, double lo, double hi, std::size_t default_count,
                               bool logarithmic)
{
    std::size_t count = default_count;
    if (!text.empty()) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() == 1) {
            count = parse_count(parts[0]);
        } else if (parts.size() == 3) {
            lo = parse_double(parts[0], "--grid");
            hi = parse_double(parts[1], "--grid");
            count = parse_count(parts[2]);
        } else {
            throw UsageError("--grid expects N or a:b:N, got '" + text + "'");
        }
    }
    if (!(hi > lo))
        throw UsageError("grid must be strictly increasing");
    if (logarithmic && !(lo > 0.0))
        throw UsageError("logarithmic grid needs a positive lower end");

    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = logarithmic ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

} // namespace qreset::cli
