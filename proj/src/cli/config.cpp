#include "qreset/cli.hpp"

#include "qreset/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace qreset::cli {

namespace {

double protocol_param(const RunConfig& cfg, std::size_t i)
{
    const std::string& s = cfg.protocol.at(i);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw UsageError("invalid protocol parameter '" + s + "'");
    return v;
}

} // namespace

TwoLevelHamiltonian parse_hamiltonian(const std::string& json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("Hamiltonian file is not valid JSON: ") + e.what());
    }
    Matrix2 m{};
    try {
        const auto& entries = doc.at("entries");
        if (!entries.is_array() || entries.size() != 2)
            throw UsageError("\"entries\" must be a 2x2 array");
        for (std::size_t i = 0; i < 2; ++i) {
            if (!entries[i].is_array() || entries[i].size() != 2)
                throw UsageError("\"entries\" must be a 2x2 array");
            for (std::size_t j = 0; j < 2; ++j) {
                const auto& e = entries[i][j];
                if (!e.is_array() || e.size() != 2)
                    throw UsageError("each entry must be a [re, im] pair");
                m[i][j] = Complex{e[0].get<double>(), e[1].get<double>()};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed Hamiltonian file: ") + e.what());
    }

    const std::string initial = doc.value("initial_state", std::string("plus"));
    if (initial == "minus") {
        std::swap(m[0][0], m[1][1]);
        std::swap(m[0][1], m[1][0]);
    } else if (initial != "plus") {
        throw UsageError("initial_state must be \"plus\" or \"minus\"");
    }
    return make_hamiltonian(m);
}

TwoLevelHamiltonian load_hamiltonian(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open Hamiltonian file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_hamiltonian(text.str());
}

TwoLevelHamiltonian build_hamiltonian(const RunConfig& cfg)
{
    if (cfg.model == "jc") {
        if (!(cfg.g > 0.0) || cfg.n < 1)
            throw UsageError("JC model needs --g > 0 and --n >= 1");
        return make_jc_hamiltonian(cfg.g, cfg.n, cfg.omega_c);
    }
    return load_hamiltonian(cfg.model);
}

WaitingTimeDistribution build_protocol(const RunConfig& cfg)
{
    if (cfg.protocol.empty())
        throw UsageError("--protocol needs a kind");
    const std::string& kind = cfg.protocol[0];
    const std::size_t nparams = cfg.protocol.size() - 1;
    try {
        if (kind == "exponential") {
            if (nparams > 1)
                throw UsageError("exponential takes at most one parameter (the rate)");
            const double rate = nparams == 1 ? protocol_param(cfg, 1) : cfg.r;
            return make_exponential(rate);
        }
        if (kind == "gamma" || kind == "lomax") {
            if (nparams != 2)
                throw UsageError(kind + " takes two parameters");
            const double a = protocol_param(cfg, 1);
            const double b = protocol_param(cfg, 2);
            return kind == "gamma" ? make_gamma(a, b) : make_lomax(a, b);
        }
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown protocol '" + kind + "' (exponential | gamma | lomax)");
}

Scheme build_scheme(const RunConfig& cfg)
{
    if (cfg.scheme == 1)
        return Scheme::One;
    if (cfg.scheme == 2)
        return Scheme::Two;
    throw UsageError("--scheme must be 1 or 2");
}

} // namespace qreset::cli
