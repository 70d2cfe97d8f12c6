#include "qreset/acceptance.hpp"
#include "qreset/cli.hpp"
#include "qreset/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace qreset::cli {

namespace {

template <class T>
T env_number(const char* name, T min_value)
{
    const char* raw = std::getenv(name);
    const std::string s = raw ? raw : "";
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < min_value)
        throw UsageError(std::string("invalid value '") + s + "' in " + name);
    return v;
}

void apply_environment(RunConfig& cfg)
{
    if (std::getenv("QRESET_SEED"))
        cfg.seed = env_number<std::uint64_t>("QRESET_SEED", 0);
    if (std::getenv("QRESET_WORKERS"))
        cfg.workers = env_number<unsigned>("QRESET_WORKERS", 1);
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonHermitian:
    case ErrorCode::NegativeTime:
    case ErrorCode::InvalidMu:
        return Usage;
    default:
        return Numerical;
    }
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw UsageError("cannot write '" + path + "'");
    f << text;
    if (!f)
        throw UsageError("failed writing '" + path + "'");
}

} // namespace

CommandOutput cmd_accept(const RunConfig& cfg)
{
    acceptance::Options opt;
    opt.seed = cfg.seed;
    opt.workers = cfg.workers;
    opt.only = cfg.criteria;
    const auto results = acceptance::run_all(opt);
    CommandOutput out;
    bool all = true;
    if (cfg.format == "json") {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto& r : results) {
            doc.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail},
                           {"seconds", r.seconds}});
            all = all && r.passed;
        }
        out.primary = doc.dump(2) + "\n";
    } else {
        for (const auto& r : results) {
            out.primary += acceptance::format_line(r) + "\n";
            all = all && r.passed;
        }
    }
    if (!all) {
        out.exit_code = AcceptanceFailure;
        out.message = "acceptance failure\n";
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"First-detection-time statistics of two-level systems under random projective measurements"};
    app.set_config("--config", "", "TOML or INI file with any of the options below");
    app.require_subcommand(1, 1);
    app.fallthrough();

    RunConfig cfg;
    double tmax = 0.0;
    app.add_option("--model", cfg.model, "jc or a Hamiltonian JSON file")->capture_default_str();
    app.add_option("--scheme", cfg.scheme, "detection scheme")->check(CLI::IsMember({1, 2}))->capture_default_str();
    app.add_option("--protocol", cfg.protocol, "exponential [r] | gamma k theta | lomax mu tau0")
        ->expected(1, 3)
        ->capture_default_str();
    app.add_option("--r", cfg.r, "Poisson measurement rate")->capture_default_str();
    app.add_option("--g", cfg.g, "JC coupling")->capture_default_str();
    app.add_option("--n", cfg.n, "JC excitation sector")->capture_default_str();
    app.add_option("--omega-c", cfg.omega_c, "JC cavity frequency")->capture_default_str();
    auto* tmax_opt = app.add_option("--tmax", tmax, "end of the time grid (pdf) or censoring horizon (simulate)");
    app.add_option("--grid", cfg.grid, "N or a:b:N (pdf: times, mean-sweep: log-spaced rates, simulate: bins)");
    app.add_option("--trajectories", cfg.trajectories, "Monte Carlo trajectories")->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed (QRESET_SEED overrides)")->capture_default_str();
    app.add_option("--workers", cfg.workers, "worker threads (QRESET_WORKERS overrides)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output file; summaries go to <out>.summary.json");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--criteria", cfg.criteria, "accept: criterion ids to run (default all)")
        ->check(CLI::Range(1, acceptance::kCriterionCount));

    struct Command {
        const char* name;
        const char* help;
        CommandOutput (*fn)(const RunConfig&);
    };
    const Command commands[] = {
        {"pdf", "first-detection PDF on a time grid", cmd_pdf},
        {"mean-sweep", "mean, variance and t_m over a rate grid", cmd_mean_sweep},
        {"simulate", "Monte Carlo ensemble with comparison report", cmd_simulate},
        {"asymptotics", "small-t and large-t laws", cmd_asymptotics},
        {"optimal-rate", "rates minimizing the mean and t_m", cmd_optimal_rate},
        {"accept", "run the acceptance suite", cmd_accept},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands)
        subs.push_back(app.add_subcommand(c.name, c.help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (tmax_opt->count() > 0)
            cfg.tmax = tmax;
        apply_environment(cfg);
        CommandOutput result;
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed())
                result = commands[i].fn(cfg);

        if (cfg.out.empty()) {
            out << result.primary;
            err << result.summary;
        } else {
            write_file(cfg.out, result.primary);
            if (!result.summary.empty())
                write_file(cfg.out + ".summary.json", result.summary);
        }
        out.flush();
        err << result.message;
        return result.exit_code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Numerical;
    }
}

} // namespace qreset::cli
