#pragma once

// Command layer behind the `qreset` executable. Each command turns a RunConfig
// into text outputs so the same code path serves the binary, the tests and
// the reproducibility checks.

#include "qreset/core.hpp"
#include "qreset/waiting_time.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qreset::cli {

enum ExitCode : int { Ok = 0, Usage = 1, Numerical = 2, AcceptanceFailure = 3 };

/// Raised for malformed user input; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    /// "jc" or the path of a Hamiltonian JSON file.
    std::string model = "jc";
    int scheme = 1;
    /// Kind followed by its parameters: exponential [r] | gamma k θ | lomax μ τ0.
    std::vector<std::string> protocol{"exponential"};
    double r = 1.0;
    double g = 0.1;
    int n = 37;
    double omega_c = 1.0;
    std::optional<double> tmax;
    /// Point count "N" or range "a:b:N".
    std::string grid;
    std::uint64_t trajectories = 100000;
    std::uint64_t seed = 42;
    unsigned workers = 1;
    std::string out;
    std::string format = "csv";
    std::vector<int> criteria;
};

struct CommandOutput {
    /// Main table (CSV) or document (JSON).
    std::string primary;
    /// JSON summary; empty when the primary output already embeds it.
    std::string summary;
    int exit_code = Ok;
    /// Diagnostic for stderr.
    std::string message;
};

/// Locale-independent shortest round-trip formatting of a double.
std::string format_number(double x);

/// "N" gives N points over [lo, hi]; "a:b:N" overrides the range. Points are
/// linear or logarithmic. UsageError on malformed or non-increasing grids.
std::vector<double> parse_grid(const std::string& text, double lo, double hi, std::size_t default_count,
                               bool logarithmic);

/// Hamiltonian JSON: {"entries": [[[re, im], [re, im]], [[re, im], [re, im]]],
/// "initial_state": "plus" | "minus"}. "minus" swaps the basis so the initial
/// state is always index 0.
TwoLevelHamiltonian load_hamiltonian(const std::string& path);
TwoLevelHamiltonian parse_hamiltonian(const std::string& json_text);

TwoLevelHamiltonian build_hamiltonian(const RunConfig& cfg);
WaitingTimeDistribution build_protocol(const RunConfig& cfg);
Scheme build_scheme(const RunConfig& cfg);

CommandOutput cmd_pdf(const RunConfig& cfg);
CommandOutput cmd_mean_sweep(const RunConfig& cfg);
CommandOutput cmd_simulate(const RunConfig& cfg);
CommandOutput cmd_asymptotics(const RunConfig& cfg);
CommandOutput cmd_optimal_rate(const RunConfig& cfg);
CommandOutput cmd_accept(const RunConfig& cfg);

/// Full program: parsing (flags, --config file, QRESET_SEED / QRESET_WORKERS),
/// dispatch, output. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qreset::cli
