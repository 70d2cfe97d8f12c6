#include "qreset/cli.hpp"
#include "qreset/twolevel.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

using namespace qreset;
using namespace qreset::cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "qreset");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name)
{
    const char* dir = std::getenv("QRESET_TEST_TMP");
    return (dir ? std::filesystem::path(dir) : std::filesystem::temp_directory_path()) / name;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

// Decimal comma and digit grouping, to catch locale-dependent formatting.
struct CommaPunct : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
    char do_thousands_sep() const override { return '.'; }
    std::string do_grouping() const override { return "\3"; }
};

struct EnvGuard {
    explicit EnvGuard(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
    ~EnvGuard() { ::unsetenv(name_); }
    const char* name_;
};

} // namespace

TEST_CASE("number formatting")
{
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1234567.0) == "1234567");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("grid parsing")
{
    CHECK(parse_grid("", 0.0, 1.0, 3, false) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(parse_grid("2:4:3", 0.0, 1.0, 10, false) == std::vector<double>{2.0, 3.0, 4.0});
    const auto lg = parse_grid("3", 0.01, 100.0, 10, true);
    REQUIRE(lg.size() == 3);
    CHECK(lg[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_grid("4:2:3", 0.0, 1.0, 3, false), UsageError);
    CHECK_THROWS_AS(parse_grid("abc", 0.0, 1.0, 3, false), UsageError);
    CHECK_THROWS_AS(parse_grid("1", 0.0, 1.0, 3, false), UsageError);
}

TEST_CASE("pdf CSV layout")
{
    const auto r = invoke({"pdf", "--grid", "0:2:5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,pdf\n", 0) == 0);
    CHECK(r.out.find('\r') == std::string::npos);
    CHECK(r.out.back() == '\n');
    int lines = 0;
    for (char c : r.out)
        lines += c == '\n';
    CHECK(lines == 6);
    CHECK(r.out.find("\n0.5,") != std::string::npos);
    const auto summary = nlohmann::json::parse(r.err);
    CHECK(summary["mean"].get<double>() == doctest::Approx(3.351351).epsilon(1e-6));
}

TEST_CASE("CSV output does not depend on the global locale")
{
    const std::vector<std::vector<std::string>> commands{
        {"mean-sweep", "--grid", "5"},
        {"pdf", "--grid", "0.5:2.5:5", "--r", "1234.5"},
        {"simulate", "--trajectories", "20000", "--tmax", "2", "--grid", "4"},
        {"asymptotics", "--protocol", "lomax", "2.5", "1000"}};
    for (const auto& args : commands) {
        const auto before = invoke(args);
        const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaPunct));
        const auto after = invoke(args);
        std::locale::global(saved);
        CHECK(after.code == before.code);
        CHECK(after.out == before.out);
        CHECK(after.err == before.err);
    }
}

TEST_CASE("JSON format embeds the summary")
{
    const auto r = invoke({"pdf", "--format", "json", "--grid", "0:1:3", "--scheme", "2"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["t"].size() == 3);
    CHECK(doc["pdf"][0].get<double>() == doctest::Approx(1.0));
    CHECK(doc["summary"]["scheme"] == 2);
}

TEST_CASE("exit codes")
{
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"pdf", "--scheme", "3"}).code == 1);
    CHECK(invoke({"pdf", "--r", "abc"}).code == 1);
    CHECK(invoke({"pdf", "--g", "-1"}).code == 1);
    CHECK(invoke({"pdf", "--protocol", "weibull"}).code == 1);
    CHECK(invoke({"pdf", "--format", "xml"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({"asymptotics", "--protocol", "lomax", "2", "1"}).code == 2);
    const auto censored = invoke({"simulate", "--trajectories", "2000", "--tmax", "2", "--grid", "4"});
    CHECK(censored.code == 3);
    CHECK(censored.err.find("CutoffTooSmall") != std::string::npos);
    CHECK(invoke({"accept", "--criteria", "4"}).code == 0);
    CHECK(invoke({"accept", "--criteria", "13"}).code == 1);
}

TEST_CASE("asymptotics of a light-tailed protocol is not an error")
{
    const auto r = invoke({"asymptotics", "--protocol", "gamma", "2", "0.5", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["tail_form"].is_null());
}

TEST_CASE("simulate is deterministic and honours environment overrides")
{
    const std::vector<std::string> args{"simulate", "--trajectories", "5000", "--grid", "20", "--seed", "3"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    {
        EnvGuard workers("QRESET_WORKERS", "3");
        CHECK(invoke(args).out == a.out);
    }
    {
        EnvGuard seed("QRESET_SEED", "4");
        const auto c = invoke(args);
        CHECK(c.out != a.out);
        CHECK(nlohmann::json::parse(c.err)["seed"] == 4);
    }
    {
        EnvGuard bad("QRESET_SEED", "12x");
        CHECK(invoke(args).code == 1);
    }
    {
        EnvGuard bad("QRESET_WORKERS", "0");
        CHECK(invoke(args).code == 1);
    }
}

TEST_CASE("--out writes the table and a summary file")
{
    const std::string path = temp_path("cli_pdf.csv");
    const auto r = invoke({"pdf", "--grid", "4", "--tmax", "3", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string table = slurp(path);
    CHECK(table.rfind("t,pdf\n", 0) == 0);
    const auto summary = nlohmann::json::parse(slurp(path + ".summary.json"));
    CHECK(summary["command"] == "pdf");
}

TEST_CASE("configuration file")
{
    const std::string path = temp_path("cli_config.toml");
    spit(path, "r = 0.5\nscheme = 2\ngrid = \"0:1:2\"\n");
    const auto r = invoke({"pdf", "--config", path});
    REQUIRE(r.code == 0);
    CHECK(r.out == "t,pdf\n0,0.5\n" + std::string("1,") + r.out.substr(r.out.rfind(',') + 1));
    CHECK(nlohmann::json::parse(r.err)["scheme"] == 2);
}

TEST_CASE("Hamiltonian files")
{
    const auto parsed = parse_hamiltonian(R"({"entries": [[[36.5, 0], [0.6082762530298219, 0]],
                                                          [[0.6082762530298219, 0], [36.5, 0]]]})");
    CHECK(sigma_squared(parsed) == doctest::Approx(0.37));

    const auto swapped = parse_hamiltonian(R"({"entries": [[[1, 0], [0, 0.5]], [[0, -0.5], [-1, 0]]],
                                               "initial_state": "minus"})");
    CHECK(swapped.entry(0, 0).real() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(parse_hamiltonian(R"({"entries": [[[1, 0]]]})"), UsageError);
    CHECK_THROWS_AS(parse_hamiltonian("not json"), UsageError);

    const std::string path = temp_path("cli_h.json");
    spit(path, R"({"entries": [[[0.3, 0], [0.25, -0.4]], [[0.25, 0.4], [-0.1, 0]]]})");
    const auto r = invoke({"mean-sweep", "--model", path, "--grid", "0.5:2:2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("r,mean", 0) == 0);
    CHECK(invoke({"pdf", "--model", temp_path("missing.json")}).code == 1);
}
