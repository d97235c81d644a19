#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using psseq::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string &name)
{
    auto p = fs::temp_directory_path() / ("psseq_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_kind(const std::string &err)
{
    return nlohmann::json::parse(err).at("error").get<std::string>();
}

} // namespace

TEST_CASE("gen writes the window")
{
    ::unsetenv("PSSEQ_OUTPUT_DIR");
    const auto r = call({"gen", "--alpha", "3/2", "--limit", "31"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,m\n1,1\n2,2\n3,5\n4,8\n5,11\n6,14\n7,18\n8,22\n9,27\n10,31\n");
}

TEST_CASE("member prints a boolean")
{
    auto r = call({"member", "--alpha", "3/2", "--m", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "false\n");
    r = call({"member", "--alpha", "3/2", "--m", "27"});
    CHECK(r.out == "true\n");
}

TEST_CASE("validation failures exit 2 with a JSON error")
{
    auto r = call({"gen", "--alpha", "2", "--limit", "10"});
    CHECK(r.code == 2);
    CHECK(error_kind(r.err) == "DomainError");
    r = call({"gen", "--alpha", "1.5", "--limit", "10"});
    CHECK(r.code == 2);
    r = call({"gen", "--limit", "10"});
    CHECK(r.code == 2);
    CHECK(error_kind(r.err) == "UsageError");
    r = call({"nonsense"});
    CHECK(r.code == 2);
    r = call({"measure", "--kind", "sets", "--a", "1/4", "--theta1", "3/10", "--theta2", "7/10"});
    CHECK(r.code == 2);
    r = call({"gen", "--alpha", "3/2", "--limit", "10", "--config", "/nonexistent.json"});
    CHECK(r.code == 2);
}

TEST_CASE("precision exhaustion exits 3")
{
    const auto r = call({"cf", "--x", "pi", "--terms", "500", "--start-bits", "64", "--max-bits", "64"});
    CHECK(r.code == 3);
    CHECK(error_kind(r.err) == "PrecisionExhausted");
    CHECK(call({"member", "--alpha", "3/2", "--m", "27", "--start-bits", "2"}).code == 2);
}

TEST_CASE("out-dir writes every artifact; workers do not change bytes")
{
    const auto d1 = scratch("w1");
    const auto d8 = scratch("w8");
    const std::vector<std::string> base{"solve-linear", "--alpha", "3/2", "--a", "2", "--n-max", "20000"};
    auto a1 = base;
    a1.insert(a1.end(), {"--workers", "1", "--out-dir", d1.string()});
    auto a8 = base;
    a8.insert(a8.end(), {"--workers", "8", "--out-dir", d8.string()});
    REQUIRE(call(a1).code == 0);
    REQUIRE(call(a8).code == 0);
    for (const auto *name : {"solutions.csv", "solve_linear.json"}) {
        REQUIRE(fs::exists(d1 / name));
        CHECK(slurp(d1 / name) == slurp(d8 / name));
    }
    CHECK(slurp(d1 / "solutions.csv").rfind("n,x,k,y\n", 0) == 0);
    fs::remove_all(d1);
    fs::remove_all(d8);
}

TEST_CASE("output directory from the environment")
{
    const auto d = scratch("env");
    ::setenv("PSSEQ_OUTPUT_DIR", d.string().c_str(), 1);
    const auto r = call({"cf", "--x", "pi", "--terms", "5"});
    ::unsetenv("PSSEQ_OUTPUT_DIR");
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "cf.csv"));
    CHECK(fs::exists(d / "cf.json"));
    CHECK(slurp(d / "cf.csv").find("4,292,103993,33102") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("config keys override flags")
{
    const auto d = scratch("cfg");
    {
        std::ofstream f(d / "c.json");
        f << R"({"command": "gen", "alpha": "3/2", "limit": 8})";
    }
    auto r = call({"--config", (d / "c.json").string(), "--limit", "31"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,m\n1,1\n2,2\n3,5\n4,8\n");
    {
        std::ofstream f(d / "e.json");
        f << R"({"n": [10, 20], "a": "1/4", "gamma": "2"})";
    }
    r = call({"equidist", "--config", (d / "e.json").string(), "--n", "1000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n10,") != std::string::npos);
    CHECK(r.out.find("\n1000,") == std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("measure kinds")
{
    auto r = call({"measure", "--kind", "sets", "--a", "1/16", "--theta1", "3/10", "--theta2", "9/10", "--n", "10"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["E"]["components"] == 7);
    CHECK(j["E"]["measure"].get<double>() == doctest::Approx(0.12).epsilon(1e-12));
    r = call({"measure", "--kind", "triples", "--triple-q", "10", "--triple-p", "3"});
    CHECK(r.code == 0);
    r = call({"measure", "--kind", "hsum", "--a", "1/4", "--theta3", "3/5", "--h-max", "1000"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("N,measure_H", 0) == 0);
}

TEST_CASE("dichotomy and fs3")
{
    auto r = call({"dichotomy", "--a", "1/4", "--i-hi", "1/2", "--thetas", "3/10", "7/10", "--budget", "2000"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("theta,side,hits,skipped,largest_n", 0) == 0);
    r = call({"fs3", "--alpha", "3/2", "--bound", "100000"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["found"] == true);
    CHECK(j["verified"] == true);
}
