#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "recdev/cli.hpp"
#include "recdev/law_io.hpp"

using namespace recdev;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> const& args) {
    std::ostringstream out;
    std::ostringstream err;
    int const code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

/// Data lines of a CSV artifact (provenance comments dropped).
std::vector<std::string> csv_rows(std::string const& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> split(std::string const& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    return cells;
}

std::filesystem::path temp_file(std::string const& name, std::string const& content) {
    auto const path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

/// Runs the built executable through the shell; stdout only.
Outcome run_binary(std::string const& args) {
    std::string const cmd = std::string(RECDEV_BINARY) + " " + args + " 2>/dev/null";
    Outcome o;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, "", ""};
    std::array<char, 4096> buf{};
    for (std::size_t got; (got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) o.out.append(buf.data(), got);
    int const status = ::pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

}  // namespace

TEST(Cli, RateLdpBoundary) {
    Outcome const o = run_cli({"rate", "ldp", "--law", "ssrw_right", "--x", "1"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    auto const rows = csv_rows(o.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "regime,side,x,value,exponent_n,exponent_cn");
    auto const cells = split(rows[1]);
    EXPECT_NEAR(std::stod(cells[3]), std::log(2.0), 1e-15);
    EXPECT_NE(o.out.find("# recdev 0.1.0"), std::string::npos);
    EXPECT_NE(o.out.find("# law: {"), std::string::npos);
}

TEST(Cli, RateLdpInterior) {
    Outcome const o = run_cli({"rate", "ldp", "--law", "ssrw_right", "--x", "0.5", "--format", "json"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    json const doc = json::parse(o.out);
    EXPECT_NEAR(doc.at("value").get<double>(), 0.051193773367981845, 1e-12);
    EXPECT_EQ(doc.at("provenance").at("command"), "rate ldp");
}

TEST(Cli, RateMdpSimpleWalk) {
    Outcome const o = run_cli({"rate", "mdp", "--law", "ssrw_left", "--x", "1", "--format", "json"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    json const doc = json::parse(o.out);
    EXPECT_NEAR(doc.at("value").get<double>(), 0.125, 1e-12);
    EXPECT_EQ(doc.at("threshold_exponents"), json::array({0.5, 0.5}));
    EXPECT_EQ(doc.at("regime"), "MDP");
}

TEST(Cli, RateMdpFitReportsSource) {
    Outcome const o = run_cli({"rate", "mdp", "--law", "stable:0.6:0.5:right", "--x", "1", "--fit"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    EXPECT_NE(o.out.find("Fitted"), std::string::npos) << o.out;
}

TEST(Cli, DistTwoSteps) {
    Outcome const o = run_cli({"dist", "--law", "ssrw_right", "--n", "2"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    auto const rows = csv_rows(o.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "k,mantissa,exponent2,probability");
    EXPECT_EQ(split(rows[1])[3], "1");
    EXPECT_EQ(split(rows[2])[3], "0.75");
    EXPECT_EQ(split(rows[3])[3], "0.25");
}

TEST(Cli, DistBelowDoubleRange) {
    Outcome const o = run_cli({"dist", "--law", "ssrw_right", "--n", "1500", "--format", "json"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    json const doc = json::parse(o.out);
    json const& last = doc.at("tail").back();
    EXPECT_EQ(last.at("k"), 1500);
    EXPECT_EQ(last.at("mantissa"), 0.5);
    EXPECT_EQ(last.at("exponent2"), -1499);
}

TEST(Cli, TableConvergence) {
    Outcome const o = run_cli({"table", "ldp-convergence", "--law", "ssrw_right", "--x", "1", "--n-list", "10,20"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    auto const rows = csv_rows(o.out);
    ASSERT_EQ(rows.size(), 3u);
    auto const first = split(rows[1]);
    EXPECT_EQ(first[0], "10");
    EXPECT_EQ(first[1], "10");
}

TEST(Cli, SimulateJson) {
    Outcome const o =
        run_cli({"simulate", "--law", "skewed_right", "--n", "30", "--paths", "2000", "--seed", "4", "--format", "json"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    json const doc = json::parse(o.out);
    EXPECT_EQ(doc.at("paths"), 2000);
    EXPECT_EQ(doc.at("violations"), 0);
    json const& est = doc.at("estimates");
    ASSERT_EQ(est.size(), 31u);
    EXPECT_EQ(est.front().at("tail"), 1.0);
    std::uint64_t total = 0;
    for (auto const& e : est) {
        total += e.at("count").get<std::uint64_t>();
        EXPECT_LE(e.at("lower").get<double>(), e.at("tail").get<double>());
        EXPECT_GE(e.at("upper").get<double>(), e.at("tail").get<double>());
    }
    EXPECT_EQ(total, 2000u);
    EXPECT_LT(doc.at("tv_distance").get<double>(), 0.1);
}

TEST(Cli, SimulateIndependentOfWorkers) {
    std::vector<std::string> base{"simulate", "--law", "stable:0.6:0.5:left", "--n", "50", "--paths", "3000", "--seed", "8"};
    auto with = [&](std::string const& w) {
        auto args = base;
        args.insert(args.end(), {"--workers", w});
        return run_cli(args).out;
    };
    std::string const one = with("1");
    std::string const three = with("3");
    // Provenance records the worker request; the data rows must match.
    EXPECT_EQ(csv_rows(one), csv_rows(three));
}

TEST(Cli, ValidateEmitJsonRoundTrip) {
    Outcome const o = run_cli({"validate", "--law", "skewed_left", "--emit-json"});
    ASSERT_EQ(o.code, cli::kExitOk) << o.err;
    auto const path = temp_file("recdev_round_trip.json", o.out);
    StepLaw const back = load_law(path.string());
    EXPECT_EQ(back, builtin_law("skewed_left"));
    Outcome const again = run_cli({"validate", "--law", path.string(), "--emit-json"});
    EXPECT_EQ(again.out, o.out);
    std::filesystem::remove(path);
}

TEST(Cli, ValidationErrorsExitThree) {
    auto const drift = temp_file("recdev_drift.json", R"({"side":"right","q":0.5,"p":[0.5]})");
    Outcome const o = run_cli({"validate", "--law", drift.string()});
    EXPECT_EQ(o.code, cli::kExitValidation);
    EXPECT_NE(o.err.find("NotCritical"), std::string::npos) << o.err;
    std::filesystem::remove(drift);

    auto const bad = temp_file("recdev_bad.json", R"({"side":"up","q":0.5,"p":[0.0,0.5]})");
    EXPECT_EQ(run_cli({"validate", "--law", bad.string()}).code, cli::kExitValidation);
    std::filesystem::remove(bad);

    EXPECT_EQ(run_cli({"validate", "--law", "no_such_law"}).code, cli::kExitValidation);
    EXPECT_EQ(run_cli({"rate", "mdp", "--law", "stable:1.5:0.5:left", "--x", "1"}).code, cli::kExitValidation);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"rate", "ldp", "--law", "ssrw_right"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"rate", "ldp", "--law", "ssrw_right", "--x", "abc"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"dist", "--law", "ssrw_right", "--n", "2", "--format", "xml"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"dist", "--law", "ssrw_right", "--n", "10001"}).code, cli::kExitUsage);
    Outcome const o = run_cli({"rate", "lpd", "--law", "ssrw_right", "--x", "1"});
    EXPECT_EQ(o.code, cli::kExitUsage);
    EXPECT_FALSE(o.err.empty());
}

TEST(Cli, OutputFile) {
    auto const path = std::filesystem::temp_directory_path() / "recdev_out.csv";
    Outcome const o = run_cli({"dist", "--law", "ssrw_right", "--n", "3", "-o", path.string()});
    ASSERT_EQ(o.code, cli::kExitOk);
    EXPECT_TRUE(o.out.empty());
    std::ifstream in(path);
    std::string const text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, run_cli({"dist", "--law", "ssrw_right", "--n", "3"}).out);
    std::filesystem::remove(path);
}

TEST(Cli, VerifyQuick) {
    auto const start = std::chrono::steady_clock::now();
    Outcome const o = run_cli({"verify", "--law", "skewed_right", "--quick"});
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(o.code, cli::kExitOk) << o.out;
    EXPECT_NE(o.out.find(", 0 failed"), std::string::npos) << o.out;
    EXPECT_EQ(o.out.find("FAIL "), std::string::npos) << o.out;
    EXPECT_LT(secs, 60.0);
}

TEST(Binary, ByteStableAcrossRuns) {
    std::string const args = "simulate --law stable:0.6:0.5:right --n 40 --paths 500 --seed 12 --format json";
    Outcome const a = run_binary(args);
    Outcome const b = run_binary(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
    Outcome const d1 = run_binary("dist --law skewed_left --n 200");
    EXPECT_EQ(d1.out, run_binary("dist --law skewed_left --n 200").out);
    EXPECT_EQ(d1.out, run_cli({"dist", "--law", "skewed_left", "--n", "200"}).out);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_binary("--version").code, 0);
    EXPECT_EQ(run_binary("frobnicate").code, 2);
    EXPECT_EQ(run_binary("validate --law no_such_law").code, 3);
    EXPECT_EQ(run_binary("rate ldp --law ssrw_right --x 1").code, 0);
}
