#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "chern/cli.hpp"
#include "chern/phasediag.hpp"

using namespace chern;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "chern");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> row;
        std::istringstream fields(line);
        for (std::string field; std::getline(fields, field, ',');) row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

const std::string haldane = R"({"model": "haldane", "params": {"t2": 0.5, "phi": 1.5707963267948966, "m": 0}})";

}  // namespace

TEST_CASE("numbers print with 17 significant digits and re-parse exactly") {
    CHECK(cli::format_number(0.1) == "0.10000000000000001");
    CHECK(cli::format_number(2.0) == "2.0");
    CHECK(cli::format_number(std::nan("")) == "null");
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int trial = 0; trial < 2000; ++trial) {
        const double x = std::ldexp(mantissa(rng), exponent(rng));
        CHECK(std::stod(cli::format_number(x)) == x);
        const json doc = {{"x", x}, {"list", {x, -x, 3}}};
        CHECK(json::parse(cli::dump(doc)) == doc);
        CHECK(json::parse(cli::dump(doc, -1)) == doc);
    }
}

TEST_CASE("version and catalog") {
    const auto version = run_cli({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out == std::string(cli::version) + "\n");
    const auto listed = run_cli({"--list-models"});
    CHECK(listed.code == 0);
    const auto catalog = json::parse(listed.out);
    CHECK(catalog.size() == models::model_names().size());
    CHECK(json::parse(run_cli({"models", "list"}).out) == catalog);
}

TEST_CASE("ring subcommand") {
    const auto distances = run_cli({"ring", "--d", "1", "--op", "distances", "--limit", "12"});
    REQUIRE(distances.code == 0);
    CHECK(json::parse(distances.out)["distances"] == json({1, 2, 3, 4, 6, 7, 8, 9, 11, 12}));
    const auto shell = json::parse(run_cli({"ring", "--d", "14", "--op", "shell", "--n", "225"}).out);
    CHECK(shell["represented"] == true);
    CHECK(shell["isolated"] == false);
    CHECK(shell["points"].size() > 2);
    CHECK(json::parse(run_cli({"ring", "--d", "1", "--op", "classify", "--n", "13"}).out)["behavior"] == "split");
    CHECK(run_cli({"ring", "--d", "4", "--op", "classify", "--n", "13"}).code == cli::config_error);
    CHECK(run_cli({"ring", "--d", "1", "--op", "classify", "--n", "15"}).code == cli::config_error);
    const auto csv = csv_rows(run_cli({"ring", "--d", "3", "--op", "distances", "--limit", "6", "--format", "csv"}).out);
    CHECK(csv.front() == std::vector<std::string>{"distance"});
}

TEST_CASE("chern subcommand") {
    const auto all = run_cli({"chern", "--model-config", haldane, "--method", "all"});
    REQUIRE(all.code == 0);
    const auto report = json::parse(all.out);
    CHECK(report["value"] == -1);
    CHECK(report["unanimous"] == true);
    REQUIRE(report["runs"].size() == 3);
    for (const auto& r : report["runs"]) CHECK(r["value"] == -1);

    const auto single = json::parse(run_cli({"chern", "--model-config", haldane, "--grid", "40x40"}).out);
    CHECK(single["value"] == -1);
    CHECK(single["method"] == "berry_lattice");
    CHECK(single["diagnostics"]["grid"] == json({40, 40}));
    CHECK(single.contains("raw"));
    CHECK(single.contains("residual"));

    const auto kagome = json::parse(run_cli({"chern", "--model-config", R"({"model": "kagome"})", "--band", "2"}).out);
    CHECK(kagome["value"] == 1);
    const auto scaled = json::parse(run_cli({"chern", "--model-config", R"({"model": "bhz_square", "N": 3})", "--grid", "90"}).out);
    CHECK(scaled["value"] == 9);
}

TEST_CASE("exit codes and error stream") {
    const auto check_error = [](const Outcome& o, int code, const std::string& cls) {
        CHECK(o.code == code);
        CHECK(o.out.empty());
        const auto e = json::parse(o.err);
        CHECK(e["error"]["class"] == cls);
        CHECK(e["error"]["kind"].is_string());
        CHECK(e["error"]["message"].is_string());
    };
    check_error(run_cli({"chern", "--model-config", R"({"model": "nope"})"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", R"({"model": "haldane", "params": {"mass": 1}})"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", R"({"model": "haldane", "extra": 1})"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", R"({"model": "haldane", "N": 2})"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", "{not json"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", "/nonexistent/model.json"}), 2, "config");
    check_error(run_cli({"chern", "--model-config", haldane, "--method", "best"}), 2, "config");
    check_error(run_cli({"frobnicate"}), 2, "config");
    check_error(run_cli({"wall", "--d", "2", "--dprime", "2"}), 2, "config");
    check_error(run_cli({"scan", "--model-config", haldane, "--axis", "m:0:1"}), 2, "config");
    const auto degenerate = run_cli(
        {"chern", "--model-config", R"({"model": "haldane", "params": {"t2": 0.25, "m": 1.299038105676658}})"});
    check_error(degenerate, 3, "numeric");
    CHECK(json::parse(degenerate.err)["error"]["kind"] == "DegenerateFamily");
}

TEST_CASE("rose csv round-trips") {
    const auto out = run_cli({"rose", "--d", "1", "--dprime", "-2", "--t", "0.5"});
    REQUIRE(out.code == 0);
    const auto rows = csv_rows(out.out);
    REQUIRE(rows.front() == std::vector<std::string>{"x", "y"});
    const auto curve = phasediag::rose_curve(1, -2, 0.5);
    REQUIRE(rows.size() == curve.samples.size() + 1);
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        CHECK(std::stod(rows[i + 1][0]) == curve.samples[i].x);
        CHECK(std::stod(rows[i + 1][1]) == curve.samples[i].y);
    }
    const auto summary = json::parse(run_cli({"rose", "--d", "5", "--dprime", "7", "--t", "0.75", "--format", "json"}).out);
    CHECK(summary["winding"] == 7);
}

TEST_CASE("wall output") {
    const auto wall = json::parse(run_cli({"wall", "--d", "-2", "--dprime", "4", "--t-samples", "11"}).out);
    CHECK(wall["dirac_count"] == 6);
    CHECK(wall["zeros"].size() == 6);
    CHECK(wall["trace"].size() == 11);
    CHECK(wall["trace"][5]["min_norm"].get<double>() < 1e-12);
}

TEST_CASE("scan output is deterministic and complete") {
    const std::vector<std::string> args{"scan", "--model-config", R"({"model": "bhz_square"})", "--axis", "m:-3:3:13"};
    const auto first = run_cli(args);
    REQUIRE(first.code == 0);
    CHECK(run_cli(args).out == first.out);
    const auto rows = csv_rows(first.out);
    REQUIRE(rows.size() == 14);
    CHECK(rows[0] == std::vector<std::string>{"m", "chern", "min_gap", "min_gap_kx", "min_gap_ky"});
    CHECK(rows[3][1] == "DEG");
    CHECK(rows[5][1] == "1");
    CHECK(rows[9][1] == "-1");

    auto json_args = args;
    json_args.insert(json_args.end(), {"--format", "json"});
    const auto doc = json::parse(run_cli(json_args).out);
    CHECK(doc["cells"].size() == 13);
    CHECK(doc["criticals"].size() == 3);
    for (std::size_t i = 0; i < 13; ++i) CHECK(doc["cells"][i]["min_gap"].get<double>() == std::stod(rows[i + 1][2]));
}

TEST_CASE("validate is reproducible from its seed") {
    const std::vector<std::string> args{"validate", "--model-config", R"({"model": "haldane"})", "--points", "3", "--seed", "7"};
    const auto first = run_cli(args);
    REQUIRE(first.code == 0);
    CHECK(run_cli(args).out == first.out);
    CHECK(json::parse(first.out)["unanimous"] == true);
    const auto kagome = run_cli({"validate", "--model-config", R"({"model": "kagome"})", "--points", "2"});
    CHECK(kagome.code == 0);
}

TEST_CASE("fan subcommand") {
    const auto fan = run_cli({"fan", "--labels", "0,1,2"});
    REQUIRE(fan.code == 0);
    const auto report = json::parse(fan.out);
    CHECK(report["ok"] == true);
    CHECK(report["measured"] == json({0, 1, 2}));
}
