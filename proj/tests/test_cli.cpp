#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "keplerlab/cli.hpp"
#include "keplerlab/integrators.hpp"

using keplerlab::cli::run;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path scratch(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(KEPLERLAB_TEST_DATA) / "cli_scratch";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int tool(const std::string& args) {
    const std::string cmd = std::string("\"") + KEPLERLAB_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes one row per sample") {
    const Result r = call({"simulate", "--method", "sv", "--h", "0.5", "--steps", "1000"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0] == std::vector<std::string>{"step", "t", "x1", "x2", "v1", "v2", "energy", "angmom", "lrlA",
                                              "lrlB", "omega"});
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 11);
        const double e = std::stod(rows[i][6]);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    CHECK(hi - lo < 0.01);
}

TEST_CASE("a single step reproduces the initialisation") {
    const Result r = call({"simulate", "--method", "sv", "--steps", "1"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    const auto x1 = keplerlab::init_second_point(keplerlab::MethodId::SV, {-3, 0}, {0, 0.45}, 0.5);
    CHECK(std::stod(rows[2][2]) == x1.x1);
    CHECK(std::stod(rows[2][3]) == x1.x2);
}

TEST_CASE("simulate JSON mirrors the CSV keys") {
    const Result r = call({"simulate", "--steps", "3", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    REQUIRE(j["rows"].size() == 4);
    for (const char* key : {"step", "t", "x1", "x2", "v1", "v2", "energy", "angmom", "lrlA", "lrlB", "omega"}) {
        CHECK(j["rows"][1].contains(key));
    }
    CHECK(j["config"]["method"] == "sv");
}

TEST_CASE("precession reports") {
    const Result sv = call({"precession", "--method", "sv", "--h", "0.5", "--steps", "1000"});
    REQUIRE(sv.code == 0);
    const Json s = Json::parse(sv.out);
    CHECK(std::abs(s["predictedClosedForm"].get<double>() - 0.0674) < 5e-4);
    CHECK(std::abs(s["measured"].get<double>() - 0.064) < 5e-3);
    CHECK(s["predictedQuadrature"].is_number());
    CHECK(s["revolutions"].get<double>() > 25);

    const Json mp = Json::parse(call({"precession", "--method", "mp"}).out);
    CHECK(std::abs(mp["predictedClosedForm"].get<double>() + 0.1347) < 1e-3);
    CHECK(std::abs(mp["measured"].get<double>() + 0.16) < 0.01);

    const Json ml = Json::parse(call({"precession", "--method", "ml"}).out);
    CHECK(ml["predictedClosedForm"].get<double>() == 0.0);
    CHECK(ml["predictedQuadrature"].is_null());
    CHECK(ml["leadingOrder"] == 4);
    CHECK(std::abs(ml["measured"].get<double>()) < std::abs(s["measured"].get<double>()) / 5);
}

TEST_CASE("precession of a saved trajectory") {
    const auto path = scratch("mp.csv");
    REQUIRE(call({"simulate", "--method", "mp", "--out", path.string()}).code == 0);
    const Result r = call({"precession", "--input", path.string()});
    REQUIRE(r.code == 0);
    CHECK(std::abs(Json::parse(r.out)["measured"].get<double>() + 0.16) < 0.01);
    CHECK(std::filesystem::exists(path.string() + ".meta.json"));
}

TEST_CASE("predict and averages") {
    const Json p = Json::parse(call({"predict", "--method", "sv", "--h", "0.5"}).out);
    CHECK(std::abs(p["predictedClosedForm"].get<double>() - 0.06737) < 1e-5);

    const Result a = call({"averages"});
    REQUIRE(a.code == 0);
    const auto rows = csv_rows(a.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"k", "closedForm", "orbitAverage", "relativeDifference"});
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::stod(rows[i][3]) < 1e-6);

    const auto circ = csv_rows(call({"averages", "--a", "2", "--e", "0"}).out);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::stod(circ[i][1]) == 0.0);

    CHECK(call({"averages", "--a", "2", "--e", "1.2"}).code == 1);
    CHECK(call({"predict", "--a", "-1", "--e", "0.3"}).code == 1);
}

TEST_CASE("bench solve counts") {
    const int n = 20000;
    auto solves = [&](const char* m) {
        const Json j = Json::parse(call({"bench", "--method", m, "--steps", std::to_string(n)}).out);
        CHECK(j["steps"] == n);
        CHECK(j["timingIsInformative"] == true);
        return j["implicitSolveCount"].get<long>();
    };
    CHECK(solves("sv") == 0);
    CHECK(solves("fr") == 0);
    CHECK(std::abs(solves("lc") - n / 3) <= 1);
    CHECK(std::abs(solves("dec") - n / 3) <= 1);
    CHECK(solves("mp") == n);
    CHECK(solves("ml") == n);
}

TEST_CASE("scan") {
    const Result one = call({"scan", "--methods", "sv", "--h-list", "0.5", "--t-end", "500"});
    REQUIRE(one.code == 0);
    const auto rows = csv_rows(one.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"method", "h", "measuredRate", "predictedRate"});
    const Json p = Json::parse(call({"precession", "--method", "sv", "--h", "0.5", "--steps", "1000"}).out);
    CHECK(std::stod(rows[1][2]) == p["measured"].get<double>());

    const Result all = call({"scan"});
    REQUIRE(all.code == 0);
    const auto grid = csv_rows(all.out);
    CHECK(grid.size() == 25);
    CHECK(grid[1][0] == "sv");
    CHECK(grid[24][0] == "fr");

    // Thread count does not change the output.
    CHECK(call({"scan", "--threads", "1"}).out == all.out);
}

TEST_CASE("scan records failed cells and continues") {
    const Result r = call({"scan", "--methods", "sv,mp", "--h-list", "0.5", "--t-end", "100", "--tol", "1e-30",
                           "--max-iter", "2"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(!rows[1][2].empty());
    CHECK(rows[2][2].empty());
    CHECK(r.err.find("mp") != std::string::npos);
}

TEST_CASE("error curves") {
    for (const char* m : {"sv", "mp", "ml", "lc", "dec", "fr"}) {
        const auto rows = csv_rows(call({"error-curve", "--method", m, "--steps", "10"}).out);
        REQUIRE(rows.size() == 12);
        CHECK(rows[0] == std::vector<std::string>{"method", "t", "errorNorm"});
        CHECK(std::stod(rows[1][2]) == 0.0);
    }
    const auto both = csv_rows(call({"error-curve", "--methods", "lc,dec", "--steps", "4"}).out);
    CHECK(both.size() == 11);
}

TEST_CASE("config file precedence") {
    const auto cfg = scratch("run.cfg");
    std::ofstream(cfg) << "# experiment\nmethod = mp\nh = 0.25\nsteps = 8\n";
    const Json j = Json::parse(call({"simulate", "--config", cfg.string(), "--steps", "4", "--format", "json"}).out);
    CHECK(j["config"]["method"] == "mp");
    CHECK(j["config"]["h"] == 0.25);
    CHECK(j["config"]["steps"] == 4);
    CHECK(j["rows"].size() == 5);

    const auto bad = scratch("bad.cfg");
    std::ofstream(bad) << "stepz = 3\n";
    CHECK(call({"simulate", "--config", bad.string()}).code == 1);
    CHECK(call({"simulate", "--config", scratch("missing.cfg").string()}).code == 1);
}

TEST_CASE("output is deterministic and round-trips") {
    const Result a = call({"simulate", "--method", "dec", "--steps", "200"});
    const Result b = call({"simulate", "--method", "dec", "--steps", "200"});
    CHECK(a.out == b.out);
    const auto rows = csv_rows(a.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        for (const std::string& cell : rows[i]) {
            CHECK(std::isfinite(std::stod(cell)));
        }
    }
    // %.17g survives a parse/print round trip.
    char buf[64];
    const double v = std::stod(rows[7][2]);
    std::snprintf(buf, sizeof buf, "%.17g", v);
    CHECK(std::string(buf) == rows[7][2]);
}

TEST_CASE("--out writes files") {
    const auto json = scratch("predict.json");
    REQUIRE(call({"predict", "--out", json.string()}).code == 0);
    CHECK(Json::parse(slurp(json))["method"] == "sv");
    const auto csv = scratch("pred.csv");
    REQUIRE(call({"predict", "--format", "csv", "--out", csv.string()}).code == 0);
    CHECK(csv_rows(slurp(csv)).size() == 2);
    CHECK(Json::parse(slurp(csv.string() + ".meta.json")).contains("config"));
}

TEST_CASE("exit codes in process") {
    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"simulate", "--method", "rk4"}).code == 1);
    CHECK(call({"simulate", "--h", "-0.5"}).code == 1);
    CHECK(call({"simulate", "--steps", "5", "--t-end", "2"}).code == 1);
    CHECK(call({"simulate", "--v0", "0,2"}).code == 1);
    CHECK(call({"precession", "--steps", "50"}).code == 1);
    const Result fail = call({"simulate", "--method", "mp", "--tol", "1e-30", "--max-iter", "2"});
    CHECK(fail.code == 2);
    CHECK(fail.err.find("mp") != std::string::npos);
    CHECK(fail.err.find("step 1") != std::string::npos);
    CHECK(call({"simulate", "--x0", "1e-13,0", "--v0", "0,1"}).code == 2);
    CHECK(call({"simulate", "--help"}).code == 0);
}

TEST_CASE("exit codes of the installed tool") {
    CHECK(tool("predict") == 0);
    CHECK(tool("simulate --method nope") == 1);
    CHECK(tool("simulate --method mp --tol 1e-30 --max-iter 2") == 2);
}

}  // TEST_SUITE
