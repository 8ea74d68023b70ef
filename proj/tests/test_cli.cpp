#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

const std::string kCli = QMET_CLI_PATH;

std::string tmp_path(const std::string& name) {
    return std::string("cli_test_") + name;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    const int rc = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        if (line.size() && line.back() == ',') cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("cli rejects bad invocations") {
    CHECK(run("qfi-curve") != 0);  // missing --config/--out
    CHECK(run("qfi-curve --config /nonexistent.json --out out.csv") != 0);

    const std::string cfg = tmp_path("bad.json");
    write_text(cfg, "{ not json");
    CHECK(run("qfi-curve --config " + cfg + " --out out.csv") != 0);

    write_text(cfg, R"({"states": []})");
    CHECK(run("qfi-curve --config " + cfg + " --out out.csv") != 0);
    std::remove(cfg.c_str());
}

TEST_CASE("cli qfi-curve reproduces the SSV benchmark") {
    const std::string cfg = tmp_path("qfi.json");
    const std::string out = tmp_path("qfi.csv");
    write_text(cfg, R"({"states": ["SSV"], "nbar_values": [1, 2, 3], "dim": 150})");
    REQUIRE(run("qfi-curve --config " + cfg + " --out " + out) == 0);
    const auto rows = parse_csv(read_text(out));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "state_family");
    const std::vector<double> expect = {3.0, 8.0, 15.0};
    for (int i = 0; i < 3; ++i)
        CHECK_THAT(std::stod(rows[i + 1].back()),
                   Catch::Matchers::WithinRel(expect[i], 1e-6));
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli qfi-curve keeps NOON on integer nbar") {
    const std::string cfg = tmp_path("noon.json");
    const std::string out = tmp_path("noon.csv");
    write_text(cfg, R"({"states": ["NOON"], "nbar_values": [1, 1.5, 2], "dim": 20})");
    REQUIRE(run("qfi-curve --config " + cfg + " --out " + out) == 0);
    const auto rows = parse_csv(read_text(out));
    REQUIRE(rows.size() == 3);  // header + nbar 1 and 2
    CHECK_THAT(std::stod(rows[2].back()), Catch::Matchers::WithinRel(4.0, 1e-9));
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli loss-curve anchors and sentinels") {
    const std::string cfg = tmp_path("loss.json");
    const std::string out = tmp_path("loss.csv");
    write_text(cfg,
               R"({"states": ["NOON"], "nbar": 1, "eta_values": [0, 1], "dim": 16})");
    REQUIRE(run("loss-curve --config " + cfg + " --out " + out) == 0);
    const auto rows = parse_csv(read_text(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][5].empty());  // eta = 0 carries no information
    CHECK_THAT(std::stod(rows[2][5]), Catch::Matchers::WithinRel(1.0, 1e-9));
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli wigner output is correct and deterministic") {
    const std::string cfg = tmp_path("wig.json");
    const std::string out1 = tmp_path("wig1.csv");
    const std::string out2 = tmp_path("wig2.csv");
    write_text(cfg, R"({"state": {"family": "Vacuum"}, "dim": 16,
                        "grid": {"resolution": 41}})");
    REQUIRE(run("wigner --config " + cfg + " --out " + out1) == 0);
    REQUIRE(run("wigner --config " + cfg + " --out " + out2) == 0);
    const std::string text = read_text(out1);
    CHECK(text == read_text(out2));
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == size_t(1 + 41 * 41));
    double peak = -1;
    for (size_t i = 1; i < rows.size(); ++i) peak = std::max(peak, std::stod(rows[i][2]));
    CHECK_THAT(peak, Catch::Matchers::WithinRel(2.0 / M_PI, 1e-9));
    std::remove(cfg.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("cli bayes is seed-deterministic") {
    const std::string cfg = tmp_path("bayes.json");
    const std::string out1 = tmp_path("bayes1.csv");
    const std::string out2 = tmp_path("bayes2.csv");
    write_text(cfg, R"({"state": {"family": "SSV", "z": 0.6585, "alpha": 0, "N": 0},
                        "phi_true": 0.6, "mu": 20, "trials": 3,
                        "grid_size": 512, "seed": 5, "dim": 24, "tail_tol": 1e-5})");
    REQUIRE(run("bayes --config " + cfg + " --out " + out1) == 0);
    REQUIRE(run("bayes --config " + cfg + " --out " + out2) == 0);
    CHECK(read_text(out1) == read_text(out2));
    REQUIRE(run("bayes --config " + cfg + " --seed 6 --out " + out2) == 0);
    CHECK(read_text(out1) != read_text(out2));
    const auto rows = parse_csv(read_text(out1));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "trial");
    std::remove(cfg.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}
