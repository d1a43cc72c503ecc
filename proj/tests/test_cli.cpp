// Copyright 2026 The eevconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(EEVCONV_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string models_dir() { return EEVCONV_MODELS_DIR; }

fs::path fresh_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("eevconv_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// parses "header\nrow,row,...\n" CSV of doubles keyed by column name
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    std::vector<std::string> cols;
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) cols.push_back(cell);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::map<std::string, std::string> row;
        for (const auto& c : cols) {
            REQUIRE(std::getline(ls, cell, ','));
            row[c] = cell;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST_CASE("traces command reports constants and the witness residual") {
    auto res = run_cli("traces --model " + models_dir() + "/mixed_field_ising.json" +
                       " --obs h --obs witness:auto --nmin 7 --nmax 12");
    CHECK(res.code == 0);
    CHECK_THAT(res.output, ContainsSubstring("observable witness"));
    // 2 * (1 + 1.05^2 + 0.5^2) = 4.705
    CHECK_THAT(res.output, ContainsSubstring("4.705"));
    CHECK_THAT(res.output, !ContainsSubstring("FLAG"));
}

TEST_CASE("malformed model files fail with field context") {
    auto dir = fresh_dir("badmodel");
    std::ofstream(dir / "bad.json") << R"({"k": 2, "terms": [
        {"coeff": [1.0, 0.0], "string": {"1": "W"}}]})";
    auto res = run_cli("traces --model " + (dir / "bad.json").string() + " --obs h");
    CHECK(res.code == 1);
    CHECK_THAT(res.output, ContainsSubstring("invalid letter \"W\""));
    fs::remove_all(dir);
}

TEST_CASE("witness command constructs the obstruction certificate") {
    auto res = run_cli("witness --model " + models_dir() + "/mixed_field_ising.json");
    CHECK(res.code == 0);
    auto j = nlohmann::json::parse(res.output);
    CHECK(j["string"] == "Z1Z2Z4Z5");
    CHECK_THAT(j["g1_overlap"].get<double>(), WithinAbs(2.0, 1e-12));
    CHECK(j["tr_HA"].get<double>() == 0.0);
    CHECK_THAT(j["obstruction_residual"].get<double>(), WithinAbs(4.705, 1e-10));
}

TEST_CASE("canonicalize command merges translated strings") {
    auto dir = fresh_dir("canon");
    std::ofstream(dir / "op.json") << R"({"k": 2, "terms": [
        {"coeff": [1.0, 0.0], "string": {"1": "Z", "2": "Z"}},
        {"coeff": [1.0, 0.0], "string": {"1": "X"}},
        {"coeff": [1.0, 0.0], "string": {"2": "X"}}]})";
    auto res = run_cli("canonicalize --obs file:" + (dir / "op.json").string());
    REQUIRE(res.code == 0);
    auto j = nlohmann::json::parse(res.output);
    REQUIRE(j["terms"].size() == 2);
    bool saw_x = false;
    for (const auto& t : j["terms"]) {
        if (t["string"].contains("1") && t["string"]["1"] == "X") {
            CHECK_THAT(t["coeff"][0].get<double>(), WithinAbs(2.0, 1e-15));
            saw_x = true;
        }
    }
    CHECK(saw_x);
    fs::remove_all(dir);
}

TEST_CASE("scan produces reports and caches spectra") {
    auto dir = fresh_dir("scan");
    const std::string base = "scan --model " + models_dir() + "/mixed_field_ising.json" +
                             " --obs h --obs x1 --nmin 6 --nmax 8 --out " + dir.string();
    auto first = run_cli(base);
    REQUIRE(first.code == 0);
    CHECK_THAT(first.output, ContainsSubstring("diagonalizations=3 cache_hits=0"));

    for (const std::string name :
         {"h_zero.csv", "h_eth.csv", "h_fit.csv", "x1_zero.csv", "x1_eth.csv", "x1_fit.csv",
          "h_summary.json", "x1_summary.json"})
        REQUIRE(fs::exists(dir / name));

    // golden run: the energy density tracks f(x) = x at machine precision
    auto h_eth = parse_csv(slurp(dir / "h_eth.csv"));
    REQUIRE(h_eth.size() == 3);
    for (auto& row : h_eth) REQUIRE(std::stod(row["r_f"]) <= 1e-10);

    auto summary = nlohmann::json::parse(slurp(dir / "h_summary.json"));
    CHECK(summary["variants"]["eth"]["exponent"].is_null());
    CHECK_THAT(summary["eth_slope"].get<double>(), WithinAbs(1.0, 1e-12));

    auto x1_summary = nlohmann::json::parse(slurp(dir / "x1_summary.json"));
    CHECK(x1_summary["variants"]["fit"]["exponent"].is_number());

    // second run: pure cache hits, byte-identical outputs
    std::map<std::string, std::string> bytes;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") bytes[e.path().filename()] = slurp(e.path());
    auto second = run_cli(base);
    REQUIRE(second.code == 0);
    CHECK_THAT(second.output, ContainsSubstring("diagonalizations=0 cache_hits=3"));
    for (const auto& [name, content] : bytes) CHECK(slurp(dir / name) == content);

    // --no-cache forces recomputation
    auto third = run_cli(base + " --no-cache");
    REQUIRE(third.code == 0);
    CHECK_THAT(third.output, ContainsSubstring("diagonalizations=3"));
    fs::remove_all(dir);
}

TEST_CASE("scan reproduces the closed-form weak-ETH value for the pure field") {
    auto dir = fresh_dir("weak");
    auto res = run_cli("scan --model " + models_dir() + "/x_field.json" +
                       " --obs x1=X1 --nmin 6 --nmax 9 --out " + dir.string());
    REQUIRE(res.code == 0);
    auto rows = parse_csv(slurp(dir / "x1_zero.csv"));
    REQUIRE(rows.size() == 4);
    for (auto& row : rows) {
        const double n = std::stod(row["N"]);
        REQUIRE_THAT(std::stod(row["weak_eth"]), WithinAbs(1.0 / n, 1e-12));
        // r_{f=0} = sqrt(weak_eth) for every observable
        REQUIRE_THAT(std::stod(row["r_f"]), WithinAbs(std::sqrt(1.0 / n), 1e-12));
    }
    fs::remove_all(dir);
}

TEST_CASE("scan guards its size cap") {
    auto dir = fresh_dir("cap");
    auto res = run_cli("scan --model " + models_dir() + "/mixed_field_ising.json" +
                       " --obs h --nmin 6 --nmax 15 --out " + dir.string());
    CHECK(res.code == 1);
    CHECK_THAT(res.output, ContainsSubstring("cap"));
    fs::remove_all(dir);
}

TEST_CASE("ff-scan is seeded, cross-checked, and capped") {
    auto dir = fresh_dir("ff");
    const std::string base = "ff-scan --g 1.05 --obs x1 --nmin 8 --nmax 16 --samples 400"
                             " --seed 5 --out " + dir.string();
    auto first = run_cli(base);
    REQUIRE(first.code == 0);
    CHECK_THAT(first.output, ContainsSubstring("exact="));
    const std::string csv1 = slurp(dir / "ff_x1.csv");

    auto second = run_cli(base);
    REQUIRE(second.code == 0);
    CHECK(slurp(dir / "ff_x1.csv") == csv1);  // byte-identical under a fixed seed

    auto rows = parse_csv(csv1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["N"] == "8");
    CHECK(rows[1]["N"] == "16");
    CHECK(rows[0]["samples"] == "400");

    auto small = run_cli("ff-scan --samples 50 --out " + dir.string());
    CHECK(small.code == 1);
    CHECK_THAT(small.output, ContainsSubstring("100"));

    auto big = run_cli("ff-scan --nmin 2048 --nmax 2048 --samples 200 --out " + dir.string());
    CHECK(big.code == 0);

    auto capped = run_cli("ff-scan --nmin 2048 --nmax 2048 --samples 200 --cap 1024 --out " +
                          dir.string());
    CHECK(capped.code == 1);
    CHECK_THAT(capped.output, ContainsSubstring("cap"));
    fs::remove_all(dir);
}

TEST_CASE("fit command prints pooled coefficients") {
    auto dir = fresh_dir("fit");
    auto res = run_cli("fit --model " + models_dir() + "/mixed_field_ising.json" +
                       " --obs h --nmin 6 --nmax 7 --degree 2 --out " + dir.string() +
                       " --cache " + (dir / "cache").string());
    REQUIRE(res.code == 0);
    const auto brace = res.output.find('{');
    REQUIRE(brace != std::string::npos);
    auto j = nlohmann::json::parse(res.output.substr(brace));
    auto coeffs = j["h"]["coefficients"].get<std::vector<double>>();
    REQUIRE(coeffs.size() == 3);
    CHECK_THAT(coeffs[0], WithinAbs(0.0, 1e-8));
    CHECK_THAT(coeffs[1], WithinAbs(1.0, 1e-8));
    fs::remove_all(dir);
}
