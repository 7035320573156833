#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

#ifndef ENSBOUND_CLI_PATH
#error "ENSBOUND_CLI_PATH must point at the command-line tool"
#endif

namespace {
namespace fs = std::filesystem;

fs::path workdir() {
    const auto dir = fs::temp_directory_path() / "ensbound_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(ENSBOUND_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string at(const std::string& name) { return (workdir() / name).string(); }
}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("pipeline: synth, train, margins, complexity, bounds, verify") {
        REQUIRE(run("synth --kind two_gaussians --n 120 --p 2 --seed 4 --out " + at("d.csv")) == 0);
        REQUIRE(run("train --data " + at("d.csv") + " --algo adaboost --rounds 20 --out " + at("m.json")) == 0);
        CHECK(run("train --data " + at("d.csv") + " --algo bagging --rounds 5 --seed 2 --out " + at("b.json")) == 0);
        CHECK(run("margins --model " + at("m.json") + " --data " + at("d.csv") + " --out " + at("margins.csv")) == 0);
        CHECK(slurp(at("margins.csv")).rfind("delta,cdf\n", 0) == 0);
        CHECK(run("margins --model " + at("m.json") + " --data " + at("d.csv") + " --grid linear:0.25 --out " +
                  at("lin.csv")) == 0);
        for (const char* measure : {"sparsity", "variance", "clusters", "covering"}) {
            CHECK(run(std::string("complexity --measure ") + measure + " --model " + at("m.json") + " --data " +
                      at("d.csv") + " --m-max 3 --seed 1 --out " + at(std::string("cx_") + measure)) == 0);
        }
        CHECK(run("bounds --model " + at("m.json") + " --train " + at("d.csv") + " --test " + at("d.csv") +
                  " --which all --out " + at("bounds.json")) == 0);
        const auto doc = nlohmann::json::parse(slurp(at("bounds.json")));
        CHECK(doc.contains("test_error"));
        CHECK(run("bounds --model " + at("m.json") + " --train " + at("d.csv") +
                  " --which schapire_2_1,theorem1 --out " + at("b2.json")) == 0);
        CHECK(run("verify --model " + at("m.json") + " --data " + at("d.csv") +
                  " --check maurey --samples 2000 --d 2 --delta 0.2 --seed 3 --out " + at("v.json")) == 0);
        CHECK(run("verify --model " + at("m.json") + " --data " + at("d.csv") +
                  " --check cluster-variance --samples 500 --m 2 --seed 3 --out " + at("cv.json")) == 0);
    }

    TEST_CASE("experiment and plot-data are deterministic") {
        const std::string config = R"({"data": {"kind": "two_gaussians", "n": 60}, "trainer": {"rounds": 10},
            "params": {"delta_grid": {"dyadic": [1, 5]}, "m_max": 2}, "replicates": 2, "seed": 9})";
        std::ofstream(at("cfg.json")) << config;
        REQUIRE(run("experiment --config " + at("cfg.json") + " --out " + at("r1.json")) == 0);
        REQUIRE(run("experiment --config " + at("cfg.json") + " --out " + at("r2.json") + " --plots " + at("plots")) == 0);
        CHECK(slurp(at("r1.json")) == slurp(at("r2.json")));
        CHECK(fs::exists(workdir() / "plots" / "bounds.csv"));
        CHECK(run("plot-data --report " + at("r1.json") + " --series margin --out " + at("pd")) == 0);
        CHECK(run("plot-data --report " + at("r1.json") + " --series histogram --out " + at("pd")) == 2);
    }

    TEST_CASE("validation failures exit with code 2") {
        CHECK(run("train --data /nonexistent.csv --out " + at("x.json")) == 2);
        CHECK(run("synth --kind two_gaussians --noise 0.5 --out " + at("x.csv")) == 2);
        CHECK(run("synth --kind nonsense --out " + at("x.csv")) == 2);
        CHECK(run("bounds --model " + at("m.json") + " --train " + at("d.csv") + " --which nope") == 2);
        CHECK(run("frobnicate") == 2);
        std::ofstream(at("bad.csv")) << "f0,label\n1,0\n";
        CHECK(run("train --data " + at("bad.csv") + " --out " + at("x.json")) == 2);
    }
}
