// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string output;
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("latmc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Result run(const std::string& args, const fs::path& dir) {
    const auto log = dir / "log.txt";
    const std::string cmd = std::string(LATMC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto path = dir / "cfg.json";
    std::ofstream(path) << text;
    return path;
}

constexpr const char* kTiny = R"({
    "lattice": {"theta_deg": 30, "light_shift_per_beam": -200, "pump_rate_override": 20},
    "modulation": {"phi_deg": 10, "light_shift_per_mod_beam": -20, "delta_m": 1, "delta_m_units": "omega_b"},
    "ensemble": {"n_atoms": 8, "burn_in": 2, "run_time": 15}
})";

}  // namespace

TEST(Cli, PredictPrintsBrillouinFrequency) {
    const auto dir = scratch("predict");
    const auto r = run("predict", dir);
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("omega_b              19.64"), std::string::npos) << r.output;
}

TEST(Cli, PredictWithExternalOmegaX) {
    const auto dir = scratch("predict_ext");
    const auto cfg = write_config(dir, R"({"modulation": {"phi_deg": 18.5}})");
    const auto r = run("predict --config " + cfg.string() + " --omega-x 45", dir);
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("omega_b_for_input    57.1"), std::string::npos) << r.output;
}

TEST(Cli, InvalidThetaIsAConfigError) {
    const auto dir = scratch("bad_theta");
    const auto cfg = write_config(dir, R"({"lattice": {"theta": 0}})");
    const auto r = run("predict --config " + cfg.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("theta"), std::string::npos) << r.output;
}

TEST(Cli, UnknownOptionIsAConfigError) {
    const auto dir = scratch("bad_option");
    EXPECT_EQ(run("single --frobnicate", dir).code, 2);
    EXPECT_EQ(run("", dir).code, 2);
}

TEST(Cli, SingleIsReproducibleAcrossRunsAndThreads) {
    const auto dir = scratch("single");
    const auto cfg = write_config(dir, kTiny);
    const std::string base = "single --config " + cfg.string() + " --seed 3 ";
    ASSERT_EQ(run(base + "--threads 1 --out " + (dir / "a").string(), dir).code, 0);
    ASSERT_EQ(run(base + "--threads 1 --out " + (dir / "b").string(), dir).code, 0);
    ASSERT_EQ(run(base + "--threads 2 --out " + (dir / "c").string(), dir).code, 0);
    const std::string a = slurp(dir / "a" / "cm.csv");
    EXPECT_EQ(a.rfind("t,cm_x,cm_y,cm_z,var_x,var_y,var_z\n", 0), 0u);
    EXPECT_EQ(a, slurp(dir / "b" / "cm.csv"));
    EXPECT_EQ(a, slurp(dir / "c" / "cm.csv"));
    EXPECT_TRUE(fs::exists(dir / "a" / "meta.json"));

    ASSERT_EQ(run("single --config " + cfg.string() + " --seed 4 --threads 1 --out " + (dir / "d").string(), dir).code,
              0);
    EXPECT_NE(a, slurp(dir / "d" / "cm.csv"));
}

TEST(Cli, SweepDeltaM) {
    const auto dir = scratch("sweep_dm");
    const auto cfg = write_config(dir, R"({
        "lattice": {"pump_rate_override": 20},
        "ensemble": {"n_atoms": 4, "burn_in": 1, "run_time": 12},
        "sweep": {"kind": "delta_m", "values": [-1, 0, 1], "units": "omega_b"}
    })");
    ASSERT_EQ(run("sweep-dm --config " + cfg.string() + " --out " + (dir / "a").string(), dir).code, 0);
    EXPECT_TRUE(fs::exists(dir / "a" / "sweep.csv"));
    EXPECT_TRUE(fs::exists(dir / "a" / "sweep.svg"));
    EXPECT_TRUE(fs::exists(dir / "a" / "xi.txt"));
    EXPECT_TRUE(fs::exists(dir / "a" / "meta.json"));
    ASSERT_EQ(run("sweep-dm --no-plot --config " + cfg.string() + " --out " + (dir / "b").string(), dir).code, 0);
    EXPECT_TRUE(fs::exists(dir / "b" / "sweep.csv"));
    EXPECT_FALSE(fs::exists(dir / "b" / "sweep.svg"));
}

TEST(Cli, SweepPump) {
    const auto dir = scratch("sweep_pump");
    const auto cfg = write_config(dir, R"({
        "lattice": {"light_shift_per_beam": -100},
        "ensemble": {"n_atoms": 4, "burn_in": 1, "run_time": 12},
        "sweep": {"kind": "pump_rate", "values": [0, 2]}
    })");
    const auto r = run("sweep-pump --no-plot --config " + cfg.string() + " --out " + (dir / "a").string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string xi = slurp(dir / "a" / "xi.txt");
    EXPECT_NE(xi.find("knob,xi,xi_err"), std::string::npos);
}

TEST(Cli, MismatchedSweepKindIsAConfigError) {
    const auto dir = scratch("mismatch");
    const auto cfg = write_config(dir, R"({"sweep": {"kind": "pump_rate", "values": [1]}})");
    EXPECT_EQ(run("sweep-dm --config " + cfg.string() + " --out " + (dir / "a").string(), dir).code, 2);
}

TEST(Cli, UnwritableOutputIsAnIoError) {
    const auto dir = scratch("io");
    const auto cfg = write_config(dir, kTiny);
    std::ofstream(dir / "blocker") << "x";
    const auto r = run("single --config " + cfg.string() + " --out " + (dir / "blocker" / "sub").string(), dir);
    EXPECT_EQ(r.code, 4) << r.output;
}
