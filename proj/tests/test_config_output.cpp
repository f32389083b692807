// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "latmc/latmc.hpp"

using namespace latmc;
namespace fs = std::filesystem;

namespace {

std::string field_of(const std::string& text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("latmc_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Config, Defaults) {
    const auto cfg = parse_config_text("{}");
    EXPECT_DOUBLE_EQ(cfg.lattice.theta, deg_to_rad(30));
    EXPECT_EQ(cfg.lattice.light_shift_per_beam, -200.0);
    EXPECT_EQ(*cfg.lattice.detuning_over_linewidth, -10.0);
    EXPECT_FALSE(cfg.lattice.pump_rate_override.has_value());
    EXPECT_DOUBLE_EQ(cfg.modulation.phi, deg_to_rad(10));
    EXPECT_EQ(cfg.modulation.light_shift_per_mod_beam, -20.0);
    EXPECT_EQ(cfg.ensemble.n_atoms, 1000u);
    EXPECT_EQ(cfg.ensemble.burn_in, 200.0);
    EXPECT_EQ(cfg.ensemble.run_time, 500.0);
    EXPECT_EQ(cfg.sweep.kind, SweepKind::None);
}

TEST(Config, DegreesAndUnits) {
    const auto cfg = parse_config_text(R"({
        "lattice": {"theta_deg": 45, "light_shift_per_beam": -100, "pump_rate_override": 2.5},
        "modulation": {"phi_deg": 12, "delta_m": 1, "delta_m_units": "omega_b"},
        "sweep": {"kind": "delta_m", "values": [-1, 1], "units": "omega_b"}
    })");
    EXPECT_DOUBLE_EQ(cfg.lattice.theta, kPi / 4);
    EXPECT_EQ(*cfg.lattice.pump_rate_override, 2.5);
    const double omega_b = brillouin_frequency(cfg.lattice, cfg.modulation);
    EXPECT_DOUBLE_EQ(cfg.modulation.delta_m, omega_b);
    ASSERT_EQ(cfg.sweep.values.size(), 2u);
    EXPECT_DOUBLE_EQ(cfg.sweep.values[0], -omega_b);
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_EQ(field_of(R"({"lattice": {"thetta": 0.5}})"), "lattice.thetta");
    EXPECT_EQ(field_of(R"({"bogus": 1})"), "bogus");
    EXPECT_EQ(field_of(R"({"lattice": {"theta": 0}})"), "theta");
    EXPECT_EQ(field_of(R"({"lattice": {"theta_deg": 90}})"), "theta");
    EXPECT_EQ(field_of(R"({"lattice": {"theta": 0.5, "theta_deg": 30}})"), "lattice.theta");
    EXPECT_EQ(field_of(R"({"ensemble": {"n_atoms": 0}})"), "n_atoms");
    EXPECT_EQ(field_of(R"({"ensemble": {"n_atoms": -3}})"), "ensemble.n_atoms");
    EXPECT_EQ(field_of(R"({"integrator": {"recoil": "sideways"}})"), "integrator.recoil");
    EXPECT_EQ(field_of(R"({"sweep": {"kind": "pump_rate", "values": [-1]}})"), "sweep.values");
    EXPECT_EQ(field_of(R"({"lattice": {"atomic_detuning_over_linewidth": null}})"),
              "atomic_detuning_over_linewidth");
    EXPECT_EQ(field_of("{not json"), "config");
}

TEST(Config, EchoRoundTrips) {
    const auto cfg = parse_config_text(R"({
        "lattice": {"theta_deg": 33, "light_shift_per_beam": -150, "atomic_detuning_over_linewidth": -7},
        "modulation": {"phi_deg": 11, "light_shift_per_mod_beam": -12, "delta_m": 3.25},
        "ensemble": {"n_atoms": 17, "master_seed": 99, "sample_stride": 3},
        "integrator": {"recoil": "off", "elastic_scattering": true},
        "sweep": {"kind": "pump_rate", "values": [0.5, 5]},
        "output_dir": "somewhere"
    })");
    const auto echo = to_json(cfg);
    const auto again = parse_config(echo);
    EXPECT_EQ(to_json(again), echo);
    EXPECT_EQ(again.lattice.theta, cfg.lattice.theta);
    EXPECT_EQ(again.modulation.delta_m, cfg.modulation.delta_m);
    EXPECT_EQ(again.ensemble.integrator.recoil, RecoilModel::Off);
    EXPECT_TRUE(again.ensemble.integrator.elastic_scattering);
    EXPECT_EQ(again.sweep.values, cfg.sweep.values);
}

TEST(Output, FormatNumberIsShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-200.0), "-200");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    for (double v : {19.645321, 1.0 / 3.0, -2.5e-7}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Output, CmCsvLayout) {
    EnsembleSpec spec;
    spec.n_atoms = 3;
    spec.burn_in = 1.0;
    spec.run_time = 5.0;
    spec.sample_stride = 50;
    spec.threads = 1;
    LatticeConfig cfg;
    ModulationConfig mod;
    const auto r = run_ensemble(spec, cfg, mod);
    const std::string csv = cm_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,cm_x,cm_y,cm_z,var_x,var_y,var_z");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    }
    const auto expected = static_cast<std::size_t>(std::floor(spec.run_time / (r.dt * 50) * (1 + 1e-12))) + 1;
    EXPECT_EQ(rows, expected);
}

TEST(Output, SweepCsv) {
    SweepResult s;
    s.kind = SweepKind::DeltaM;
    for (double d : default_delta_grid(19.645)) s.points.push_back({d, {0.1, 0.01}, {0.0, 0.01}, {}, 0});
    const std::string csv = sweep_csv(s);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.front(), '#');
    std::getline(in, line);
    EXPECT_EQ(line, kSweepHeader);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 21);

    SweepResult p;
    p.kind = SweepKind::PumpRate;
    p.xi.push_back({});
    const std::string pump = sweep_csv(p);
    EXPECT_NE(pump.find("# knob = pump rate"), std::string::npos);
    EXPECT_NE(pump.find("xi"), std::string::npos);
    EXPECT_TRUE(xi_table(p, 19.6).has_value());
    EXPECT_FALSE(xi_table(s, 19.6).has_value());
}

TEST(Output, SetCommitsOrCleansUp) {
    const auto dir = scratch_dir("outset");
    {
        OutputSet files(dir);
        files.write("a.txt", "alpha\n");
        files.write("b.txt", "beta\n");
        files.commit();
    }
    EXPECT_EQ(slurp(dir / "a.txt"), "alpha\n");
    EXPECT_FALSE(fs::exists(dir / "a.txt.tmp"));

    const auto partial = scratch_dir("outset_partial");
    try {
        OutputSet files(partial);
        files.write("a.txt", "alpha\n");
        throw std::runtime_error("simulated failure");
    } catch (const std::runtime_error&) {
    }
    EXPECT_FALSE(fs::exists(partial / "a.txt"));
    fs::remove_all(dir);
    fs::remove_all(partial);
}

TEST(Output, UnwritableDirectory) {
    const auto dir = scratch_dir("blocker");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    EXPECT_THROW(OutputSet(dir / "file" / "sub"), IoError);
    fs::remove_all(dir);
}

TEST(Output, Metadata) {
    const auto cfg = parse_config_text("{}");
    const auto meta = run_metadata(cfg, "single", 0.001, 10);
    EXPECT_EQ(meta["version"], kVersion);
    EXPECT_EQ(meta["master_seed"], 1);
    EXPECT_NEAR(meta["predictions"]["omega_b"].get<double>(), 19.645, 2e-3);
    EXPECT_EQ(parse_config(meta["config"]).lattice.theta, cfg.lattice.theta);
}

TEST(Output, SvgIsWellFormedEnough) {
    SweepResult s;
    s.kind = SweepKind::DeltaM;
    s.points.push_back({-1.0, {0.1, 0.01}, {0.0, 0.01}, {}, 0});
    s.points.push_back({1.0, {-0.1, 0.01}, {0.0, 0.01}, {}, 0});
    const std::string svg = sweep_svg(s);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
