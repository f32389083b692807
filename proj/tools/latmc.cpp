// SPDX-License-Identifier: Apache-2.0
//
// latmc command-line front end.
//
//   latmc predict    --config run.json [--omega-x 45]
//   latmc single     --config run.json [--seed N] [--threads N] [--out DIR]
//   latmc sweep-dm   --config run.json [--seed N] [--threads N] [--out DIR] [--no-plot]
//   latmc sweep-pump --config run.json [--seed N] [--threads N] [--out DIR] [--no-plot]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime fault, 4 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "latmc/latmc.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kRuntime = 3, kIo = 4 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    std::optional<double> omega_x;
    bool no_plot = false;
};

latmc::RunConfig load(const Options& opt) {
    latmc::RunConfig cfg = opt.config.empty() ? latmc::parse_config_text("{}") : latmc::load_config(opt.config);
    if (opt.seed) cfg.ensemble.master_seed = *opt.seed;
    if (opt.threads) cfg.ensemble.threads = *opt.threads;
    if (opt.out) cfg.output_dir = *opt.out;
    return cfg;
}

int run_predict(const Options& opt) {
    const latmc::RunConfig cfg = load(opt);
    const latmc::Prediction p = latmc::predict(cfg.lattice, cfg.modulation);
    std::cout << latmc::format_prediction(p);
    if (opt.omega_x)
        std::cout << "omega_b_for_input    " << latmc::format_number(
                                                     latmc::brillouin_frequency_for(*opt.omega_x, cfg.lattice,
                                                                                    cfg.modulation))
                  << " (units of --omega-x)\n";
    return kOk;
}

int run_single(const Options& opt) {
    const latmc::RunConfig cfg = load(opt);
    const latmc::EnsembleResult r = latmc::run_ensemble(cfg.ensemble, cfg.lattice, cfg.modulation);

    auto meta = latmc::run_metadata(cfg, "single", r.dt, r.spec.sample_stride);
    meta["jumps"] = r.jumps;
    try {
        const auto vx = latmc::fit_cm_velocity(r, 0);
        const auto vz = latmc::fit_cm_velocity(r, 2);
        const auto dx = latmc::diffusion_coefficient(r, 0);
        meta["fit"] = {{"v_cx", vx.value}, {"v_cx_err", vx.error}, {"v_cz", vz.value},
                       {"v_cz_err", vz.error}, {"d_x", dx.value}, {"d_x_err", dx.error}};
    } catch (const latmc::AnalysisError& e) {
        meta["fit"] = {{"error", e.what()}};
    }

    latmc::OutputSet files(cfg.output_dir);
    files.write("cm.csv", latmc::cm_csv(r));
    files.write("meta.json", meta.dump(2) + "\n");
    files.commit();
    std::cout << "wrote " << r.times.size() << " samples to " << (cfg.output_dir / "cm.csv").string() << "\n";
    return kOk;
}

int run_sweep(const Options& opt, latmc::SweepKind kind) {
    latmc::RunConfig cfg = load(opt);
    if (cfg.sweep.kind != latmc::SweepKind::None && cfg.sweep.kind != kind)
        throw latmc::ConfigError("sweep.kind", "does not match the requested subcommand");
    cfg.sweep.kind = kind;
    const double omega_b = latmc::brillouin_frequency(cfg.lattice, cfg.modulation);
    if (cfg.sweep.values.empty())
        cfg.sweep.values = kind == latmc::SweepKind::DeltaM ? latmc::default_delta_grid(omega_b)
                                                            : latmc::default_pump_grid();

    const latmc::SweepResult s =
        kind == latmc::SweepKind::DeltaM
            ? latmc::sweep_delta_m(cfg.ensemble, cfg.lattice, cfg.modulation, cfg.sweep.values)
            : latmc::sweep_pump_rate(cfg.ensemble, cfg.lattice, cfg.modulation, cfg.sweep.values);

    const latmc::IntegratorSettings resolved = cfg.ensemble.integrator.resolved(cfg.lattice);
    auto meta = latmc::run_metadata(cfg, kind == latmc::SweepKind::DeltaM ? "sweep-dm" : "sweep-pump", resolved.dt,
                                    cfg.ensemble.stride_for(resolved.dt));
    if (kind == latmc::SweepKind::PumpRate) meta.erase("dt");  // step size depends on the pumping rate

    latmc::OutputSet files(cfg.output_dir);
    files.write("sweep.csv", latmc::sweep_csv(s));
    if (const auto xi = latmc::xi_table(s, omega_b)) files.write("xi.txt", *xi);
    if (!opt.no_plot) files.write("sweep.svg", latmc::sweep_svg(s));
    files.write("meta.json", meta.dump(2) + "\n");
    files.commit();
    std::cout << "wrote " << cfg.sweep.values.size() << " sweep points to "
              << (cfg.output_dir / "sweep.csv").string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical Monte Carlo of atoms in a driven dissipative optical lattice"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub, bool simulation) {
        sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
        if (simulation) {
            sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
            sub->add_option("--out", opt.out, "output directory (overrides the config)");
        }
    };
    auto* predict = app.add_subcommand("predict", "print the closed-form predictions");
    add_common(predict, false);
    predict->add_option("--omega-x", opt.omega_x, "external Omega_x; also prints Omega_B in its units");
    auto* single = app.add_subcommand("single", "run one ensemble and write cm.csv");
    add_common(single, true);
    auto* sweep_dm = app.add_subcommand("sweep-dm", "scan the driving detuning delta_m");
    add_common(sweep_dm, true);
    sweep_dm->add_flag("--no-plot", opt.no_plot, "skip sweep.svg");
    auto* sweep_pump = app.add_subcommand("sweep-pump", "scan the pumping rate at fixed well depth");
    add_common(sweep_pump, true);
    sweep_pump->add_flag("--no-plot", opt.no_plot, "skip sweep.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (predict->parsed()) return run_predict(opt);
        if (single->parsed()) return run_single(opt);
        if (sweep_dm->parsed()) return run_sweep(opt, latmc::SweepKind::DeltaM);
        if (sweep_pump->parsed()) return run_sweep(opt, latmc::SweepKind::PumpRate);
    } catch (const latmc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const latmc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return kRuntime;
    }
    return kConfig;
}
