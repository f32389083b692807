// SPDX-License-Identifier: Apache-2.0
//
// Reproducible parallel ensembles of independent atoms, centre-of-mass
// observables, and the two sweep protocols (driving detuning scan and
// pumping-rate scan at fixed well depth).
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "stats.hpp"

namespace latmc {

struct EnsembleSpec {
    std::uint64_t n_atoms = 1000;
    std::uint64_t master_seed = 1;
    double burn_in = 200.0;        ///< modulation-off equilibration [1/omega_r]
    double run_time = 500.0;       ///< modulated window [1/omega_r]
    double thermal_spread = 0.05;  ///< initial kinetic energy per axis as a fraction of the well depth
    std::uint64_t sample_stride = 0;  ///< steps between samples; 0 picks about one sample per 1/omega_r
    double position_spread = 0.05;    ///< Gaussian position spread per axis in units of lambda_x
    IntegratorSettings integrator;
    unsigned threads = 0;  ///< 0 uses the hardware concurrency

    void validate() const {
        if (n_atoms < 1) throw ConfigError("n_atoms", "must be at least 1");
        if (!std::isfinite(burn_in) || burn_in < 0.0) throw ConfigError("burn_in", "must be non-negative");
        if (!std::isfinite(run_time) || run_time <= 0.0) throw ConfigError("run_time", "must be positive");
        if (!std::isfinite(thermal_spread) || thermal_spread < 0.0)
            throw ConfigError("thermal_spread", "must be non-negative");
        if (!std::isfinite(position_spread) || position_spread < 0.0)
            throw ConfigError("position_spread", "must be non-negative");
    }

    [[nodiscard]] std::uint64_t stride_for(double dt) const {
        if (sample_stride != 0) return sample_stride;
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / dt)));
    }
};

/// Failure inside one trajectory of an ensemble.
class TrajectoryFault : public std::runtime_error {
public:
    TrajectoryFault(std::uint64_t trajectory, const std::string& what)
        : std::runtime_error("trajectory " + std::to_string(trajectory) + ": " + what), trajectory_(trajectory) {}

    [[nodiscard]] std::uint64_t trajectory() const noexcept { return trajectory_; }

private:
    std::uint64_t trajectory_;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<Vec3> cm_position;
    std::vector<Vec3> position_variance;
    std::uint64_t n_atoms = 0;
    LatticeConfig lattice;
    ModulationConfig modulation;
    EnsembleSpec spec;
    std::uint64_t master_seed = 0;
    std::uint32_t point_index = 0;
    double dt = 0.0;
    std::uint64_t jumps = 0;  ///< total pumping events over all atoms, burn-in included

    /// Per-atom samples, atom-major: atom_positions[atom * times.size() + sample].
    /// Empty for synthetic results; when present the fits bootstrap over atoms.
    std::vector<Vec3> atom_positions;

    [[nodiscard]] std::span<const Vec3> atom_track(std::uint64_t atom) const {
        return std::span<const Vec3>(atom_positions).subspan(atom * times.size(), times.size());
    }
};

/// Initial states: each atom at a random well bottom of one lattice cell with
/// the sublevel that is trapped there, Gaussian position and velocity spread.
[[nodiscard]] inline AtomState initial_state(const EnsembleSpec& spec, const LatticeConfig& cfg,
                                             RandomStream& rng) {
    const Wavevectors k = derive_wavevectors(cfg);
    const double sigma_r = spec.position_spread * 2.0 * kPi / k.kx;
    const double sigma_v = std::sqrt(spec.thermal_spread * well_depth(cfg));

    const auto i = rng.below(2);
    const auto j = rng.below(2);
    const auto l = rng.below(2);
    AtomState s;
    s.position = {static_cast<double>(i) * kPi / k.kx, static_cast<double>(j) * kPi / k.ky,
                  static_cast<double>(l) * kPi / k.kz};
    // cos(kx x) cos(ky y) cos(kz z) = +1 is a sigma- site, -1 a sigma+ site.
    s.internal = (i + j + l) % 2 == 0 ? InternalState::Minus : InternalState::Plus;
    s.position.x += sigma_r * rng.normal();
    s.position.y += sigma_r * rng.normal();
    s.position.z += sigma_r * rng.normal();
    s.velocity = {sigma_v * rng.normal(), sigma_v * rng.normal(), sigma_v * rng.normal()};
    return s;
}

[[nodiscard]] inline RandomStream trajectory_stream(const EnsembleSpec& spec, std::uint32_t point_index,
                                                    std::uint64_t atom) {
    return RandomStream(StreamId{spec.master_seed, point_index, static_cast<std::uint32_t>(atom)});
}

[[nodiscard]] inline std::vector<AtomState> init_ensemble(const EnsembleSpec& spec, const LatticeConfig& cfg,
                                                          std::uint32_t point_index = 0) {
    spec.validate();
    std::vector<AtomState> atoms;
    atoms.reserve(spec.n_atoms);
    for (std::uint64_t a = 0; a < spec.n_atoms; ++a) {
        RandomStream rng = trajectory_stream(spec, point_index, a);
        atoms.push_back(initial_state(spec, cfg, rng));
    }
    return atoms;
}

namespace detail {

/// Runs body(i) for i in [0, n) on `threads` workers. Rethrows the failure of
/// the lowest index, so error reporting does not depend on scheduling.
template <typename Body>
void parallel_for(std::uint64_t n, unsigned threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
    std::atomic<std::uint64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::uint64_t error_index = n;

    auto worker = [&] {
        for (std::uint64_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Burn-in with the modulation off, then `run_time` with it on. Samples are
/// recorded from the switch-on time onwards.
[[nodiscard]] inline EnsembleResult run_ensemble(const EnsembleSpec& spec, const LatticeConfig& cfg,
                                                 const ModulationConfig& mod, std::uint32_t point_index = 0) {
    spec.validate();
    cfg.validate();
    ModulationConfig modulation = mod;
    modulation.t_on = spec.burn_in;
    modulation.validate();

    const IntegratorSettings integrator = spec.integrator.resolved(cfg);
    const double dt = integrator.dt;
    const std::uint64_t burn_steps = steps_in(spec.burn_in, dt);
    const std::uint64_t stride = spec.stride_for(dt);
    const std::uint64_t n_samples = steps_in(spec.run_time, dt) / stride + 1;
    const double t_on = static_cast<double>(burn_steps) * dt;
    modulation.t_on = t_on;

    EnsembleResult out;
    out.n_atoms = spec.n_atoms;
    out.lattice = cfg;
    out.modulation = modulation;
    out.spec = spec;
    out.spec.integrator = integrator;
    out.spec.sample_stride = stride;
    out.master_seed = spec.master_seed;
    out.point_index = point_index;
    out.dt = dt;
    out.times.resize(n_samples);
    for (std::uint64_t j = 0; j < n_samples; ++j)
        out.times[j] = static_cast<double>(burn_steps + j * stride) * dt;
    out.atom_positions.resize(spec.n_atoms * n_samples);
    std::vector<std::uint64_t> jumps(spec.n_atoms, 0);

    detail::parallel_for(spec.n_atoms, spec.threads, [&](std::uint64_t atom) {
        try {
            RandomStream rng = trajectory_stream(spec, point_index, atom);
            AtomState state = initial_state(spec, cfg, rng);
            Propagator prop(cfg, modulation, integrator, std::move(rng));
            for (std::uint64_t i = 0; i < burn_steps; ++i) prop.advance(state);
            Vec3* track = out.atom_positions.data() + atom * n_samples;
            track[0] = state.position;
            for (std::uint64_t j = 1; j < n_samples; ++j) {
                for (std::uint64_t i = 0; i < stride; ++i) prop.advance(state);
                track[j] = state.position;
            }
            jumps[atom] = prop.jumps();
        } catch (const std::exception& e) {
            throw TrajectoryFault(atom, e.what());
        }
    });

    // Reduction in atom order.
    out.cm_position.assign(n_samples, Vec3{});
    out.position_variance.assign(n_samples, Vec3{});
    const double inv_n = 1.0 / static_cast<double>(spec.n_atoms);
    for (std::uint64_t atom = 0; atom < spec.n_atoms; ++atom) {
        const auto track = out.atom_track(atom);
        for (std::uint64_t j = 0; j < n_samples; ++j) out.cm_position[j] += track[j];
        out.jumps += jumps[atom];
    }
    for (auto& cm : out.cm_position) cm *= inv_n;
    for (std::uint64_t atom = 0; atom < spec.n_atoms; ++atom) {
        const auto track = out.atom_track(atom);
        for (std::uint64_t j = 0; j < n_samples; ++j) {
            const Vec3 d = track[j] - out.cm_position[j];
            out.position_variance[j] += Vec3{d.x * d.x, d.y * d.y, d.z * d.z};
        }
    }
    for (auto& var : out.position_variance) var *= inv_n;
    return out;
}

// ---------------------------------------------------------------------------
// Fits

namespace detail {

struct FitWindow {
    std::size_t first;
    std::vector<double> weights;  ///< OLS slope weights (t - tbar) / Sxx
};

/// The first quarter of the recorded window is discarded as transient.
inline FitWindow fit_window(std::span<const double> times) {
    if (times.empty()) throw AnalysisError("empty time series");
    const double start = times.front() + 0.25 * (times.back() - times.front());
    std::size_t first = 0;
    while (first < times.size() && times[first] < start) ++first;
    if (times.size() - first < 10)
        throw AnalysisError("fewer than 10 samples in the fit window (" + std::to_string(times.size() - first) +
                            ")");
    return {first, slope_weights(times.subspan(first))};
}

inline std::uint32_t bootstrap_point(const EnsembleResult& r, int axis, int observable) {
    return r.point_index * 8u + static_cast<std::uint32_t>(observable * 3 + axis);
}

}  // namespace detail

inline constexpr int kBootstrapResamples = 200;

/// Centre-of-mass velocity along `axis` [v_r]. The uncertainty is the larger
/// of the OLS residual error and an atom bootstrap.
[[nodiscard]] inline Estimate fit_cm_velocity(const EnsembleResult& r, int axis) {
    const auto window = detail::fit_window(r.times);
    const std::size_t m = r.times.size() - window.first;
    std::vector<double> cm(m);
    for (std::size_t j = 0; j < m; ++j) cm[j] = r.cm_position[window.first + j][axis];
    const LineFit line = fit_line(std::span<const double>(r.times).subspan(window.first), cm);
    double err = line.slope_stderr;

    if (!r.atom_positions.empty()) {
        std::vector<double> slopes(r.n_atoms);
        for (std::uint64_t a = 0; a < r.n_atoms; ++a) {
            const auto track = r.atom_track(a);
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += window.weights[j] * track[window.first + j][axis];
            slopes[a] = s;
        }
        RandomStream rng(StreamId{r.master_seed, kAnalysisPointIndex, detail::bootstrap_point(r, axis, 0)});
        err = std::max(err, bootstrap_mean_stderr(slopes, kBootstrapResamples, rng));
    }
    // (1/k)/(1/omega_r) = omega_r/k = v_r / 2
    return {line.slope / 2.0, err / 2.0};
}

/// Half the growth rate of the position variance along `axis`
/// [(1/k)^2 omega_r].
[[nodiscard]] inline Estimate diffusion_coefficient(const EnsembleResult& r, int axis) {
    if (r.position_variance.size() != r.times.size()) throw AnalysisError("variance series missing");
    const auto window = detail::fit_window(r.times);
    const std::size_t m = r.times.size() - window.first;
    std::vector<double> var(m);
    for (std::size_t j = 0; j < m; ++j) var[j] = r.position_variance[window.first + j][axis];
    const LineFit line = fit_line(std::span<const double>(r.times).subspan(window.first), var);
    double err = line.slope_stderr;

    if (!r.atom_positions.empty()) {
        const std::uint64_t n = r.n_atoms;
        RandomStream rng(StreamId{r.master_seed, kAnalysisPointIndex, detail::bootstrap_point(r, axis, 1)});
        std::vector<double> cm(m);
        std::vector<double> estimates(kBootstrapResamples);
        std::vector<std::uint64_t> pick(n);
        for (auto& estimate : estimates) {
            for (auto& p : pick) p = rng.below(n);
            std::fill(cm.begin(), cm.end(), 0.0);
            std::vector<double> sq(m, 0.0);
            for (const auto a : pick) {
                const auto track = r.atom_track(a);
                for (std::size_t j = 0; j < m; ++j) {
                    const double x = track[window.first + j][axis];
                    cm[j] += x;
                    sq[j] += x * x;
                }
            }
            double slope = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double mean = cm[j] / static_cast<double>(n);
                slope += window.weights[j] * (sq[j] / static_cast<double>(n) - mean * mean);
            }
            estimate = slope;
        }
        err = std::max(err, standard_deviation(estimates));
    }
    return {line.slope / 2.0, err / 2.0};
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind { None, DeltaM, PumpRate };

struct SweepPoint {
    double knob = 0.0;
    Estimate v_cx;
    Estimate v_cz;
    Estimate d_x;
    std::uint64_t jumps = 0;
};

struct XiPoint {
    double knob = 0.0;
    Estimate xi;    ///< v_cx(+Omega_B) - v_cx(-Omega_B)
    Estimate xi_z;  ///< same difference for the z component
    SweepPoint plus;
    SweepPoint minus;
};

struct SweepResult {
    SweepKind kind = SweepKind::None;
    std::string knob_name;
    std::vector<SweepPoint> points;  ///< one per knob value (DeltaM)
    std::vector<XiPoint> xi;         ///< one per knob value (PumpRate), or the +-Omega_B pair (DeltaM)
};

[[nodiscard]] inline SweepPoint measure(const EnsembleResult& r, double knob) {
    return {knob, fit_cm_velocity(r, 0), fit_cm_velocity(r, 2), diffusion_coefficient(r, 0), r.jumps};
}

/// Difference of the two resonant points with errors added in quadrature.
[[nodiscard]] inline XiPoint compute_xi(const SweepPoint& plus, const SweepPoint& minus, double knob = 0.0) {
    XiPoint out;
    out.knob = knob;
    out.plus = plus;
    out.minus = minus;
    out.xi = difference(plus.v_cx, minus.v_cx);
    out.xi_z = difference(plus.v_cz, minus.v_cz);
    return out;
}

/// Extracts xi from a driving-detuning sweep that contains both +Omega_B and
/// -Omega_B (relative tolerance 1e-9).
[[nodiscard]] inline XiPoint compute_xi(const SweepResult& sweep, double omega_b) {
    const auto find = [&](double target) -> const SweepPoint& {
        for (const auto& p : sweep.points)
            if (std::abs(p.knob - target) <= 1e-9 * std::abs(omega_b)) return p;
        throw AnalysisError("sweep has no point at delta_m = " + std::to_string(target));
    };
    return compute_xi(find(omega_b), find(-omega_b));
}

/// One ensemble per driving detuning; point i uses stream point index i.
[[nodiscard]] inline SweepResult sweep_delta_m(const EnsembleSpec& spec, const LatticeConfig& cfg,
                                               const ModulationConfig& mod_base, std::span<const double> deltas) {
    if (deltas.empty()) throw ConfigError("sweep.values", "must not be empty");
    SweepResult out;
    out.kind = SweepKind::DeltaM;
    out.knob_name = "delta_m";
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        ModulationConfig mod = mod_base;
        mod.delta_m = deltas[i];
        const EnsembleResult r = run_ensemble(spec, cfg, mod, static_cast<std::uint32_t>(i));
        out.points.push_back(measure(r, deltas[i]));
    }
    const double omega_b = brillouin_frequency(cfg, mod_base);
    try {
        out.xi.push_back(compute_xi(out, omega_b));
    } catch (const AnalysisError&) {
        // no +-Omega_B pair in this sweep
    }
    return out;
}

/// Runs the +-Omega_B pair; stream point indices 2*pair_index and 2*pair_index+1.
[[nodiscard]] inline XiPoint run_xi_pair(const EnsembleSpec& spec, const LatticeConfig& cfg,
                                         const ModulationConfig& mod, std::uint32_t pair_index = 0,
                                         double knob = 0.0) {
    const double omega_b = brillouin_frequency(cfg, mod);
    ModulationConfig plus = mod;
    plus.delta_m = omega_b;
    ModulationConfig minus = mod;
    minus.delta_m = -omega_b;
    const SweepPoint p = measure(run_ensemble(spec, cfg, plus, 2 * pair_index), omega_b);
    const SweepPoint m = measure(run_ensemble(spec, cfg, minus, 2 * pair_index + 1), -omega_b);
    return compute_xi(p, m, knob);
}

/// xi at fixed well depth and modulation for each pumping rate.
[[nodiscard]] inline SweepResult sweep_pump_rate(const EnsembleSpec& spec, const LatticeConfig& cfg_base,
                                                 const ModulationConfig& mod, std::span<const double> gammas) {
    if (gammas.empty()) throw ConfigError("sweep.values", "must not be empty");
    SweepResult out;
    out.kind = SweepKind::PumpRate;
    out.knob_name = "pump_rate";
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        LatticeConfig cfg = cfg_base;
        cfg.pump_rate_override = gammas[g];
        out.xi.push_back(run_xi_pair(spec, cfg, mod, static_cast<std::uint32_t>(g), gammas[g]));
    }
    return out;
}

}  // namespace latmc
