// SPDX-License-Identifier: Apache-2.0
//
// Propagation of a single atom: velocity-Verlet motion on the potential
// surface of the current sublevel, Poisson optical-pumping jumps with a
// position-dependent rate, and photon-recoil kicks.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"
#include "random.hpp"

namespace latmc {

struct AtomState {
    Vec3 position;  ///< [1/k]
    Vec3 velocity;  ///< [v_r]
    InternalState internal = InternalState::Minus;
    double time = 0.0;  ///< [1/omega_r]

    friend bool operator==(const AtomState&, const AtomState&) = default;
};

/// Non-finite state encountered while integrating.
class IntegratorFault : public std::runtime_error {
public:
    explicit IntegratorFault(std::uint64_t step)
        : std::runtime_error("non-finite atom state at step " + std::to_string(step)), step_(step) {}

    [[nodiscard]] std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t step_;
};

enum class RecoilModel { Off, Isotropic };

struct IntegratorSettings {
    double dt = 0.0;  ///< [1/omega_r]; 0 selects max_time_step(cfg)
    RecoilModel recoil = RecoilModel::Isotropic;

    /// Adds state-preserving photon scattering at rate (Gamma'_0/9) s_same,
    /// i.e. (2 Gamma'_0/9) s_same with a branching ratio of 1/2. Each event
    /// applies the same two recoil kicks as a pumping jump. Off by default.
    bool elastic_scattering = false;

    /// Test hook: freezes position and velocity so that only the jump process
    /// runs.
    bool pin_motion = false;

    /// Returns a copy with dt resolved and checked against the step cap.
    [[nodiscard]] IntegratorSettings resolved(const LatticeConfig& cfg) const {
        IntegratorSettings out = *this;
        const double cap = max_time_step(cfg);
        if (out.dt == 0.0) out.dt = cap;
        if (!std::isfinite(out.dt) || out.dt <= 0.0) throw ConfigError("dt", "time step must be positive");
        if (out.dt > cap * (1.0 + 1e-12))
            throw ConfigError("dt", "time step exceeds min(0.02 * 2pi/Omega_x, 0.05/gamma_max) = " +
                                        std::to_string(cap));
        return out;
    }
};

/// Total energy in E_r: kinetic v^2 (m = 1/2, v in v_r) plus potential.
[[nodiscard]] inline double total_energy(const AtomState& s, const LatticeField& field) {
    return dot(s.velocity, s.velocity) + field.potential(s.position, s.time, s.internal);
}

/// Stateful single-trajectory integrator. Owns the trajectory's random stream
/// and the pending jump threshold.
///
/// Jumps use the integrated hazard: a unit exponential threshold is drawn and
/// the state flips at the first step where the accumulated gamma*dt reaches
/// it. Conditional on no earlier flip, a step therefore flips with
/// probability 1 - exp(-gamma dt), exactly as a per-step Bernoulli trial, but
/// consumes random numbers only per event.
class Propagator {
public:
    Propagator(const LatticeConfig& cfg, const ModulationConfig& mod, const IntegratorSettings& settings,
               RandomStream stream)
        : field_(cfg, mod), settings_(settings.resolved(cfg)), rng_(std::move(stream)) {}

    [[nodiscard]] const LatticeField& field() const noexcept { return field_; }
    [[nodiscard]] const IntegratorSettings& settings() const noexcept { return settings_; }
    [[nodiscard]] double dt() const noexcept { return settings_.dt; }
    [[nodiscard]] std::uint64_t jumps() const noexcept { return jumps_; }
    [[nodiscard]] std::uint64_t steps() const noexcept { return total_steps_; }

    /// Advances `state` by one step in place.
    void advance(AtomState& state) {
        if (!has_last_ || !(state == last_)) bind(state);

        const double dt = settings_.dt;
        const double t_new = origin_time_ + static_cast<double>(steps_since_bind_ + 1) * dt;
        if (!settings_.pin_motion) {
            state.velocity += (0.5 * dt) * force_;
            state.position += (2.0 * dt) * state.velocity;
        }
        state.time = t_new;
        const LatticeField::Local local = field_.local(state.position, t_new);
        force_ = settings_.pin_motion ? Vec3{} : local.force(state.internal);
        if (!settings_.pin_motion) state.velocity += (0.5 * dt) * force_;

        pump_budget_ -= field_.rate_from(local.sigma, state.internal) * dt;
        if (pump_budget_ <= 0.0) {
            state.internal = flip(state.internal);
            ++jumps_;
            kick(state);
            pump_budget_ = rng_.exponential();
            if (!settings_.pin_motion) force_ = local.force(state.internal);
        }
        if (settings_.elastic_scattering) {
            const double same = state.internal == InternalState::Plus ? local.sigma.plus : local.sigma.minus;
            scatter_budget_ -= field_.pump_rate_scale() / 9.0 * same * dt;
            if (scatter_budget_ <= 0.0) {
                kick(state);
                scatter_budget_ = rng_.exponential();
            }
        }

        ++steps_since_bind_;
        ++total_steps_;
        if (!isfinite(state.position) || !isfinite(state.velocity) || !isfinite(force_))
            throw IntegratorFault(total_steps_);
        last_ = state;
    }

    /// One integration step, value form.
    [[nodiscard]] AtomState step(AtomState state) {
        advance(state);
        return state;
    }

private:
    void bind(const AtomState& state) {
        origin_time_ = state.time;
        steps_since_bind_ = 0;
        force_ = settings_.pin_motion ? Vec3{} : field_.force(state.position, state.time, state.internal);
        if (!has_last_) {
            pump_budget_ = rng_.exponential();
            if (settings_.elastic_scattering) scatter_budget_ = rng_.exponential();
        }
        has_last_ = true;
    }

    void kick(AtomState& state) {
        if (settings_.recoil != RecoilModel::Isotropic || settings_.pin_motion) return;
        state.velocity += rng_.unit_vector();
        state.velocity += rng_.unit_vector();
    }

    LatticeField field_;
    IntegratorSettings settings_;
    RandomStream rng_;

    AtomState last_;
    bool has_last_ = false;
    double origin_time_ = 0.0;
    std::uint64_t steps_since_bind_ = 0;
    std::uint64_t total_steps_ = 0;
    std::uint64_t jumps_ = 0;
    Vec3 force_;
    double pump_budget_ = 0.0;
    double scatter_budget_ = 0.0;
};

/// One recorded point of a trajectory.
using TrajectorySample = AtomState;

/// Number of whole steps of size dt that fit in `duration`.
[[nodiscard]] inline std::uint64_t steps_in(double duration, double dt) {
    return static_cast<std::uint64_t>(std::floor(duration / dt * (1.0 + 1e-12)));
}

/// Integrates for `duration`, recording every `sample_every` steps and always
/// the final state.
[[nodiscard]] inline std::vector<TrajectorySample> run_trajectory(const AtomState& init, double duration,
                                                                  const IntegratorSettings& settings,
                                                                  RandomStream stream, const LatticeConfig& cfg,
                                                                  const ModulationConfig& mod,
                                                                  std::uint64_t sample_every = 1) {
    if (!(duration >= 0.0)) throw ConfigError("duration", "must be non-negative");
    if (sample_every == 0) throw ConfigError("sample_stride", "must be at least 1");
    Propagator prop(cfg, mod, settings, std::move(stream));
    const std::uint64_t n = steps_in(duration, prop.dt());
    std::vector<TrajectorySample> out;
    out.reserve(n / sample_every + 2);
    out.push_back(init);
    AtomState state = init;
    for (std::uint64_t i = 1; i <= n; ++i) {
        prop.advance(state);
        if (i % sample_every == 0 || i == n) out.push_back(state);
    }
    return out;
}

}  // namespace latmc
