// SPDX-License-Identifier: Apache-2.0
//
// State-dependent optical potential of the lin-perp-lin lattice with a moving
// intensity modulation, its analytic gradient, and the optical pumping rates
// of a J_g = 1/2 -> J_e = 3/2 transition.
#pragma once

#include <cmath>

#include "params.hpp"
#include "vec3.hpp"

namespace latmc {

/// Ground sublevel |+1/2> or |-1/2>.
enum class InternalState : int { Plus = +1, Minus = -1 };

[[nodiscard]] constexpr InternalState flip(InternalState s) {
    return s == InternalState::Plus ? InternalState::Minus : InternalState::Plus;
}

/// +1 for Plus, -1 for Minus.
[[nodiscard]] constexpr double sign(InternalState s) { return static_cast<double>(static_cast<int>(s)); }

struct FieldSample {
    double potential = 0.0;       ///< [E_r]
    Vec3 force;                   ///< -grad potential [E_r k]
    double pump_rate_away = 0.0;  ///< rate of leaving the current sublevel [omega_r]
};

/// Circular-polarization intensities in units of the single-beam intensity.
struct SigmaIntensities {
    double plus;
    double minus;
};

/// Precomputed evaluator for the potential surfaces. Holds only derived
/// constants; every member function is pure.
class LatticeField {
public:
    LatticeField(const LatticeConfig& cfg, const ModulationConfig& mod)
        : k_(derive_wavevectors(cfg)),
          shift_(cfg.light_shift_per_beam),
          pump_(pump_rate_from_detuning(cfg)),
          mod_amplitude_(mod.amplitude()),
          mod_k_(mod.wavevector()),
          delta_m_(mod.delta_m),
          t_on_(mod.t_on) {
        mod.validate();
    }

    [[nodiscard]] const Wavevectors& wavevectors() const noexcept { return k_; }
    [[nodiscard]] double pump_rate_scale() const noexcept { return pump_; }
    [[nodiscard]] double modulation_amplitude() const noexcept { return mod_amplitude_; }
    [[nodiscard]] double switch_on_time() const noexcept { return t_on_; }

    /// U0_pm = (8 Delta'_0 / 3)[cos^2 kx x + cos^2 ky y -+ cos kx x cos ky y cos kz z].
    [[nodiscard]] double base_potential(const Vec3& r, InternalState s) const {
        const double a = std::cos(k_.kx * r.x);
        const double b = std::cos(k_.ky * r.y);
        const double c = std::cos(k_.kz * r.z);
        return 8.0 * shift_ / 3.0 * (a * a + b * b - sign(s) * a * b * c);
    }

    [[nodiscard]] bool modulation_on(double t) const noexcept { return t >= t_on_ && mod_amplitude_ != 0.0; }

    [[nodiscard]] double modulation_phase(double x, double t) const noexcept { return mod_k_ * x - delta_m_ * t; }

    [[nodiscard]] double potential(const Vec3& r, double t, InternalState s) const {
        double u = base_potential(r, s);
        if (modulation_on(t)) u += mod_amplitude_ * std::cos(modulation_phase(r.x, t));
        return u;
    }

    [[nodiscard]] Vec3 force(const Vec3& r, double t, InternalState s) const {
        return evaluate(Trig(k_, r), r.x, t).force(s);
    }

    [[nodiscard]] SigmaIntensities sigma_intensities(const Vec3& r) const {
        return Trig(k_, r).sigma();
    }

    /// Rate of the s -> flip(s) transition: (2 Gamma'_0 / 9) times the
    /// intensity of the opposite circular component.
    [[nodiscard]] double pump_rate(const Vec3& r, InternalState s) const {
        return rate_from(Trig(k_, r).sigma(), s);
    }

    [[nodiscard]] FieldSample sample(const Vec3& r, double t, InternalState s) const {
        const Trig trig(k_, r);
        return {potential(r, t, s), evaluate(trig, r.x, t).force(s), rate_from(trig.sigma(), s)};
    }

    /// Forces on both sublevels and the pumping rates out of both, sharing one
    /// set of trigonometric evaluations. This is what the integrator calls.
    struct Local {
        Vec3 base_grad_common;  ///< state-independent part of +grad U0 / prefactor
        Vec3 base_grad_cross;   ///< gradient of a*b*c (times prefactor)
        double mod_force_x;
        double prefactor;
        SigmaIntensities sigma;

        [[nodiscard]] Vec3 force(InternalState s) const {
            Vec3 f = base_grad_common - sign(s) * base_grad_cross;
            f *= -prefactor;
            f.x += mod_force_x;
            return f;
        }
    };

    [[nodiscard]] Local local(const Vec3& r, double t) const { return evaluate(Trig(k_, r), r.x, t); }

    [[nodiscard]] double rate_from(const SigmaIntensities& sigma, InternalState s) const {
        const double opposite = s == InternalState::Plus ? sigma.minus : sigma.plus;
        return 2.0 * pump_ / 9.0 * opposite;
    }

private:
    struct Trig {
        double a, sa, b, sb, c, sc;
        double kx, ky, kz;

        Trig(const Wavevectors& k, const Vec3& r)
            : a(std::cos(k.kx * r.x)), sa(std::sin(k.kx * r.x)),
              b(std::cos(k.ky * r.y)), sb(std::sin(k.ky * r.y)),
              c(std::cos(k.kz * r.z)), sc(std::sin(k.kz * r.z)),
              kx(k.kx), ky(k.ky), kz(k.kz) {}

        [[nodiscard]] SigmaIntensities sigma() const {
            const double sum = a * a + b * b;
            const double cross = 2.0 * a * b * c;
            // Clamp rounding noise at the exact zeros of each component.
            return {std::max(0.0, 2.0 * (sum - cross)), std::max(0.0, 2.0 * (sum + cross))};
        }
    };

    [[nodiscard]] Local evaluate(const Trig& t3, double x, double t) const {
        Local out{};
        out.prefactor = 8.0 * shift_ / 3.0;
        // d/dr of cos^2 terms
        out.base_grad_common = {-2.0 * t3.kx * t3.a * t3.sa, -2.0 * t3.ky * t3.b * t3.sb, 0.0};
        // d/dr of a*b*c
        out.base_grad_cross = {-t3.kx * t3.sa * t3.b * t3.c, -t3.ky * t3.a * t3.sb * t3.c,
                               -t3.kz * t3.a * t3.b * t3.sc};
        out.mod_force_x = modulation_on(t) ? mod_amplitude_ * mod_k_ * std::sin(modulation_phase(x, t)) : 0.0;
        out.sigma = t3.sigma();
        return out;
    }

    Wavevectors k_;
    double shift_;
    double pump_;
    double mod_amplitude_;
    double mod_k_;
    double delta_m_;
    double t_on_;
};

// Free-function forms of the field operations.

[[nodiscard]] inline double base_potential(const Vec3& r, InternalState s, const LatticeConfig& cfg) {
    return LatticeField(cfg, ModulationConfig{}).base_potential(r, s);
}

[[nodiscard]] inline double modulated_potential(const Vec3& r, double t, InternalState s, const LatticeConfig& cfg,
                                                const ModulationConfig& mod) {
    return LatticeField(cfg, mod).potential(r, t, s);
}

[[nodiscard]] inline Vec3 force(const Vec3& r, double t, InternalState s, const LatticeConfig& cfg,
                                const ModulationConfig& mod) {
    return LatticeField(cfg, mod).force(r, t, s);
}

[[nodiscard]] inline SigmaIntensities sigma_intensities(const Vec3& r, const LatticeConfig& cfg) {
    return LatticeField(cfg, ModulationConfig{}).sigma_intensities(r);
}

[[nodiscard]] inline double pump_rate(const Vec3& r, InternalState s, const LatticeConfig& cfg) {
    return LatticeField(cfg, ModulationConfig{}).pump_rate(r, s);
}

}  // namespace latmc
