// SPDX-License-Identifier: Apache-2.0
//
// Physical parameters in reduced (recoil) units and the closed-form
// predictions derived from them.
//
// Unit convention used throughout the library:
//   hbar = k = omega_r = 1, so the atomic mass is 1/2 and v_r = hbar k / m = 2
//   in (omega_r / k) units.
//   length    : 1/k
//   time      : 1/omega_r
//   velocity  : v_r
//   energy    : E_r = hbar omega_r
//   frequency : omega_r
// In these units dx/dt = 2 v and dv/dt = -grad U.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace latmc {

/// Raised for any out-of-range configuration value. `field()` names the
/// offending key so that front ends can report it.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline constexpr double kPi = std::numbers::pi;

[[nodiscard]] inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Largest accepted lattice half-angle. Close to 90 degrees the z lattice
/// constant diverges and the cell degenerates.
inline constexpr double kMaxThetaDeg = 89.0;

struct LatticeConfig {
    double theta = deg_to_rad(30.0);           ///< half-angle between copropagating beams [rad]
    double light_shift_per_beam = -200.0;      ///< Delta'_0 [omega_r], negative (red detuning)
    std::optional<double> detuning_over_linewidth = -10.0;  ///< Delta / Gamma, negative
    std::optional<double> pump_rate_override;  ///< Gamma'_0 [omega_r]; bypasses the detuning relation

    void validate() const {
        if (!std::isfinite(theta) || theta <= 0.0 || theta >= deg_to_rad(kMaxThetaDeg))
            throw ConfigError("theta", "lattice half-angle must lie in (0, 89) degrees");
        if (!std::isfinite(light_shift_per_beam) || light_shift_per_beam >= 0.0)
            throw ConfigError("light_shift_per_beam", "must be finite and negative");
        if (detuning_over_linewidth &&
            (!std::isfinite(*detuning_over_linewidth) || *detuning_over_linewidth >= 0.0))
            throw ConfigError("atomic_detuning_over_linewidth", "must be finite and negative");
        if (pump_rate_override && (!std::isfinite(*pump_rate_override) || *pump_rate_override < 0.0))
            throw ConfigError("pump_rate_override", "must be finite and non-negative");
        if (!detuning_over_linewidth && !pump_rate_override)
            throw ConfigError("atomic_detuning_over_linewidth",
                              "either atomic_detuning_over_linewidth or pump_rate_override is required");
    }
};

struct ModulationConfig {
    double phi = deg_to_rad(10.0);          ///< half-angle between the two driving beams [rad]
    double light_shift_per_mod_beam = -20.0; ///< Delta'_{0,m} [omega_r], non-positive
    double delta_m = 0.0;                    ///< detuning between the driving beams [omega_r], signed
    double t_on = 0.0;                       ///< switch-on time [1/omega_r]

    void validate() const {
        if (!std::isfinite(phi) || phi <= 0.0 || phi >= kPi / 2.0)
            throw ConfigError("phi", "driving half-angle must lie in (0, 90) degrees");
        if (!std::isfinite(light_shift_per_mod_beam) || light_shift_per_mod_beam > 0.0)
            throw ConfigError("light_shift_per_mod_beam", "must be finite and non-positive");
        if (!std::isfinite(delta_m))
            throw ConfigError("delta_m", "must be finite");
        if (!std::isfinite(t_on) || t_on < 0.0)
            throw ConfigError("t_on", "must be finite and non-negative");
    }

    /// Modulation amplitude delta U = (4/3) Delta'_{0,m} [E_r].
    [[nodiscard]] double amplitude() const { return 4.0 * light_shift_per_mod_beam / 3.0; }

    /// |Delta k_x| = 2 k_m sin(phi) with k_m = k.
    [[nodiscard]] double wavevector() const { return 2.0 * std::sin(phi); }
};

struct Wavevectors {
    double kx;
    double ky;
    double kz;
};

[[nodiscard]] inline Wavevectors derive_wavevectors(const LatticeConfig& cfg) {
    cfg.validate();
    const double s = std::sin(cfg.theta);
    return {s, s, 2.0 * std::cos(cfg.theta)};
}

/// Optical pumping rate Gamma'_0 = Delta'_0 * Gamma / Delta unless overridden.
[[nodiscard]] inline double pump_rate_from_detuning(const LatticeConfig& cfg) {
    if (cfg.pump_rate_override) return *cfg.pump_rate_override;
    if (!cfg.detuning_over_linewidth || *cfg.detuning_over_linewidth == 0.0)
        throw ConfigError("atomic_detuning_over_linewidth",
                          "either atomic_detuning_over_linewidth or pump_rate_override is required");
    return cfg.light_shift_per_beam / *cfg.detuning_over_linewidth;
}

/// Harmonic x-oscillation frequency at a well bottom, 4 sin(theta) sqrt|Delta'_0|.
[[nodiscard]] inline double vibrational_frequency(const LatticeConfig& cfg) {
    cfg.validate();
    return 4.0 * std::sin(cfg.theta) * std::sqrt(std::abs(cfg.light_shift_per_beam));
}

/// Driving detuning at which the modulation moves with the mode velocity.
[[nodiscard]] inline double brillouin_frequency(const LatticeConfig& cfg, const ModulationConfig& mod) {
    mod.validate();
    return 2.0 * std::sin(mod.phi) / std::sin(cfg.theta) * vibrational_frequency(cfg);
}

/// Propagation-mode velocity: half a lattice period per half oscillation.
[[nodiscard]] inline double mode_velocity(const LatticeConfig& cfg) {
    return vibrational_frequency(cfg) / (2.0 * std::sin(cfg.theta));
}

/// Phase velocity of the moving modulation, delta_m / (2 k sin(phi)) in v_r.
[[nodiscard]] inline double phase_velocity(const ModulationConfig& mod) {
    if (!(mod.phi > 0.0) || !(mod.phi < kPi / 2.0))
        throw ConfigError("phi", "driving half-angle must lie in (0, 90) degrees");
    return mod.delta_m / (4.0 * std::sin(mod.phi));
}

/// Upper bound of the state-changing pumping rate, (16/9) Gamma'_0.
[[nodiscard]] inline double max_pump_rate(const LatticeConfig& cfg) {
    return 16.0 / 9.0 * pump_rate_from_detuning(cfg);
}

/// Lowest barrier between neighbouring wells of the same sublevel (the saddle
/// at cos(kx x) = cos(kz z) = 0), (16/3) |Delta'_0| in E_r.
[[nodiscard]] inline double well_depth(const LatticeConfig& cfg) {
    return 16.0 / 3.0 * std::abs(cfg.light_shift_per_beam);
}

/// Largest admissible integration step: 2% of an oscillation period and 5%
/// of the shortest pumping time.
[[nodiscard]] inline double max_time_step(const LatticeConfig& cfg) {
    const double by_oscillation = 0.02 * 2.0 * kPi / vibrational_frequency(cfg);
    const double gamma_max = max_pump_rate(cfg);
    if (gamma_max <= 0.0) return by_oscillation;
    return std::min(by_oscillation, 0.05 / gamma_max);
}

}  // namespace latmc
