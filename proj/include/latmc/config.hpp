// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a JSON object with reduced-unit fields. Angles may be
// given in radians ("theta", "phi") or degrees ("theta_deg", "phi_deg").
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemble.hpp"

namespace latmc {

/// Unit of the sweep / delta_m values in a config file.
enum class FrequencyUnit { OmegaR, OmegaB };

struct SweepConfig {
    SweepKind kind = SweepKind::None;
    std::vector<double> values;  ///< delta_m or Gamma'_0 in omega_r; empty selects the default grid
};

struct RunConfig {
    LatticeConfig lattice;
    ModulationConfig modulation;
    EnsembleSpec ensemble;
    SweepConfig sweep;
    std::filesystem::path output_dir = "out";

    void validate() const {
        lattice.validate();
        modulation.validate();
        ensemble.validate();
        for (double v : sweep.values)
            if (!std::isfinite(v)) throw ConfigError("sweep.values", "must be finite");
        if (sweep.kind == SweepKind::PumpRate)
            for (double v : sweep.values)
                if (v < 0.0) throw ConfigError("sweep.values", "pumping rates must be non-negative");
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw ConfigError(section, "must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
    }
}

inline double number(const json& obj, const char* key, const std::string& section) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(section + "." + key, "must be a number");
    return v.get<double>();
}

inline void read_number(const json& obj, const char* key, const std::string& section, double& out) {
    if (obj.contains(key)) out = number(obj, key, section);
}

inline void read_angle(const json& obj, const char* key, const std::string& section, double& out) {
    const std::string deg = std::string(key) + "_deg";
    if (obj.contains(key) && obj.contains(deg))
        throw ConfigError(section + "." + key, "give either " + std::string(key) + " or " + deg + ", not both");
    if (obj.contains(key)) out = number(obj, key, section);
    if (obj.contains(deg)) out = deg_to_rad(number(obj, deg.c_str(), section));
}

inline void read_optional(const json& obj, const char* key, const std::string& section, std::optional<double>& out) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null())
        out.reset();
    else
        out = number(obj, key, section);
}

inline std::uint64_t unsigned_integer(const json& obj, const char* key, const std::string& section) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(section + "." + key, "must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline FrequencyUnit unit(const json& obj, const char* key, const std::string& section) {
    if (!obj.contains(key)) return FrequencyUnit::OmegaR;
    const auto& v = obj.at(key);
    if (v == "omega_r") return FrequencyUnit::OmegaR;
    if (v == "omega_b") return FrequencyUnit::OmegaB;
    throw ConfigError(section + "." + key, "must be \"omega_r\" or \"omega_b\"");
}

}  // namespace detail

[[nodiscard]] inline RunConfig parse_config(const nlohmann::json& root) {
    using detail::json;
    RunConfig cfg;
    detail::reject_unknown(root, "", {"lattice", "modulation", "ensemble", "integrator", "sweep", "output_dir"});

    if (root.contains("lattice")) {
        const json& l = root["lattice"];
        detail::reject_unknown(l, "lattice",
                               {"theta", "theta_deg", "light_shift_per_beam", "atomic_detuning_over_linewidth",
                                "pump_rate_override"});
        detail::read_angle(l, "theta", "lattice", cfg.lattice.theta);
        detail::read_number(l, "light_shift_per_beam", "lattice", cfg.lattice.light_shift_per_beam);
        detail::read_optional(l, "atomic_detuning_over_linewidth", "lattice", cfg.lattice.detuning_over_linewidth);
        detail::read_optional(l, "pump_rate_override", "lattice", cfg.lattice.pump_rate_override);
    }
    cfg.lattice.validate();

    FrequencyUnit delta_unit = FrequencyUnit::OmegaR;
    if (root.contains("modulation")) {
        const json& m = root["modulation"];
        detail::reject_unknown(m, "modulation",
                               {"phi", "phi_deg", "light_shift_per_mod_beam", "delta_m", "delta_m_units"});
        detail::read_angle(m, "phi", "modulation", cfg.modulation.phi);
        detail::read_number(m, "light_shift_per_mod_beam", "modulation", cfg.modulation.light_shift_per_mod_beam);
        detail::read_number(m, "delta_m", "modulation", cfg.modulation.delta_m);
        delta_unit = detail::unit(m, "delta_m_units", "modulation");
    }
    cfg.modulation.validate();
    const double omega_b = brillouin_frequency(cfg.lattice, cfg.modulation);
    if (delta_unit == FrequencyUnit::OmegaB) cfg.modulation.delta_m *= omega_b;

    if (root.contains("ensemble")) {
        const json& e = root["ensemble"];
        detail::reject_unknown(e, "ensemble",
                               {"n_atoms", "master_seed", "burn_in", "run_time", "thermal_spread", "sample_stride",
                                "position_spread", "threads"});
        if (e.contains("n_atoms")) cfg.ensemble.n_atoms = detail::unsigned_integer(e, "n_atoms", "ensemble");
        if (e.contains("master_seed"))
            cfg.ensemble.master_seed = detail::unsigned_integer(e, "master_seed", "ensemble");
        detail::read_number(e, "burn_in", "ensemble", cfg.ensemble.burn_in);
        detail::read_number(e, "run_time", "ensemble", cfg.ensemble.run_time);
        detail::read_number(e, "thermal_spread", "ensemble", cfg.ensemble.thermal_spread);
        detail::read_number(e, "position_spread", "ensemble", cfg.ensemble.position_spread);
        if (e.contains("sample_stride"))
            cfg.ensemble.sample_stride = detail::unsigned_integer(e, "sample_stride", "ensemble");
        if (e.contains("threads"))
            cfg.ensemble.threads = static_cast<unsigned>(detail::unsigned_integer(e, "threads", "ensemble"));
    }

    if (root.contains("integrator")) {
        const json& i = root["integrator"];
        detail::reject_unknown(i, "integrator", {"dt", "recoil", "elastic_scattering"});
        detail::read_number(i, "dt", "integrator", cfg.ensemble.integrator.dt);
        if (i.contains("recoil")) {
            const auto& r = i["recoil"];
            if (r == "isotropic")
                cfg.ensemble.integrator.recoil = RecoilModel::Isotropic;
            else if (r == "off")
                cfg.ensemble.integrator.recoil = RecoilModel::Off;
            else
                throw ConfigError("integrator.recoil", "must be \"isotropic\" or \"off\"");
        }
        if (i.contains("elastic_scattering")) {
            if (!i["elastic_scattering"].is_boolean())
                throw ConfigError("integrator.elastic_scattering", "must be a boolean");
            cfg.ensemble.integrator.elastic_scattering = i["elastic_scattering"].get<bool>();
        }
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        detail::reject_unknown(s, "sweep", {"kind", "values", "units"});
        if (s.contains("kind")) {
            const auto& k = s["kind"];
            if (k == "none")
                cfg.sweep.kind = SweepKind::None;
            else if (k == "delta_m")
                cfg.sweep.kind = SweepKind::DeltaM;
            else if (k == "pump_rate")
                cfg.sweep.kind = SweepKind::PumpRate;
            else
                throw ConfigError("sweep.kind", "must be \"none\", \"delta_m\" or \"pump_rate\"");
        }
        const FrequencyUnit u = detail::unit(s, "units", "sweep");
        if (u == FrequencyUnit::OmegaB && cfg.sweep.kind == SweepKind::PumpRate)
            throw ConfigError("sweep.units", "omega_b units apply to delta_m sweeps only");
        if (s.contains("values")) {
            if (!s["values"].is_array()) throw ConfigError("sweep.values", "must be an array of numbers");
            for (const auto& v : s["values"]) {
                if (!v.is_number()) throw ConfigError("sweep.values", "must be an array of numbers");
                double x = v.get<double>();
                if (u == FrequencyUnit::OmegaB) x *= omega_b;
                cfg.sweep.values.push_back(x);
            }
        }
    }

    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string()) throw ConfigError("output_dir", "must be a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    cfg.validate();
    return cfg;
}

[[nodiscard]] inline RunConfig parse_config_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    try {
        return parse_config(root);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", e.what());
    }
}

/// I/O failure while reading or writing run files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

/// Canonical echo. Angles are written in radians and frequencies in omega_r,
/// so parsing the echo reproduces the configuration exactly.
[[nodiscard]] inline nlohmann::json to_json(const RunConfig& cfg) {
    using nlohmann::json;
    json j;
    j["lattice"] = {{"theta", cfg.lattice.theta},
                    {"light_shift_per_beam", cfg.lattice.light_shift_per_beam},
                    {"atomic_detuning_over_linewidth",
                     cfg.lattice.detuning_over_linewidth ? json(*cfg.lattice.detuning_over_linewidth) : json()},
                    {"pump_rate_override",
                     cfg.lattice.pump_rate_override ? json(*cfg.lattice.pump_rate_override) : json()}};
    j["modulation"] = {{"phi", cfg.modulation.phi},
                       {"light_shift_per_mod_beam", cfg.modulation.light_shift_per_mod_beam},
                       {"delta_m", cfg.modulation.delta_m}};
    j["ensemble"] = {{"n_atoms", cfg.ensemble.n_atoms},
                     {"master_seed", cfg.ensemble.master_seed},
                     {"burn_in", cfg.ensemble.burn_in},
                     {"run_time", cfg.ensemble.run_time},
                     {"thermal_spread", cfg.ensemble.thermal_spread},
                     {"position_spread", cfg.ensemble.position_spread},
                     {"sample_stride", cfg.ensemble.sample_stride}};
    j["integrator"] = {{"dt", cfg.ensemble.integrator.dt},
                       {"recoil", cfg.ensemble.integrator.recoil == RecoilModel::Isotropic ? "isotropic" : "off"},
                       {"elastic_scattering", cfg.ensemble.integrator.elastic_scattering}};
    const char* kind = cfg.sweep.kind == SweepKind::DeltaM     ? "delta_m"
                       : cfg.sweep.kind == SweepKind::PumpRate ? "pump_rate"
                                                               : "none";
    j["sweep"] = {{"kind", kind}, {"values", cfg.sweep.values}, {"units", "omega_r"}};
    j["output_dir"] = cfg.output_dir.string();
    return j;
}

}  // namespace latmc
