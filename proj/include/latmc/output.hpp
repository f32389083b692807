// SPDX-License-Identifier: Apache-2.0
//
// Result serialization: CSV tables, the JSON run sidecar, the xi table and a
// quick-look SVG plot.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace latmc {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest decimal that round-trips, always with a '.' separator.
[[nodiscard]] inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Closed-form predictions

struct Prediction {
    double pump_rate;       ///< Gamma'_0
    double omega_x;         ///< Omega_x
    double omega_b;         ///< Omega_B
    double mode_velocity;   ///< v-bar
    double phase_velocity;  ///< v_phi at the configured delta_m
    double phase_velocity_at_omega_b;
    double gamma_max;
    double max_dt;
};

[[nodiscard]] inline Prediction predict(const LatticeConfig& cfg, const ModulationConfig& mod) {
    cfg.validate();
    mod.validate();
    Prediction p{};
    p.pump_rate = pump_rate_from_detuning(cfg);
    p.omega_x = vibrational_frequency(cfg);
    p.omega_b = brillouin_frequency(cfg, mod);
    p.mode_velocity = mode_velocity(cfg);
    p.phase_velocity = phase_velocity(mod);
    ModulationConfig at_b = mod;
    at_b.delta_m = p.omega_b;
    p.phase_velocity_at_omega_b = phase_velocity(at_b);
    p.gamma_max = max_pump_rate(cfg);
    p.max_dt = max_time_step(cfg);
    return p;
}

/// Omega_B for an externally supplied Omega_x, in the same (arbitrary) units.
[[nodiscard]] inline double brillouin_frequency_for(double omega_x, const LatticeConfig& cfg,
                                                    const ModulationConfig& mod) {
    cfg.validate();
    mod.validate();
    return 2.0 * std::sin(mod.phi) / std::sin(cfg.theta) * omega_x;
}

[[nodiscard]] inline std::string format_prediction(const Prediction& p) {
    std::ostringstream os;
    os << "pump_rate            " << format_number(p.pump_rate) << " omega_r\n"
       << "omega_x              " << format_number(p.omega_x) << " omega_r\n"
       << "omega_b              " << format_number(p.omega_b) << " omega_r\n"
       << "mode_velocity        " << format_number(p.mode_velocity) << " v_r\n"
       << "phase_velocity       " << format_number(p.phase_velocity) << " v_r\n"
       << "phase_velocity_at_b  " << format_number(p.phase_velocity_at_omega_b) << " v_r\n"
       << "gamma_max            " << format_number(p.gamma_max) << " omega_r\n"
       << "recommended_dt       " << format_number(p.max_dt) << " 1/omega_r\n";
    return os.str();
}

[[nodiscard]] inline nlohmann::json to_json(const Prediction& p) {
    return {{"pump_rate", p.pump_rate},
            {"omega_x", p.omega_x},
            {"omega_b", p.omega_b},
            {"mode_velocity", p.mode_velocity},
            {"phase_velocity", p.phase_velocity},
            {"gamma_max", p.gamma_max},
            {"recommended_dt", p.max_dt}};
}

// ---------------------------------------------------------------------------
// Tables

inline constexpr const char* kCmHeader = "t,cm_x,cm_y,cm_z,var_x,var_y,var_z";
inline constexpr const char* kSweepHeader = "knob,v_cx,v_cx_err,v_cz,v_cz_err";

[[nodiscard]] inline std::string cm_csv(const EnsembleResult& r) {
    std::string out = std::string(kCmHeader) + "\n";
    for (std::size_t j = 0; j < r.times.size(); ++j) {
        const Vec3& c = r.cm_position[j];
        const Vec3& v = r.position_variance[j];
        for (double x : {r.times[j], c.x, c.y, c.z, v.x, v.y}) out += format_number(x) + ",";
        out += format_number(v.z) + "\n";
    }
    return out;
}

[[nodiscard]] inline std::string sweep_csv(const SweepResult& s) {
    std::string out;
    auto row = [&out](double knob, const Estimate& x, const Estimate& z) {
        out += format_number(knob) + "," + format_number(x.value) + "," + format_number(x.error) + "," +
               format_number(z.value) + "," + format_number(z.error) + "\n";
    };
    if (s.kind == SweepKind::PumpRate) {
        out += "# knob = pump rate Gamma'_0 [omega_r]; v_cx holds xi = v_cx(+Omega_B) - v_cx(-Omega_B) and "
               "v_cz the same difference of v_cz, all in v_r\n";
        out += std::string(kSweepHeader) + "\n";
        for (const auto& p : s.xi) row(p.knob, p.xi, p.xi_z);
    } else {
        out += "# knob = delta_m [omega_r]; v_cx, v_cz in v_r\n";
        out += std::string(kSweepHeader) + "\n";
        for (const auto& p : s.points) row(p.knob, p.v_cx, p.v_cz);
    }
    return out;
}

/// Present when the sweep is a pump-rate scan or contains the +-Omega_B pair.
[[nodiscard]] inline std::optional<std::string> xi_table(const SweepResult& s, double omega_b) {
    if (s.xi.empty()) return std::nullopt;
    std::string out = "# xi = v_cx(+Omega_B) - v_cx(-Omega_B) [v_r]; Omega_B = " + format_number(omega_b) +
                      " omega_r\nknob,xi,xi_err\n";
    for (const auto& p : s.xi)
        out += format_number(p.knob) + "," + format_number(p.xi.value) + "," + format_number(p.xi.error) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// SVG quick look

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;
    std::string colour;
};

[[nodiscard]] inline std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& xlabel,
                                          const std::string& ylabel) {
    constexpr double width = 640, height = 420, left = 70, right = 20, top = 20, bottom = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = 0.0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i] - s.err[i]);
            ymax = std::max(ymax, s.y[i] + s.err[i]);
        }
    if (!(xmax > xmin)) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (height - top - bottom); };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
       << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (ymin < 0.0 && ymax > 0.0)
        os << "<line x1=\"" << left << "\" x2=\"" << width - right << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
           << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << left << "\" y=\"" << height - bottom + 16 << "\">" << num(xmin) << "</text>\n"
       << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"end\">"
       << num(xmax) << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << num(ymax) << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << height - bottom << "\" text-anchor=\"end\">" << num(ymin)
       << "</text>\n"
       << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
       << xlabel << "</text>\n"
       << "<text transform=\"translate(16," << (top + height - bottom) / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    int legend = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << "<line x1=\"" << px(s.x[i]) << "\" x2=\"" << px(s.x[i]) << "\" y1=\"" << py(s.y[i] - s.err[i])
               << "\" y2=\"" << py(s.y[i] + s.err[i]) << "\" stroke=\"" << s.colour << "\"/>\n"
               << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << s.colour
               << "\"/>\n";
        }
        os << "<text x=\"" << width - right - 8 << "\" y=\"" << top + 16 + 14 * legend++ << "\" text-anchor=\"end\" "
           << "fill=\"" << s.colour << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

[[nodiscard]] inline std::string sweep_svg(const SweepResult& s) {
    PlotSeries x{"x", {}, {}, {}, "#1f77b4"};
    PlotSeries z{"z", {}, {}, {}, "#d62728"};
    if (s.kind == SweepKind::PumpRate) {
        x.label = "xi (x)";
        z.label = "xi (z)";
        for (const auto& p : s.xi) {
            x.x.push_back(p.knob);
            x.y.push_back(p.xi.value);
            x.err.push_back(p.xi.error);
            z.x.push_back(p.knob);
            z.y.push_back(p.xi_z.value);
            z.err.push_back(p.xi_z.error);
        }
        return svg_plot({x, z}, "pump rate [omega_r]", "xi [v_r]");
    }
    x.label = "v_cx";
    z.label = "v_cz";
    for (const auto& p : s.points) {
        x.x.push_back(p.knob);
        x.y.push_back(p.v_cx.value);
        x.err.push_back(p.v_cx.error);
        z.x.push_back(p.knob);
        z.y.push_back(p.v_cz.value);
        z.err.push_back(p.v_cz.error);
    }
    return svg_plot({x, z}, "delta_m [omega_r]", "CM velocity [v_r]");
}

// ---------------------------------------------------------------------------
// Writing

/// Writes a set of files into one directory. Each file is written to a
/// temporary name and renamed into place; on failure every file of the set
/// is removed again.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet() {
        if (!committed_) discard();
    }

    void write(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        const auto tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
            out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
            out.flush();
            if (!out) {
                std::error_code ec;
                std::filesystem::remove(tmp, ec);
                throw IoError("write failed for " + tmp.string());
            }
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) {
            std::filesystem::remove(tmp, ec);
            throw IoError("cannot rename " + tmp.string() + " to " + path.string());
        }
        written_.push_back(path);
    }

    void commit() { committed_ = true; }

    [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    void discard() noexcept {
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

[[nodiscard]] inline nlohmann::json run_metadata(const RunConfig& cfg, const std::string& command, double dt,
                                                 std::uint64_t stride) {
    return {{"artifact", "latmc"},
            {"version", kVersion},
            {"command", command},
            {"master_seed", cfg.ensemble.master_seed},
            {"dt", dt},
            {"sample_stride", stride},
            {"predictions", to_json(predict(cfg.lattice, cfg.modulation))},
            {"config", to_json(cfg)}};
}

}  // namespace latmc
