// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace latmc {

/// n points from a to b inclusive; endpoints exact.
[[nodiscard]] inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? a : (i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

/// n logarithmically spaced points from a to b inclusive (a, b > 0).
[[nodiscard]] inline std::vector<double> logspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? a
                        : (i == 0 ? a
                                  : (i + 1 == n ? b
                                                : std::exp(la + (lb - la) * static_cast<double>(i) /
                                                                    static_cast<double>(n - 1))));
    return out;
}

/// Driving-detuning grid in units of Omega_B: 21 points over [-2, 2] with
/// step 1/5, built from integers so that the +-1 points are exact.
[[nodiscard]] inline std::vector<double> default_delta_grid(double omega_b) {
    std::vector<double> out;
    for (int i = -10; i <= 10; ++i) out.push_back(omega_b * static_cast<double>(i) / 5.0);
    return out;
}

[[nodiscard]] inline std::vector<double> default_pump_grid() { return logspace(0.5, 50.0, 8); }

}  // namespace latmc
