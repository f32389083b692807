// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"

namespace latmc {

/// Not enough data, or missing points, for an analysis step.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value with its one-sigma uncertainty.
struct Estimate {
    double value = 0.0;
    double error = 0.0;  ///< one-sigma
};

/// a - b, errors in quadrature.
[[nodiscard]] inline Estimate difference(const Estimate& a, const Estimate& b) {
    return {a.value - b.value, std::hypot(a.error, b.error)};
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Weights w_j with sum_j w_j y_j equal to the OLS slope of y against t.
[[nodiscard]] inline std::vector<double> slope_weights(std::span<const double> t) {
    const auto n = static_cast<double>(t.size());
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= n;
    double sxx = 0.0;
    for (double v : t) sxx += (v - mean) * (v - mean);
    if (!(sxx > 0.0)) throw AnalysisError("degenerate abscissa");
    std::vector<double> w(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) w[j] = (t[j] - mean) / sxx;
    return w;
}

/// Ordinary least squares y = intercept + slope * t.
[[nodiscard]] inline LineFit fit_line(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw AnalysisError("length mismatch");
    if (t.size() < 3) throw AnalysisError("need at least 3 points for a line fit");
    const auto n = static_cast<double>(t.size());
    double tm = 0.0, ym = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        tm += t[j];
        ym += y[j];
    }
    tm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        sxx += (t[j] - tm) * (t[j] - tm);
        sxy += (t[j] - tm) * (y[j] - ym);
    }
    if (!(sxx > 0.0)) throw AnalysisError("degenerate abscissa");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * tm;
    double ssr = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double r = y[j] - fit.intercept - fit.slope * t[j];
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

[[nodiscard]] inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator).
[[nodiscard]] inline double standard_deviation(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Bootstrap standard error of the mean of `x`.
[[nodiscard]] inline double bootstrap_mean_stderr(std::span<const double> x, int resamples, RandomStream& rng) {
    const std::uint64_t n = x.size();
    if (n == 0) throw AnalysisError("empty sample");
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double s = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) s += x[rng.below(n)];
        m = s / static_cast<double>(n);
    }
    return standard_deviation(means);
}

}  // namespace latmc
