#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sspatch/numerics.hpp"

namespace sspatch {

/// Result of a Holder-exponent regression.
struct HolderFit {
    bool ok = false;
    double exponent = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    int n_scales = 0;
    std::string message;
};

/// Estimate a Holder exponent from samples (position, value) along a curve.
///
/// Pairs are bucketed into dyadic separation bands; within each band the
/// largest |value difference| defines the modulus of continuity at that
/// scale, and a log-log line fit over the band maxima gives the exponent.
/// Smooth data yields an exponent near 1; the estimate is a lower bound on
/// regularity, never an exact modulus.
inline HolderFit holder_fit(const std::vector<double>& positions, const std::vector<double>& values,
                            int min_scales = 3) {
    HolderFit fit;
    const std::size_t n = positions.size();
    if (n != values.size() || n < 16) {
        fit.message = "holder_fit: need at least 16 samples";
        return fit;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });

    const double span = positions[order.back()] - positions[order.front()];
    if (!(span > 0.0)) {
        fit.message = "holder_fit: degenerate positions";
        return fit;
    }

    constexpr int kMaxScales = 48;
    std::vector<double> best_df(kMaxScales, 0.0);
    std::vector<double> best_dp(kMaxScales, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dp = positions[order[b]] - positions[order[a]];
            if (!(dp > 0.0)) continue;
            int m = static_cast<int>(std::floor(std::log2(span / dp)));
            if (m < 0) m = 0;
            if (m >= kMaxScales) continue;
            const double df = std::abs(values[order[b]] - values[order[a]]);
            if (df > best_df[m]) {
                best_df[m] = df;
                best_dp[m] = dp;
            }
        }
    }

    std::vector<double> xs, ys;
    for (int m = 0; m < kMaxScales; ++m) {
        if (best_df[m] > 0.0 && best_dp[m] > 0.0) {
            xs.push_back(std::log(best_dp[m]));
            ys.push_back(std::log(best_df[m]));
        }
    }
    fit.n_scales = static_cast<int>(xs.size());
    if (fit.n_scales < min_scales) {
        fit.message = "holder_fit: too few distinct scales (values may be constant)";
        return fit;
    }
    const LineFit line = fit_line(xs, ys);
    fit.ok = true;
    fit.exponent = line.slope;
    fit.intercept = line.intercept;
    fit.rms_residual = line.rms_residual;
    return fit;
}

} // namespace sspatch
