#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "dnflow/errors.hpp"

namespace dnflow {

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log of the prefactor
    double r2 = 0.0;
    std::size_t points = 0;
};

// Least squares on (log t, log y) over a time window; y must be positive.
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& series,
                                 double t_lo, double t_hi) {
    std::vector<double> lx, ly;
    for (const auto& [t, y] : series) {
        if (t < t_lo || t > t_hi) continue;
        if (!(t > 0.0) || !(y > 0.0)) throw InvalidSpec("fit_power_law: need positive t and y");
        lx.push_back(std::log(t));
        ly.push_back(std::log(y));
    }
    const std::size_t n = lx.size();
    if (n < 10) throw InvalidSpec("fit_power_law: need >= 10 points in window");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) sx += lx[i], sy += ly[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InvalidSpec("fit_power_law: degenerate window");
    PowerLawFit fit;
    fit.points = n;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& series) {
    if (series.empty()) throw InvalidSpec("fit_power_law: empty series");
    double lo = series.front().first, hi = series.front().first;
    for (const auto& [t, y] : series) lo = std::min(lo, t), hi = std::max(hi, t);
    return fit_power_law(series, lo, hi);
}

}  // namespace dnflow
