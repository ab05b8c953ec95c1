#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "dnflow/errors.hpp"

namespace dnflow {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double abs_tol, double rel_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::isnan(delta)) throw NumericError("adaptive_simpson: NaN integrand");
    const double tol = std::max(abs_tol, rel_tol * std::abs(left + right));
    if (depth <= 0) {
        if (std::abs(delta) > 16.0 * tol)
            throw NumericError("adaptive_simpson: recursion depth exhausted");
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, rel_tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b] with mixed absolute/relative tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol = 1e-10,
                        double rel_tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, rel_tol, max_depth);
}

// Same, but forcing panel boundaries at the given interior break points
// (kink locations of piecewise-defined integrands).
template <class F>
double adaptive_simpson_split(const F& f, double a, double b, const std::vector<double>& breaks,
                              double abs_tol = 1e-10, double rel_tol = 1e-10) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double s : breaks)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += adaptive_simpson(f, pts[i], pts[i + 1], abs_tol, rel_tol);
    return total;
}

}  // namespace dnflow
