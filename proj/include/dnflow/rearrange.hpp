#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dnflow/bundle.hpp"
#include "dnflow/errors.hpp"

namespace dnflow {

// Nonnegative compactly supported radial function, piecewise linear on a
// uniform grid starting at r = 0. Gradients are exact derivatives of the
// interpolant; level sets are exact for the interpolant.
struct RadialTestFunction {
    std::vector<double> radii;   // uniform nodes, radii.front() == 0
    std::vector<double> values;  // nonnegative, values.back() == 0

    double r_max() const { return radii.back(); }
    double sup() const { return *std::max_element(values.begin(), values.end()); }

    double operator()(double r) const {
        if (r <= 0.0) return values.front();
        if (r >= radii.back()) return 0.0;
        const double h = radii[1] - radii[0];
        const std::size_t i = std::min<std::size_t>(radii.size() - 2, std::size_t(r / h));
        const double t = (r - radii[i]) / h;
        // t can round past 1 at a cell boundary; keep the sample nonnegative
        return std::max(0.0, values[i] * (1.0 - t) + values[i + 1] * t);
    }

    double slope(std::size_t cell) const {
        return (values[cell + 1] - values[cell]) / (radii[cell + 1] - radii[cell]);
    }

    void scale(double c) {
        for (double& v : values) v *= c;
    }

    // Super-level set {u > lambda} as a union of disjoint radial intervals,
    // with endpoints solved exactly per linear cell.
    std::vector<std::pair<double, double>> super_level(double lambda) const {
        std::vector<std::pair<double, double>> out;
        bool inside = values.front() > lambda;
        double start = 0.0;
        for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
            const double a = values[i], b = values[i + 1];
            const bool next_inside = b > lambda;
            if (next_inside != inside) {
                const double cross = radii[i] + (lambda - a) / (b - a) * (radii[i + 1] - radii[i]);
                if (inside)
                    out.emplace_back(start, cross);
                else
                    start = cross;
                inside = next_inside;
            }
        }
        if (inside) out.emplace_back(start, radii.back());
        return out;
    }
};

// Nonincreasing right-continuous rearrangement table s -> u*(s) with respect
// to the Riemannian volume.
struct RearrangementTable {
    std::vector<double> s;       // increasing measures
    std::vector<double> lambda;  // matching nonincreasing levels

    double operator()(double ss) const {
        if (ss >= s.back()) return 0.0;
        const auto it = std::upper_bound(s.begin(), s.end(), ss);
        const std::size_t i = it - s.begin();
        if (i == 0) return lambda.front();
        const double t = (ss - s[i - 1]) / (s[i] - s[i - 1]);
        return lambda[i - 1] * (1.0 - t) + lambda[i] * t;
    }

    // int phi(u*(s)) ds by trapezoid on the table
    template <class Phi>
    double integrate(const Phi& phi) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            acc += 0.5 * (phi(lambda[i]) + phi(lambda[i + 1])) * (s[i + 1] - s[i]);
        return acc;
    }
};

// Distribution function mu_lambda = |{u > lambda}| under the volume of the
// bundle's manifold.
inline double level_measure(const GeometricBundle& bundle, const RadialTestFunction& u,
                            double lambda) {
    double acc = 0.0;
    for (const auto& [a, b] : u.super_level(lambda))
        acc += bundle.volume(b) - bundle.volume(a);
    return acc;
}

// Same with the weighted measure rho dmu.
inline double weighted_level_measure(const GeometricBundle& bundle, const RadialTestFunction& u,
                                     double lambda) {
    double acc = 0.0;
    for (const auto& [a, b] : u.super_level(lambda))
        acc += bundle.weighted_volume(b) - bundle.weighted_volume(a);
    return acc;
}

// u*(s) = inf{lambda | mu_lambda < s}: invert the distribution function on a
// dense level sample.
inline RearrangementTable rearrange(const GeometricBundle& bundle, const RadialTestFunction& u,
                                    std::size_t levels = 600) {
    const double top = u.sup();
    if (!(top > 0.0)) return RearrangementTable{{0.0, 1.0}, {0.0, 0.0}};
    RearrangementTable table;
    table.s.reserve(levels + 1);
    table.lambda.reserve(levels + 1);
    for (std::size_t j = 0; j <= levels; ++j) {
        const double lam = top * (1.0 - double(j) / double(levels));
        const double mu = level_measure(bundle, u, lam == 0.0 ? 0.0 : lam * (1.0 + 1e-14));
        table.s.push_back(mu);
        table.lambda.push_back(lam);
    }
    // enforce strict ordering of the measure axis for interpolation
    for (std::size_t i = 1; i < table.s.size(); ++i)
        table.s[i] = std::max(table.s[i], table.s[i - 1] * (1.0 + 1e-15) + 1e-300);
    return table;
}

}  // namespace dnflow
