#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "dnflow/errors.hpp"

namespace dnflow {

// Area of the unit sphere S^{N-1} in R^N.
inline double unit_sphere_area(int dim) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// Warping factor of the rotationally symmetric metric dr^2 + f(r)^2 dxi^2.
// The built-in family is linear up to the matching point A and a power-log
// profile beyond it, with the linear slope fixed by continuity at A.
struct ManifoldProfile {
    int dimension = 3;
    double beta = 1.0;
    double nu = 0.0;
    double matching_radius = std::exp(1.0);  // A
    std::function<double(double)> warp;      // overrides the built-in family when set
    double sphere_area = unit_sphere_area(3);

    static ManifoldProfile power_log(int dim, double beta, double nu,
                                     double matching_radius = std::exp(1.0)) {
        if (dim < 2) throw InvalidSpec("ManifoldProfile: dimension must be >= 2");
        if (matching_radius < std::exp(1.0) - 1e-12)
            throw InvalidSpec("ManifoldProfile: matching radius A must be >= e");
        ManifoldProfile mp;
        mp.dimension = dim;
        mp.beta = beta;
        mp.nu = nu;
        mp.matching_radius = matching_radius;
        mp.sphere_area = unit_sphere_area(dim);
        return mp;
    }

    // Slope of the linear inner part, f(A-) = f(A+).
    double inner_slope() const {
        const double a = matching_radius;
        return std::pow(a, beta - 1.0) * std::pow(std::log(a), nu);
    }

    double f(double r) const {
        if (warp) return warp(r);
        if (r <= matching_radius) return inner_slope() * r;
        return std::pow(r, beta) * std::pow(std::log(r), nu);
    }
};

// Radial density rho(r): constant up to B, power-log decay beyond.
struct DensityProfile {
    double alpha = 0.0;  // asymptotic decay exponent
    double mu = 0.0;
    double matching_radius = std::exp(1.0);  // B
    double alpha1 = 0.0;                     // monotonicity window (alpha1, alpha2)
    double alpha2 = 0.0;
    std::function<double(double)> density;  // overrides the built-in family when set

    static DensityProfile power_log(double alpha, double mu, double matching_radius,
                                    double alpha1, double alpha2) {
        if (matching_radius < std::exp(1.0) - 1e-12)
            throw InvalidSpec("DensityProfile: matching radius B must be >= e");
        DensityProfile dp;
        dp.alpha = alpha;
        dp.mu = mu;
        dp.matching_radius = matching_radius;
        dp.alpha1 = alpha1;
        dp.alpha2 = alpha2;
        return dp;
    }

    double rho(double r) const {
        if (density) return density(r);
        const double b = matching_radius;
        if (r <= b) return std::pow(b, -alpha) * std::pow(std::log(b), mu);
        return std::pow(r, -alpha) * std::pow(std::log(r), mu);
    }
};

}  // namespace dnflow
