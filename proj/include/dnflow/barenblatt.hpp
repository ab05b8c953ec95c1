#pragma once

#include <cmath>

#include "dnflow/errors.hpp"
#include "dnflow/profiles.hpp"

namespace dnflow {

// Exact self-similar source solution of rho u_t = div(u^{m-1} grad u) with
// rho = 1 on Euclidean R^N (p = 2). Since div(u^{m-1} grad u) = (1/m) Lap u^m,
// this is the classical porous-medium source solution evaluated at time t/m:
//   u(r,t) = tau^{-k} (C - kappa r^2 tau^{-2k/N})_+^{1/(m-1)},  tau = t/m,
// with k = N/(N(m-1)+2), kappa = k(m-1)/(2mN) and C fixed by the mass.
struct BarenblattSolution {
    int dim = 3;
    double m = 2.0;
    double mass = 1.0;
    double k = 0.0;
    double kappa = 0.0;
    double C = 0.0;

    BarenblattSolution(int dim_, double m_, double mass_) : dim(dim_), m(m_), mass(mass_) {
        if (!(m > 1.0)) throw InvalidSpec("BarenblattSolution: need m > 1");
        const double n = dim;
        k = n / (n * (m - 1.0) + 2.0);
        kappa = k * (m - 1.0) / (2.0 * m * n);
        // mass = omega_N kappa^{-N/2} C^{1/(m-1)+N/2} * (1/2) B(N/2, m/(m-1))
        const double a = 1.0 / (m - 1.0);
        const double J = 0.5 * std::tgamma(0.5 * n) * std::tgamma(a + 1.0) /
                         std::tgamma(0.5 * n + a + 1.0);
        const double coeff = unit_sphere_area(dim) * std::pow(kappa, -0.5 * n) * J;
        C = std::pow(mass / coeff, 1.0 / (a + 0.5 * n));
    }

    double operator()(double r, double t) const {
        const double tau = t / m;
        const double inner = C - kappa * r * r * std::pow(tau, -2.0 * k / dim);
        if (inner <= 0.0) return 0.0;
        return std::pow(tau, -k) * std::pow(inner, 1.0 / (m - 1.0));
    }

    double front_radius(double t) const {
        const double tau = t / m;
        return std::sqrt(C / kappa) * std::pow(tau, k / dim);
    }

    double sup(double t) const { return std::pow(t / m, -k) * std::pow(C, 1.0 / (m - 1.0)); }
};

}  // namespace dnflow
