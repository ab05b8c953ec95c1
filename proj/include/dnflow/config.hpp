#pragma once

#include <cstddef>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dnflow/bundle.hpp"
#include "dnflow/errors.hpp"
#include "dnflow/profiles.hpp"

namespace dnflow {

// One Cauchy problem: exponents, built-in profile parameters, tabulation
// range. Mirrors the JSON config schema.
struct ProblemSpec {
    int N = 3;
    double p = 2.0;
    double m = 2.0;
    double beta = 1.0;
    double nu = 0.0;
    double A = std::exp(1.0);
    double alpha = 0.0;
    double mu = 0.0;
    double B = std::exp(1.0);
    double alpha1 = 0.01;
    double alpha2 = 0.02;
    double r_max = 1e4;
    std::size_t nodes = 2048;

    ManifoldProfile manifold() const { return ManifoldProfile::power_log(N, beta, nu, A); }

    DensityProfile density() const {
        return DensityProfile::power_log(alpha, mu, B, alpha1, alpha2);
    }

    GeometricBundle bundle(double quad_tol = 1e-10) const {
        return GeometricBundle(manifold(), density(), p, m, r_max, nodes, quad_tol);
    }

    static ProblemSpec from_json(const nlohmann::json& j) {
        ProblemSpec s;
        s.N = j.value("N", s.N);
        s.p = j.value("p", s.p);
        s.m = j.value("m", s.m);
        s.beta = j.value("beta", s.beta);
        s.nu = j.value("nu", s.nu);
        s.A = j.value("A", s.A);
        s.alpha = j.value("alpha", s.alpha);
        s.mu = j.value("mu", s.mu);
        s.B = j.value("B", s.B);
        s.alpha1 = j.value("alpha1", s.alpha1);
        s.alpha2 = j.value("alpha2", s.alpha2);
        s.r_max = j.value("r_max", s.r_max);
        s.nodes = j.value("nodes", s.nodes);
        s.validate();
        return s;
    }

    nlohmann::json to_json() const {
        return {{"N", N},   {"p", p},       {"m", m},           {"beta", beta},
                {"nu", nu}, {"A", A},       {"alpha", alpha},   {"mu", mu},
                {"B", B},   {"alpha1", alpha1}, {"alpha2", alpha2}, {"r_max", r_max},
                {"nodes", nodes}};
    }

    static ProblemSpec load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidSpec("cannot open config " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }

    void validate() const {
        if (N < 2) throw InvalidSpec("N must be >= 2");
        if (!(p > 1.0) || p > N) throw InvalidSpec("need 1 < p <= N");
        if (!(beta > (p - 1.0) / (N - 1.0)) || beta > 1.0 + 1e-12)
            throw InvalidSpec("need (p-1)/(N-1) < beta <= 1");
        if (B < A - 1e-12) throw InvalidSpec("need B >= A");
        if (alpha < 0.0) throw InvalidSpec("alpha must be >= 0");
        if (!(alpha1 > 0.0) || !(alpha2 > alpha1) || !(alpha2 < p))
            throw InvalidSpec("need 0 < alpha1 < alpha2 < p");
    }
};

}  // namespace dnflow
