#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnflow/bundle.hpp"
#include "dnflow/errors.hpp"
#include "dnflow/rearrange.hpp"

namespace dnflow {

struct InequalityRecord {
    std::string id;
    double empirical_constant = 0.0;
    std::size_t worst_index = 0;
    std::size_t samples = 0;
    double p = 0.0, r = 0.0, s = 0.0;

    nlohmann::json to_json() const {
        return {{"id", id},
                {"empirical_constant", empirical_constant},
                {"worst_index", worst_index},
                {"samples", samples},
                {"p", p},
                {"r", r},
                {"s", s}};
    }
};

// Geometry of one test-function grid sampled once: 5-point Gauss nodes per
// cell with measure weights, so every integral over the family is a plain
// dot product.
class RadialQuadrature {
  public:
    RadialQuadrature(const GeometricBundle& bundle, double fn_r_max, std::size_t cells)
        : bundle_(&bundle) {
        static constexpr double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
        static constexpr double gw[5] = {0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};
        const auto& mp = bundle.manifold();
        const int n1 = mp.dimension - 1;
        const double h = fn_r_max / double(cells);
        radii_.resize(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) radii_[i] = h * double(i);
        vol_at_node_.resize(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) vol_at_node_[i] = bundle.volume(radii_[i]);
        const std::size_t n = cells * 5;
        r_.reserve(n);
        wmeas_.reserve(n);
        rho_.reserve(n);
        omega_.reserve(n);
        for (std::size_t i = 0; i < cells; ++i) {
            const double mid = 0.5 * (radii_[i] + radii_[i + 1]);
            for (int g = 0; g < 5; ++g) {
                const double r = mid + 0.5 * h * gx[g];
                r_.push_back(r);
                wmeas_.push_back(0.5 * h * gw[g] * mp.sphere_area * std::pow(mp.f(r), n1));
                rho_.push_back(bundle.density().rho(r));
                omega_.push_back(bundle.omega_at_radius(r));
            }
        }
    }

    const GeometricBundle& bundle() const { return *bundle_; }
    const std::vector<double>& radii() const { return radii_; }
    std::size_t cells() const { return radii_.size() - 1; }
    double cell_measure(std::size_t i) const { return vol_at_node_[i + 1] - vol_at_node_[i]; }

    // int F(r, u(r)) dmu with optional weight arrays
    template <class F>
    double integrate(const RadialTestFunction& u, const F& f) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < r_.size(); ++j)
            acc += wmeas_[j] * f(r_[j], u(r_[j]), rho_[j], omega_[j]);
        return acc;
    }

    // int |grad u|^p dmu over {u > k}: the gradient is constant on each cell
    // of the function's own grid, and the level-set restriction is resolved
    // exactly per cell.
    double grad_integral(const RadialTestFunction& u, double p, double k = 0.0) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < u.radii.size(); ++i) {
            const double g = std::abs(u.slope(i));
            if (g == 0.0) continue;
            double meas;
            if (k <= 0.0) {
                meas = volume_memo(u.radii[i + 1]) - volume_memo(u.radii[i]);
            } else {
                meas = 0.0;
                const double a = u.values[i], b = u.values[i + 1];
                if (a > k || b > k) {
                    double lo = u.radii[i], hi = u.radii[i + 1];
                    if ((a > k) != (b > k)) {
                        const double cross =
                            u.radii[i] + (k - a) / (b - a) * (u.radii[i + 1] - u.radii[i]);
                        (a > k ? hi : lo) = cross;
                    }
                    meas = bundle_->volume(hi) - bundle_->volume(lo);
                }
            }
            acc += std::pow(g, p) * meas;
        }
        return acc;
    }

    double support_measure(const RadialTestFunction& u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < u.radii.size(); ++i)
            if (u.values[i] > 0.0 || u.values[i + 1] > 0.0)
                acc += volume_memo(u.radii[i + 1]) - volume_memo(u.radii[i]);
        return acc;
    }

  private:
    // test functions of one family share a node grid; cache its ball volumes
    double volume_memo(double r) const {
        auto [it, fresh] = vol_memo_.try_emplace(r, 0.0);
        if (fresh) it->second = bundle_->volume(r);
        return it->second;
    }

    const GeometricBundle* bundle_;
    std::vector<double> radii_, vol_at_node_;
    std::vector<double> r_, wmeas_, rho_, omega_;
    mutable std::map<double, double> vol_memo_;
};

// Seed-fixed fuzzing family: mixtures of one to three compact bumps with
// log-uniform widths, centers in [0, r_max/2].
inline std::vector<RadialTestFunction> bump_family(double fn_r_max, std::size_t grid_nodes,
                                                   std::size_t count = 100,
                                                   unsigned seed = 20240817) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> nbumps(1, 3);
    std::uniform_real_distribution<double> center(0.0, 0.5 * fn_r_max);
    std::uniform_real_distribution<double> logw(std::log(fn_r_max / 200.0),
                                                std::log(fn_r_max / 4.0));
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    std::vector<RadialTestFunction> family;
    family.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        RadialTestFunction u;
        u.radii.resize(grid_nodes);
        u.values.assign(grid_nodes, 0.0);
        for (std::size_t i = 0; i < grid_nodes; ++i)
            u.radii[i] = fn_r_max * double(i) / double(grid_nodes - 1);
        const int k = nbumps(rng);
        for (int b = 0; b < k; ++b) {
            const double c = center(rng), w = std::exp(logw(rng)), a = amp(rng);
            for (std::size_t i = 0; i < grid_nodes; ++i) {
                const double x = (u.radii[i] - c) / w;
                if (std::abs(x) < 1.0) u.values[i] += a * (1.0 - x * x) * (1.0 - x * x);
            }
        }
        u.values.back() = 0.0;
        family.push_back(std::move(u));
    }
    return family;
}

namespace detail {

template <class Ratio>
InequalityRecord max_ratio_record(std::string id, std::size_t count, const Ratio& ratio) {
    InequalityRecord rec;
    rec.id = std::move(id);
    rec.samples = count;
    for (std::size_t i = 0; i < count; ++i) {
        const double q = ratio(i);
        if (std::isnan(q)) throw NumericError(rec.id + ": NaN ratio at sample");
        if (q > rec.empirical_constant) {
            rec.empirical_constant = q;
            rec.worst_index = i;
        }
    }
    return rec;
}

}  // namespace detail

// eq:hardy_n -- int u^p / d^p dmu <= gamma int |grad u|^p dmu
inline InequalityRecord verify_hardy(const RadialQuadrature& quad,
                                     const std::vector<RadialTestFunction>& family, double p) {
    auto rec = detail::max_ratio_record("hardy", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double lhs = quad.integrate(
            u, [&](double r, double uv, double, double) { return std::pow(uv / r, p); });
        const double rhs = quad.grad_integral(u, p);
        return rhs == 0.0 ? 0.0 : lhs / rhs;
    });
    rec.p = p;
    return rec;
}

// l:sob -- (int u^{p*} omega(V)^{-p*} dmu)^{(N-p)/N} <= C int |grad u|^p dmu
inline InequalityRecord verify_weighted_sobolev(const RadialQuadrature& quad,
                                                const std::vector<RadialTestFunction>& family,
                                                double p) {
    const int N = quad.bundle().manifold().dimension;
    const double pstar = p * N / (N - p);
    auto rec = detail::max_ratio_record("sobolev_weighted", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double lhs_raw = quad.integrate(u, [&](double, double uv, double, double om) {
            return std::pow(uv, pstar) * std::pow(om, -pstar);
        });
        const double lhs = std::pow(lhs_raw, double(N - p) / N);
        const double rhs = quad.grad_integral(u, p);
        return rhs == 0.0 ? 0.0 : lhs / rhs;
    });
    rec.p = p;
    return rec;
}

// eq:fk_n over a sweep of levels k (given as fractions of each sup)
inline InequalityRecord verify_faber_krahn(const RadialQuadrature& quad,
                                           const std::vector<RadialTestFunction>& family, double p,
                                           const std::vector<double>& k_fractions) {
    const auto& bundle = quad.bundle();
    auto rec = detail::max_ratio_record("faber_krahn", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        double worst = 0.0;
        for (double frac : k_fractions) {
            const double k = frac * u.sup();
            if (k >= u.sup()) continue;  // empty level set
            const double nu = weighted_level_measure(bundle, u, k);
            if (nu <= 0.0) continue;
            const double R = bundle.inv_vol_rho(nu);
            const double lhs = quad.integrate(u, [&](double, double uv, double rho, double) {
                return uv > k ? rho * std::pow(uv - k, p) : 0.0;
            });
            const double rhs =
                bundle.density().rho(R) * std::pow(R, p) * quad.grad_integral(u, p, k);
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
        return worst;
    });
    rec.p = p;
    return rec;
}

// eq:fks_n, the s-version of the Faber-Krahn estimate
inline InequalityRecord verify_faber_krahn_s(const RadialQuadrature& quad,
                                             const std::vector<RadialTestFunction>& family,
                                             double p, double s,
                                             const std::vector<double>& k_fractions) {
    const auto& bundle = quad.bundle();
    auto rec = detail::max_ratio_record("faber_krahn_s", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        double worst = 0.0;
        for (double frac : k_fractions) {
            const double k = frac * u.sup();
            if (k >= u.sup()) continue;
            const double nu = weighted_level_measure(bundle, u, k);
            if (nu <= 0.0) continue;
            const double R = bundle.inv_vol_rho(nu);
            const double lhs = quad.integrate(u, [&](double, double uv, double rho, double) {
                return uv > k ? rho * std::pow(uv - k, s) : 0.0;
            });
            const double rhs = std::pow(bundle.density().rho(R) * std::pow(R, p), s / p) *
                               std::pow(nu, 1.0 - s / p) *
                               std::pow(quad.grad_integral(u, p, k), s / p);
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
        return worst;
    });
    rec.p = p;
    rec.s = s;
    return rec;
}

// eq:emb_old_n with q = s, eq:emb_old_p_n, eq:sgn_n and eq:sgns_n in one
// sweep; returns the four records.
inline std::vector<InequalityRecord> verify_interpolation(
    const RadialQuadrature& quad, const std::vector<RadialTestFunction>& family, double p,
    double r, double s) {
    const auto& bundle = quad.bundle();
    const int N = bundle.manifold().dimension;
    const double pstar = p * N / (N - p);
    if (!(r < p) || !(p < s) || !(s < pstar))
        throw InvalidSpec("verify_interpolation: need r < p < s < p*");

    std::vector<InequalityRecord> out;

    auto pow_int = [&](const RadialTestFunction& u, double q, bool weighted) {
        return quad.integrate(u, [&](double, double uv, double rho, double) {
            return (weighted ? rho : 1.0) * std::pow(uv, q);
        });
    };

    out.push_back(detail::max_ratio_record("emb_old", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double Pq = pow_int(u, s, false), Pr = pow_int(u, r, false);
        if (Pq == 0.0) return 0.0;
        const double Sq = std::pow(Pr, s / (s - r)) * std::pow(Pq, -r / (s - r));
        const double grad = quad.grad_integral(u, p);
        const double rhs = std::pow(bundle.omega(Sq), s) *
                           std::pow(Sq, 1.0 + s / N - s / p) * std::pow(grad, s / p);
        return rhs == 0.0 ? 0.0 : Pq / rhs;
    }));

    out.push_back(detail::max_ratio_record("emb_old_p", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double Pp = pow_int(u, p, false), Pr = pow_int(u, r, false);
        if (Pp == 0.0) return 0.0;
        const double den = N * (p - r) + r * p;
        const double supp = quad.support_measure(u);
        const double rhs = std::pow(bundle.omega(supp), p * N * (p - r) / den) *
                           std::pow(Pr, p * p / den) *
                           std::pow(quad.grad_integral(u, p), N * (p - r) / den);
        return rhs == 0.0 ? 0.0 : Pp / rhs;
    }));

    out.push_back(detail::max_ratio_record("sgn", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double Ep = pow_int(u, p, true), Er = pow_int(u, r, true);
        if (Ep == 0.0) return 0.0;
        const double S = std::pow(Er, p / (p - r)) * std::pow(Ep, -r / (p - r));
        const double R = bundle.inv_vol_rho(S);
        const double rhs =
            bundle.density().rho(R) * std::pow(R, p) * quad.grad_integral(u, p);
        return rhs == 0.0 ? 0.0 : Ep / rhs;
    }));

    out.push_back(detail::max_ratio_record("sgns", family.size(), [&](std::size_t i) {
        const auto& u = family[i];
        const double Es = pow_int(u, s, true), Er = pow_int(u, r, true);
        if (Es == 0.0) return 0.0;
        const double Sig = std::pow(Er, s / (s - r)) * std::pow(Es, -r / (s - r));
        const double R = bundle.inv_vol_rho(Sig);
        const double rhs = std::pow(bundle.density().rho(R) * std::pow(R, p), s / p) *
                           std::pow(Sig, 1.0 - s / p) *
                           std::pow(quad.grad_integral(u, p), s / p);
        return rhs == 0.0 ? 0.0 : Es / rhs;
    }));

    for (auto& rec : out) {
        rec.p = p;
        rec.r = r;
        rec.s = s;
    }
    return out;
}

}  // namespace dnflow
