#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "dnflow/errors.hpp"
#include "dnflow/monotone_table.hpp"
#include "dnflow/profiles.hpp"
#include "dnflow/quadrature.hpp"

namespace dnflow {

// All geometric and density-derived functions of one model manifold:
// volume V and its inverse, the ball isoperimetric profile h, the weighted
// volume V_rho with inverse R_rho, the characteristic function psi with
// inverse Z~, and the quasi-monotone W. Immutable after construction; node
// values are quadrature-exact and point evaluations between nodes are
// re-integrated from the nearest node, so inversions can be bisected on the
// exact function with table-based brackets.
class GeometricBundle {
  public:
    GeometricBundle(ManifoldProfile manifold, DensityProfile density, double p, double m,
                    double r_max, std::size_t nodes = 2048, double quad_tol = 1e-10)
        : manifold_(std::move(manifold)),
          density_(std::move(density)),
          p_(p),
          m_(m),
          r_max_(r_max),
          quad_tol_(quad_tol) {
        if (!(r_max > r_min_)) throw InvalidSpec("GeometricBundle: r_max too small");
        if (nodes < 16) throw InvalidSpec("GeometricBundle: too few nodes");
        tabulate(nodes);
    }

    const ManifoldProfile& manifold() const { return manifold_; }
    const DensityProfile& density() const { return density_; }
    double p() const { return p_; }
    double m() const { return m_; }
    double r_max() const { return r_max_; }
    double slow_exponent() const { return p_ + m_ - 3.0; }
    bool psi_invertible() const { return psi_invertible_; }
    bool vol_rho_invertible() const { return vol_rho_invertible_; }

    const MonotoneTable& volume_table() const { return vol_table_; }
    const MonotoneTable& vol_rho_table() const {
        if (!vol_rho_invertible_) throw RegimeError("V_rho not invertible on this bundle");
        return vol_rho_table_;
    }
    const MonotoneTable& psi_table() const {
        if (!psi_invertible_) throw RegimeError("psi not invertible on this bundle");
        return psi_table_;
    }

    // V(R) = omega_N int_0^R f^{N-1}, re-integrated from the nearest node.
    double volume(double radius) const {
        if (radius < 0.0) throw RangeError("volume: negative radius");
        if (radius > r_max_ * (1.0 + 1e-12)) throw RangeError("volume: beyond r_max");
        if (radius == 0.0) return 0.0;
        const int n1 = manifold_.dimension - 1;
        const auto g = [&](double r) { return std::pow(manifold_.f(r), n1); };
        double base_r = 0.0, base_v = 0.0;
        if (radius >= radii_.front()) {
            const auto it = std::upper_bound(radii_.begin(), radii_.end(), radius);
            const std::size_t i = (it - radii_.begin()) - 1;
            base_r = radii_[i];
            base_v = vols_[i];
        }
        if (radius == base_r) return base_v;
        const double tail = adaptive_simpson_split(g, base_r, radius, {manifold_.matching_radius},
                                                   quad_tol_, quad_tol_);
        return base_v + manifold_.sphere_area * tail;
    }

    double inverse_volume(double v) const {
        return invert_on(vol_table_, [&](double r) { return volume(r); }, v);
    }

    // Ball isoperimetric profile h(v) = omega_N f(V^{-1}(v))^{N-1}.
    double isoperimetric_h(double v) const {
        if (!(v > 0.0)) throw RangeError("isoperimetric_h: volume must be positive");
        const double r = inverse_volume(v);
        return manifold_.sphere_area * std::pow(manifold_.f(r), manifold_.dimension - 1);
    }

    // omega(v) = v^{(N-1)/N} / h(v), the deviation from Euclidean isoperimetry.
    double omega(double v) const {
        const int n = manifold_.dimension;
        return std::pow(v, double(n - 1) / n) / isoperimetric_h(v);
    }

    // h(V(R)) without the inversion: on a model manifold the ball profile is
    // exactly omega_N f(R)^{N-1}.
    double h_at_radius(double radius) const {
        return manifold_.sphere_area * std::pow(manifold_.f(radius), manifold_.dimension - 1);
    }

    double omega_at_radius(double radius) const {
        const int n = manifold_.dimension;
        return std::pow(volume(radius), double(n - 1) / n) / h_at_radius(radius);
    }

    double vol_rho(double radius) const {
        if (radius == 0.0) return 0.0;
        return density_.rho(radius) * volume(radius);
    }

    // mu_rho(B_R) = omega_N int_0^R rho f^{N-1}, the weighted ball measure.
    double weighted_volume(double radius) const {
        if (radius < 0.0) throw RangeError("weighted_volume: negative radius");
        if (radius > r_max_ * (1.0 + 1e-12)) throw RangeError("weighted_volume: beyond r_max");
        if (radius == 0.0) return 0.0;
        const int n1 = manifold_.dimension - 1;
        const auto g = [&](double r) {
            return density_.rho(r) * std::pow(manifold_.f(r), n1);
        };
        double base_r = 0.0, base_v = 0.0;
        if (radius >= radii_.front()) {
            const auto it = std::upper_bound(radii_.begin(), radii_.end(), radius);
            const std::size_t i = (it - radii_.begin()) - 1;
            base_r = radii_[i];
            base_v = wvols_[i];
        }
        if (radius == base_r) return base_v;
        const double tail = adaptive_simpson_split(
            g, base_r, radius, {manifold_.matching_radius, density_.matching_radius}, quad_tol_,
            quad_tol_);
        return base_v + manifold_.sphere_area * tail;
    }

    double inv_vol_rho(double s) const {
        if (!vol_rho_invertible_)
            throw RegimeError("V_rho not invertible; the mass-to-radius map degenerates");
        return invert_on(vol_rho_table_, [&](double r) { return vol_rho(r); }, s);
    }

    // psi(R) = V_rho(R)^{p+m-3} rho(R) R^p.
    double psi(double radius) const {
        if (radius == 0.0) return 0.0;
        return std::pow(vol_rho(radius), slow_exponent()) * density_.rho(radius) *
               std::pow(radius, p_);
    }

    double z_tilde(double s) const {
        if (!psi_invertible_)
            throw RegimeError("psi not invertible; sup-estimate hypotheses fail");
        if (s == 0.0) return 0.0;
        return invert_on(psi_table_, [&](double r) { return psi(r); }, s);
    }

    // W(s) = rho(R_rho(s)) R_rho(s)^p s^{-(p-a2)/(N-a1)}.
    double characteristic_W(double s) const {
        if (!(s > 0.0)) throw RangeError("characteristic_W: argument must be positive");
        const double r = inv_vol_rho(s);
        const double expo = (p_ - density_.alpha2) / (manifold_.dimension - density_.alpha1);
        return density_.rho(r) * std::pow(r, p_) * std::pow(s, -expo);
    }

    void export_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw NumericError("export_csv: cannot open " + path);
        out << "r,V,h,omega,vol_rho,psi\n";
        out.precision(17);
        for (std::size_t i = 0; i < vol_table_.size(); ++i) {
            const double r = vol_table_.node(i);
            const double v = vol_table_.value(i);
            out << r << ',' << v << ',' << isoperimetric_h(v) << ',' << omega(v) << ','
                << vol_rho(r) << ',' << psi(r) << '\n';
        }
    }

  private:
    void tabulate(std::size_t nodes) {
        const int n1 = manifold_.dimension - 1;
        const auto g = [&](double r) { return std::pow(manifold_.f(r), n1); };
        std::vector<double> r(nodes), v(nodes), vr(nodes), ps(nodes);
        const double lr0 = std::log(r_min_), lr1 = std::log(r_max_);
        for (std::size_t i = 0; i < nodes; ++i)
            r[i] = std::exp(lr0 + (lr1 - lr0) * double(i) / double(nodes - 1));
        r.back() = r_max_;
        double acc = manifold_.sphere_area * adaptive_simpson(g, 0.0, r[0], quad_tol_, quad_tol_);
        v[0] = acc;
        for (std::size_t i = 1; i < nodes; ++i) {
            acc += manifold_.sphere_area * adaptive_simpson_split(g, r[i - 1], r[i],
                                                                  {manifold_.matching_radius},
                                                                  quad_tol_, quad_tol_);
            v[i] = acc;
        }
        const auto grho = [&](double rr) { return density_.rho(rr) * g(rr); };
        wvols_.resize(nodes);
        double wacc =
            manifold_.sphere_area * adaptive_simpson(grho, 0.0, r[0], quad_tol_, quad_tol_);
        wvols_[0] = wacc;
        for (std::size_t i = 1; i < nodes; ++i) {
            wacc += manifold_.sphere_area *
                    adaptive_simpson_split(grho, r[i - 1], r[i],
                                           {manifold_.matching_radius, density_.matching_radius},
                                           quad_tol_, quad_tol_);
            wvols_[i] = wacc;
        }
        for (std::size_t i = 0; i < nodes; ++i) {
            vr[i] = density_.rho(r[i]) * v[i];
            ps[i] = std::pow(vr[i], slow_exponent()) * density_.rho(r[i]) * std::pow(r[i], p_);
        }
        radii_ = r;
        vols_ = v;
        vol_table_ = MonotoneTable(r, v);
        // V_rho flattens out for strongly decaying densities; inversion is
        // then refused lazily rather than at construction
        vol_rho_invertible_ = true;
        for (std::size_t i = 0; i + 1 < nodes; ++i)
            if (!(vr[i + 1] > vr[i])) {
                vol_rho_invertible_ = false;
                break;
            }
        if (vol_rho_invertible_) vol_rho_table_ = MonotoneTable(r, vr);
        psi_invertible_ = true;
        for (std::size_t i = 0; i + 1 < nodes; ++i)
            if (!(ps[i + 1] > ps[i])) {
                psi_invertible_ = false;
                break;
            }
        if (psi_invertible_) psi_table_ = MonotoneTable(r, ps);
    }

    // Bisection on the exact function, bracketed by table nodes whose values
    // coincide with it; one Newton-free bisection to ~1e-14 relative.
    template <class F>
    double invert_on(const MonotoneTable& table, const F& fn, double y) const {
        if (!(y >= 0.0)) throw RangeError("invert: negative value");
        if (y == 0.0) return 0.0;
        if (y > table.y_max() * (1.0 + 1e-12)) throw RangeError("invert: beyond tabulated range");
        if (y <= table.value(0)) {
            // power continuation below the first node
            const double s = table.log_slope(table.node(0));
            return table.node(0) * std::pow(y / table.value(0), 1.0 / s);
        }
        std::size_t lo = 0, hi = table.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (table.value(mid) <= y ? lo : hi) = mid;
        }
        double a = table.node(lo), b = table.node(hi);
        for (int it = 0; it < 60 && (b - a) > 1e-15 * b; ++it) {
            const double mid = 0.5 * (a + b);
            (fn(mid) <= y ? a : b) = mid;
        }
        return 0.5 * (a + b);
    }

    ManifoldProfile manifold_;
    DensityProfile density_;
    std::vector<double> radii_, vols_, wvols_;
    double p_, m_, r_max_, quad_tol_;
    double r_min_ = 1e-6;
    MonotoneTable vol_table_, vol_rho_table_, psi_table_;
    bool psi_invertible_ = false;
    bool vol_rho_invertible_ = false;
};

}  // namespace dnflow
