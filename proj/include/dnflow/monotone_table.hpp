#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dnflow/errors.hpp"

namespace dnflow {

// Strictly monotone tabulation of a positive function of a positive variable.
// Interpolation is monotone cubic Hermite (Fritsch-Carlson) in log-log
// coordinates, which is near-exact for the power-log profiles tabulated here.
// Below the first node the table continues as a pure power law with the
// boundary log-slope; above the last node evaluation is a range error.
class MonotoneTable {
  public:
    MonotoneTable() = default;

    MonotoneTable(std::vector<double> nodes, std::vector<double> values) {
        if (nodes.size() != values.size() || nodes.size() < 4)
            throw InvalidSpec("MonotoneTable: need >= 4 matching nodes/values");
        lx_.reserve(nodes.size());
        ly_.reserve(values.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!(nodes[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i]))
                throw NumericError("MonotoneTable: nodes and values must be finite positive");
            lx_.push_back(std::log(nodes[i]));
            ly_.push_back(std::log(values[i]));
        }
        increasing_ = ly_.back() > ly_.front();
        const double sign = increasing_ ? 1.0 : -1.0;
        for (std::size_t i = 0; i + 1 < lx_.size(); ++i) {
            if (!(lx_[i + 1] > lx_[i]))
                throw InvalidSpec("MonotoneTable: abscissae not strictly increasing");
            if (!(sign * (ly_[i + 1] - ly_[i]) > 0.0))
                throw RegimeError("MonotoneTable: ordinates not strictly monotone");
        }
        build_slopes();
    }

    bool increasing() const { return increasing_; }
    double x_min() const { return std::exp(lx_.front()); }
    double x_max() const { return std::exp(lx_.back()); }
    double y_min() const { return std::exp(std::min(ly_.front(), ly_.back())); }
    double y_max() const { return std::exp(std::max(ly_.front(), ly_.back())); }
    std::size_t size() const { return lx_.size(); }
    double node(std::size_t i) const { return std::exp(lx_[i]); }
    double value(std::size_t i) const { return std::exp(ly_[i]); }

    double eval(double x) const {
        if (!(x > 0.0)) throw RangeError("MonotoneTable::eval: x must be positive");
        const double lx = std::log(x);
        if (lx > lx_.back() + 1e-12) throw RangeError("MonotoneTable::eval: beyond tabulated range");
        if (lx <= lx_.front()) {
            // power-law continuation with the boundary slope
            return std::exp(ly_.front() + d_.front() * (lx - lx_.front()));
        }
        return std::exp(hermite(std::min(lx, lx_.back())));
    }

    // Local log-log slope d log y / d log x.
    double log_slope(double x) const {
        const double lx = std::log(x);
        if (lx <= lx_.front()) return d_.front();
        if (lx >= lx_.back()) return d_.back();
        return hermite_deriv(lx);
    }

    // Inverse of the interpolant: bracketed bisection plus Newton polish.
    double invert(double y) const {
        if (!(y > 0.0)) throw RangeError("MonotoneTable::invert: y must be positive");
        double ly = std::log(y);
        const double lo_val = increasing_ ? ly_.front() : ly_.back();
        const double hi_val = increasing_ ? ly_.back() : ly_.front();
        if (ly > hi_val + 1e-12) throw RangeError("MonotoneTable::invert: beyond tabulated range");
        ly = std::min(ly, hi_val);
        if (ly < lo_val) {
            // mirror of the power-law continuation below the table
            const std::size_t edge = increasing_ ? 0 : lx_.size() - 1;
            return std::exp(lx_[edge] + (ly - ly_[edge]) / d_[edge]);
        }
        // locate the containing segment by binary search over node ordinates
        const double sign = increasing_ ? 1.0 : -1.0;
        std::size_t lo = 0, hi = lx_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (sign * ly_[mid] <= sign * ly ? lo : hi) = mid;
        }
        double a = lx_[lo], b = lx_[hi];
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = hermite_on(lo, m) - ly;
            if (std::abs(fm) < 1e-15) return std::exp(m);
            (sign * fm < 0.0 ? a : b) = m;
        }
        double x = 0.5 * (a + b);
        const double der = hermite_deriv_on(lo, x);
        if (der != 0.0) {
            const double nx = x - (hermite_on(lo, x) - ly) / der;
            if (nx > lx_[lo] && nx < lx_[hi]) x = nx;
        }
        return std::exp(x);
    }

  private:
    void build_slopes() {
        const std::size_t n = lx_.size();
        std::vector<double> sec(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            sec[i] = (ly_[i + 1] - ly_[i]) / (lx_[i + 1] - lx_[i]);
        d_.assign(n, 0.0);
        d_.front() = sec.front();
        d_.back() = sec.back();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (sec[i - 1] * sec[i] <= 0.0)
                d_[i] = 0.0;
            else {
                const double w1 = 2.0 * (lx_[i + 1] - lx_[i]) + (lx_[i] - lx_[i - 1]);
                const double w2 = (lx_[i + 1] - lx_[i]) + 2.0 * (lx_[i] - lx_[i - 1]);
                d_[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);  // harmonic mean
            }
        }
        // Fritsch-Carlson clamp keeps the interpolant monotone
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double s = sec[i];
            if (s == 0.0) continue;
            const double a = d_[i] / s, b = d_[i + 1] / s;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double t = 3.0 / std::sqrt(r);
                d_[i] = t * a * s;
                d_[i + 1] = t * b * s;
            }
        }
    }

    std::size_t segment(double lx) const {
        const auto it = std::upper_bound(lx_.begin(), lx_.end(), lx);
        const std::size_t hi = std::min<std::size_t>(lx_.size() - 1,
                                                     std::max<std::ptrdiff_t>(1, it - lx_.begin()));
        return hi - 1;
    }

    double hermite_on(std::size_t i, double lx) const {
        const double h = lx_[i + 1] - lx_[i];
        const double t = (lx - lx_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ly_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
               (-2 * t3 + 3 * t2) * ly_[i + 1] + (t3 - t2) * h * d_[i + 1];
    }

    double hermite_deriv_on(std::size_t i, double lx) const {
        const double h = lx_[i + 1] - lx_[i];
        const double t = (lx - lx_[i]) / h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * ly_[i] + (3 * t2 - 4 * t + 1) * h * d_[i] +
                (-6 * t2 + 6 * t) * ly_[i + 1] + (3 * t2 - 2 * t) * h * d_[i + 1]) /
               h;
    }

    double hermite(double lx) const { return hermite_on(segment(lx), lx); }
    double hermite_deriv(double lx) const { return hermite_deriv_on(segment(lx), lx); }

    std::vector<double> lx_, ly_, d_;
    bool increasing_ = true;
};

}  // namespace dnflow
