#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnflow/errors.hpp"
#include "dnflow/profiles.hpp"
#include "dnflow/quadrature.hpp"

namespace dnflow {

struct SolverConfig {
    double p = 2.0;
    double m = 2.0;
    std::size_t cells = 512;
    double r_max = 4.0;
    double cfl = 0.4;
    double eps_supp_rel = 1e-10;       // support threshold, relative to current sup
    double eps_grad = 1e-12;           // gradient regularization, used only for p < 2
    std::size_t max_steps = 400000000;
    bool auto_extend = true;
    bool outer_absorbing = false;      // open outer boundary (ghost state 0)
    double track_ball_radius = 0.0;    // record mass inside this fixed ball when > 0

    double slow_exponent() const { return p + m - 3.0; }
    // w = u^{(p+m-2)/(p-1)} turns the doubly nonlinear flux into a p-Laplacian flux
    double w_exponent() const { return (p + m - 2.0) / (p - 1.0); }
    double kappa() const { return std::pow((p - 1.0) / (p + m - 2.0), p - 1.0); }

    void validate() const {
        if (!(slow_exponent() > 0.0))
            throw InvalidSpec("SolverConfig: only the degenerate range p+m-3 > 0 is integrated");
        if (!(cfl > 0.0) || cfl > 1.0) throw InvalidSpec("SolverConfig: cfl must be in (0,1]");
        if (!(eps_supp_rel > 0.0)) throw InvalidSpec("SolverConfig: eps_supp must be positive");
        if (cells < 8 || cells % 2 != 0)
            throw InvalidSpec("SolverConfig: cells must be even and >= 8");
    }
};

// Uniform cell partition of [0, R_max] with quadrature-exact cell volumes
// w_i = omega_N int f^{N-1} and weighted volumes int rho f^{N-1}.
struct RadialGrid {
    ManifoldProfile manifold;
    DensityProfile density;
    double r_max = 0.0;
    double dr = 0.0;
    std::vector<double> edge_coeff;  // f(r_edge)^{N-1}, size K+1; zero at the origin
    std::vector<double> cell_vol;    // size K
    std::vector<double> cell_wrho;   // size K

    static RadialGrid build(const ManifoldProfile& mp, const DensityProfile& dp, double r_max,
                            std::size_t cells) {
        RadialGrid g;
        g.manifold = mp;
        g.density = dp;
        g.r_max = r_max;
        g.dr = r_max / double(cells);
        const int n1 = mp.dimension - 1;
        g.edge_coeff.resize(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i)
            g.edge_coeff[i] = std::pow(mp.f(g.dr * double(i)), n1);
        g.cell_vol.resize(cells);
        g.cell_wrho.resize(cells);
        const std::vector<double> breaks = {mp.matching_radius, dp.matching_radius};
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = g.dr * double(i), b = g.dr * double(i + 1);
            g.cell_vol[i] = mp.sphere_area *
                            adaptive_simpson_split([&](double r) { return std::pow(mp.f(r), n1); },
                                                   a, b, breaks, 1e-13, 1e-12);
            g.cell_wrho[i] = mp.sphere_area *
                             adaptive_simpson_split(
                                 [&](double r) { return dp.rho(r) * std::pow(mp.f(r), n1); }, a, b,
                                 breaks, 1e-13, 1e-12);
        }
        return g;
    }

    std::size_t cells() const { return cell_vol.size(); }
    double edge_radius(std::size_t i) const { return dr * double(i); }
    double cell_center(std::size_t i) const { return dr * (double(i) + 0.5); }
};

struct RadialState {
    double time = 0.0;
    std::vector<double> u;  // cell averages, always >= 0

    double sup() const { return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()); }

    double mass(const RadialGrid& grid) const {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += grid.cell_wrho[i] * u[i];
        return s;
    }

    double mass_in_ball(const RadialGrid& grid, double radius) const {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size() && grid.cell_center(i) < radius; ++i)
            s += grid.cell_wrho[i] * u[i];
        return s;
    }

    // Largest cell edge with u above the (scale-free) support threshold.
    double support_radius(const RadialGrid& grid, double eps_rel) const {
        const double thresh = eps_rel * sup();
        for (std::size_t i = u.size(); i-- > 0;)
            if (u[i] > thresh) return grid.edge_radius(i + 1);
        return 0.0;
    }

    nlohmann::json checkpoint(const RadialGrid& grid) const {
        return {{"time", time}, {"r_max", grid.r_max}, {"cells", u.size()}, {"u", u}};
    }

    static RadialState restore(const nlohmann::json& j) {
        RadialState s;
        s.time = j.at("time").get<double>();
        s.u = j.at("u").get<std::vector<double>>();
        return s;
    }
};

// Compactly supported bump c (1 - (r/R0)^2)_+^2 scaled to the requested
// weighted mass; support exactly inside B_{R0}.
inline RadialState init_bump(const RadialGrid& grid, double r0, double mass) {
    if (!(mass > 0.0)) throw InvalidSpec("init_bump: mass must be positive");
    if (!(r0 < grid.r_max / 4.0)) throw InvalidSpec("init_bump: need R0 < R_max/4");
    RadialState st;
    st.u.resize(grid.cells(), 0.0);
    double raw = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const double x = grid.cell_center(i) / r0;
        if (x < 1.0) {
            st.u[i] = (1.0 - x * x) * (1.0 - x * x);
            raw += grid.cell_wrho[i] * st.u[i];
        }
    }
    const double scale = mass / raw;
    for (double& v : st.u) v *= scale;
    return st;
}

// Outward mass flux through interior edge i: -omega_N kappa f^{N-1} |w_r|^{p-2} w_r,
// with a two-point difference of w. Identically zero in vacuum and at both
// boundaries.
inline double flux(const RadialGrid& grid, const RadialState& state, const SolverConfig& cfg,
                   std::size_t i_edge) {
    if (i_edge == 0 || i_edge >= grid.cells()) return 0.0;
    const double b = cfg.w_exponent();
    const double wl = std::pow(state.u[i_edge - 1], b);
    const double wr = std::pow(state.u[i_edge], b);
    if (wl == 0.0 && wr == 0.0) return 0.0;
    const double g = (wr - wl) / grid.dr;
    const double mag = cfg.p < 2.0 ? std::pow(std::abs(g) + cfg.eps_grad, cfg.p - 2.0)
                                   : std::pow(std::abs(g), cfg.p - 2.0);
    return -grid.manifold.sphere_area * cfg.kappa() * grid.edge_coeff[i_edge] * mag * g;
}

// One explicit conservative update with an adaptive CFL time step.
// Returns the dt taken. dt_cap > 0 limits the step (used to land exactly on
// observation times).
inline double step(RadialState& state, const RadialGrid& grid, const SolverConfig& cfg,
                   double dt_cap = 0.0) {
    const std::size_t K = grid.cells();
    const double b = cfg.w_exponent();
    const double kap = cfg.kappa();
    const double area = grid.manifold.sphere_area;

    // the common quadratic cases dominate runtime; avoid pow there
    const bool b_quad = b == 2.0;
    const bool p_lap2 = cfg.p == 2.0;

    static thread_local std::vector<double> w, q;
    w.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i)
        w[i] = b_quad ? state.u[i] * state.u[i] : std::pow(state.u[i], b);

    q.assign(K + 1, 0.0);
    double dt = dt_cap > 0.0 ? dt_cap : 1e300;
    // with an open outer boundary the last edge sees a zero ghost state
    const std::size_t e_last = cfg.outer_absorbing ? K : K - 1;
    for (std::size_t e = 1; e <= e_last; ++e) {
        const double w_right = e == K ? 0.0 : w[e];
        if (w[e - 1] == 0.0 && w_right == 0.0) continue;
        const double g = (w_right - w[e - 1]) / grid.dr;
        const double mag = p_lap2 ? 1.0
                           : cfg.p < 2.0
                               ? std::pow(std::abs(g) + cfg.eps_grad, cfg.p - 2.0)
                               : std::pow(std::abs(g), cfg.p - 2.0);
        const double coeff = area * kap * grid.edge_coeff[e] * mag / grid.dr;
        q[e] = -coeff * (w_right - w[e - 1]);
        // local wave-speed bound: edge conductance times dw/du at the larger state
        const double umax = std::max(state.u[e - 1], e == K ? 0.0 : state.u[e]);
        const double speed = coeff * b * (b_quad ? umax : std::pow(umax, b - 1.0));
        if (speed > 0.0) {
            const double wrho_min = e == K ? grid.cell_wrho[e - 1]
                                           : std::min(grid.cell_wrho[e - 1], grid.cell_wrho[e]);
            const double dt_edge = cfg.cfl * wrho_min / (2.0 * speed);
            dt = std::min(dt, dt_edge);
        }
    }
    if (dt == 1e300) dt = dt_cap > 0.0 ? dt_cap : 1.0;  // vacuum state: any dt is exact
    if (dt < 1e-15 * std::max(state.time, 1.0))
        throw SchemeError("step: dt underflow, problem too stiff for explicit stepping");

    const double sup_before = state.sup();
    for (std::size_t i = 0; i < K; ++i) {
        double v = state.u[i] + dt * (q[i] - q[i + 1]) / grid.cell_wrho[i];
        if (v < 0.0) {
            if (v < -1e-12 * sup_before)
                throw SchemeError("step: negative undershoot beyond rounding at cell " +
                                  std::to_string(i));
            v = 0.0;
        }
        state.u[i] = v;
    }
    state.time += dt;
    return dt;
}

// Conservative coarsening onto a doubled domain: pairs of old cells merge
// exactly into the first half of the new grid.
inline void extend_domain(RadialState& state, RadialGrid& grid) {
    const std::size_t K = grid.cells();
    RadialGrid wide = RadialGrid::build(grid.manifold, grid.density, 2.0 * grid.r_max, K);
    std::vector<double> merged(K, 0.0);
    for (std::size_t j = 0; j < K / 2; ++j) {
        const double wm = grid.cell_wrho[2 * j] + grid.cell_wrho[2 * j + 1];
        merged[j] =
            (grid.cell_wrho[2 * j] * state.u[2 * j] + grid.cell_wrho[2 * j + 1] * state.u[2 * j + 1]) /
            wm;
        wide.cell_wrho[j] = wm;  // keep the discrete mass bit-identical
        wide.cell_vol[j] = grid.cell_vol[2 * j] + grid.cell_vol[2 * j + 1];
    }
    state.u = std::move(merged);
    grid = std::move(wide);
}

struct ObservationPoint {
    double t = 0.0;
    double sup = 0.0;
    double support_radius = 0.0;
    double mass = 0.0;
    double mass_in_ball = 0.0;
    double r_max = 0.0;
};

struct RunResult {
    std::vector<ObservationPoint> series;
    bool truncated = false;  // support reached the boundary with auto_extend off
    std::size_t steps = 0;
};

// March to t_end, recording observables at log-spaced times with ratio
// obs_ratio. Extends the domain before the support can feel the boundary.
inline RunResult run(RadialState& state, RadialGrid& grid, const SolverConfig& cfg, double t_end,
                     double obs_ratio = 1.25) {
    cfg.validate();
    if (!(t_end >= state.time)) throw InvalidSpec("run: t_end must be >= current time");
    if (!(obs_ratio > 1.0)) throw InvalidSpec("run: observation ratio must exceed 1");
    RunResult result;
    auto observe = [&]() {
        ObservationPoint ob;
        ob.t = state.time;
        ob.sup = state.sup();
        ob.support_radius = state.support_radius(grid, cfg.eps_supp_rel);
        ob.mass = state.mass(grid);
        if (cfg.track_ball_radius > 0.0)
            ob.mass_in_ball = state.mass_in_ball(grid, cfg.track_ball_radius);
        ob.r_max = grid.r_max;
        result.series.push_back(ob);
    };
    if (t_end == state.time) return result;

    double next_obs = state.time > 0.0 ? state.time : t_end * 1e-7;
    observe();
    while (state.time < t_end) {
        if (++result.steps > cfg.max_steps) throw SchemeError("run: max step count exceeded");
        const double sup_r = state.support_radius(grid, cfg.eps_supp_rel);
        if (sup_r > grid.r_max - 4.0 * grid.dr) {
            if (cfg.auto_extend)
                extend_domain(state, grid);
            else
                result.truncated = true;
        }
        const double target = std::min(t_end, std::max(next_obs, state.time * (1.0 + 1e-12)));
        step(state, grid, cfg, target - state.time);
        if (state.time >= next_obs) {
            observe();
            while (next_obs <= state.time) next_obs *= obs_ratio;
        }
    }
    if (result.series.empty() || result.series.back().t < state.time) observe();
    return result;
}

}  // namespace dnflow
