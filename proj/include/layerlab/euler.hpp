// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/scenario.hpp"

namespace layerlab {

// The reduced Euler system decouples: u1 follows from time quadrature per z
// node (the density divides out), u2 from exact characteristics driven by the
// accumulated drift X(t;z) = int_0^t u1(tau;z) dtau. Everything is computed on
// a fine time grid (sub intervals per recorded stamp interval) with composite
// Simpson rules, so the outer solution is far more accurate than any of the
// O(eps^{1/4}) quantities measured against it.

namespace detail {

/// Cumulative composite Simpson over a uniform grid, one column at a time.
/// g has nf rows; out[i] = int_0^{t_i} g. nf must be odd.
inline void cumulative_simpson(const std::vector<std::vector<double>>& g, double h,
                               std::vector<std::vector<double>>& out) {
    const std::size_t nf = g.size();
    const std::size_t n = g[0].size();
    out.assign(nf, std::vector<double>(n, 0.0));
    for (std::size_t m = 0; m + 2 < nf; m += 2) {
        for (std::size_t j = 0; j < n; ++j) {
            double base = out[m][j];
            out[m + 1][j] =
                base + h / 12.0 * (5.0 * g[m][j] + 8.0 * g[m + 1][j] - g[m + 2][j]);
            out[m + 2][j] = base + h / 3.0 * (g[m][j] + 4.0 * g[m + 1][j] + g[m + 2][j]);
        }
    }
}

}  // namespace detail

struct EulerSolution {
    GridPtr grid;
    std::vector<double> stamps;
    TimeSeries<Field1D> u1;     // u1^0(t;z) at stamps
    TimeSeries<Field1D> drift;  // X(t;z) at stamps

    // fine time grid and cumulative tables (empty when f1 is identically 0)
    int sub = 4;
    std::vector<double> ft;
    std::vector<std::vector<double>> F1, F1z, F1zz;  // cumulative f1 and z-derivatives
    std::vector<std::vector<double>> X, Xz, Xzz;     // drift and z-derivatives
    std::vector<double> a_nodes, az_nodes, azz_nodes;
    bool f1_zero = true;
    bool drift_zero = true;  // true when u1^0 is identically 0

    double fdt() const { return ft[1] - ft[0]; }
    int nf() const { return static_cast<int>(ft.size()); }

    int fine_index(double t, bool* exact = nullptr) const {
        double r = t / fdt();
        int i = static_cast<int>(std::llround(r));
        i = std::max(0, std::min(nf() - 1, i));
        if (exact) *exact = std::fabs(t - ft[i]) <= 1e-12 * std::max(1.0, stamps.back());
        return i;
    }

    /// Cubic interpolation in t on a fine table column (exact on fine nodes).
    double interp(const std::vector<std::vector<double>>& tbl, double t, int j) const {
        bool exact = false;
        int i = fine_index(t, &exact);
        if (exact) return tbl[i][j];
        int i0 = std::max(0, std::min(nf() - 4, i - 1));
        double c[4], r = (t - ft[i0]) / fdt();
        c[0] = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
        c[1] = r * (r - 2.0) * (r - 3.0) / 2.0;
        c[2] = -r * (r - 1.0) * (r - 3.0) / 2.0;
        c[3] = r * (r - 1.0) * (r - 2.0) / 6.0;
        return c[0] * tbl[i0][j] + c[1] * tbl[i0 + 1][j] + c[2] * tbl[i0 + 2][j] +
               c[3] * tbl[i0 + 3][j];
    }

    double u1_at(double t, int j) const {
        return f1_zero ? a_nodes[j] : a_nodes[j] + interp(F1, t, j);
    }
    double du1dz_at(double t, int j) const {
        return f1_zero ? az_nodes[j] : az_nodes[j] + interp(F1z, t, j);
    }
    double dzzu1_at(double t, int j) const {
        return f1_zero ? azz_nodes[j] : azz_nodes[j] + interp(F1zz, t, j);
    }
    double drift_at(double t, int j) const {
        return f1_zero ? a_nodes[j] * t : interp(X, t, j);
    }
    double drift_dz_at(double t, int j) const {
        return f1_zero ? az_nodes[j] * t : interp(Xz, t, j);
    }
    double drift_dzz_at(double t, int j) const {
        return f1_zero ? azz_nodes[j] * t : interp(Xzz, t, j);
    }

    int wall_node(Side s) const { return s == Side::lower ? 0 : grid->nz() - 1; }
    double u1_wall(Side s, double t) const { return u1_at(t, wall_node(s)); }
    double du1dz_wall(Side s, double t) const { return du1dz_at(t, wall_node(s)); }
    double drift_wall(Side s, double t) const { return drift_at(t, wall_node(s)); }
};

/// Solves the reduced Euler system on the stamp grid. Scenario functions are
/// sampled analytically; no spatial interpolation anywhere.
inline EulerSolution solve_euler(const Scenario& s, GridPtr grid, int stamp_count,
                                 int sub = 4) {
    require(sub >= 2 && sub % 2 == 0, "solve_euler: sub must be even and >= 2");
    EulerSolution e;
    e.grid = grid;
    e.sub = sub;
    e.stamps = make_stamps(s.T, stamp_count);
    const int nz = grid->nz();
    const int nf = sub * (stamp_count - 1) + 1;
    e.ft.resize(nf);
    for (int i = 0; i < nf; ++i) e.ft[i] = s.T * i / (nf - 1);
    e.ft.back() = s.T;

    e.a_nodes.resize(nz);
    e.az_nodes.resize(nz);
    e.azz_nodes.resize(nz);
    for (int j = 0; j < nz; ++j) {
        double z = grid->z[j];
        e.a_nodes[j] = detail::eval(s.a.v, "a", z);
        e.az_nodes[j] = detail::eval(s.a.dz, "a.dz", z);
        e.azz_nodes[j] = detail::eval(s.a.dzz, "a.dzz", z);
    }
    e.f1_zero = !s.has_f1();

    if (!e.f1_zero) {
        const double h = e.ft[1] - e.ft[0];
        std::vector<std::vector<double>> g(nf, std::vector<double>(nz));
        auto fill = [&](auto&& fn, const char* name) {
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nz; ++j)
                    g[i][j] = detail::eval(fn, name, e.ft[i], grid->z[j]);
        };
        fill(s.f1.v, "f1");
        detail::cumulative_simpson(g, h, e.F1);
        fill(s.f1.dz, "f1.dz");
        detail::cumulative_simpson(g, h, e.F1z);
        fill(s.f1.dzz, "f1.dzz");
        detail::cumulative_simpson(g, h, e.F1zz);

        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nz; ++j) g[i][j] = e.a_nodes[j] + e.F1[i][j];
        detail::cumulative_simpson(g, h, e.X);
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nz; ++j) g[i][j] = e.az_nodes[j] + e.F1z[i][j];
        detail::cumulative_simpson(g, h, e.Xz);
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nz; ++j) g[i][j] = e.azz_nodes[j] + e.F1zz[i][j];
        detail::cumulative_simpson(g, h, e.Xzz);
    }

    e.drift_zero = true;
    for (int j = 0; j < nz && e.drift_zero; ++j)
        if (e.a_nodes[j] != 0.0) e.drift_zero = false;
    if (!e.f1_zero) e.drift_zero = false;

    for (int k = 0; k < stamp_count; ++k) {
        Field1D u(grid, e.stamps[k]);
        Field1D X(grid, e.stamps[k]);
        int idx = k * sub;
        for (int j = 0; j < nz; ++j) {
            u.v[j] = e.f1_zero ? e.a_nodes[j] : e.a_nodes[j] + e.F1[idx][j];
            X.v[j] = e.f1_zero ? e.a_nodes[j] * e.stamps[k]
                               : e.X[idx][j];
        }
        e.u1.push(e.stamps[k], std::move(u));
        e.drift.push(e.stamps[k], std::move(X));
    }
    return e;
}

/// u1 part only (quadrature of the forced ODE per z node).
inline TimeSeries<Field1D> solve_euler_u1(const Scenario& s, GridPtr grid,
                                          int stamp_count) {
    return solve_euler(s, grid, stamp_count).u1;
}

namespace detail {

// Simpson accumulation of a characteristic-path integral of f2 (or one of its
// x-derivatives) up to fine index `upto`, for one (x,z) point.
template <class Fn>
double path_integral(const EulerSolution& e, Fn&& integrand, int upto) {
    if (upto == 0) return 0.0;
    const double h = e.fdt();
    double acc = 0.0;
    int m = 0;
    for (; m + 2 <= upto; m += 2)
        acc += h / 3.0 * (integrand(m) + 4.0 * integrand(m + 1) + integrand(m + 2));
    if (m + 1 == upto)  // odd tail, Newton-Cotes on the half pair
        acc += h / 12.0 * (5.0 * integrand(m) + 8.0 * integrand(m + 1) - integrand(m + 2));
    return acc;
}

}  // namespace detail

/// u2^0 at one recorded stamp via exact characteristics. Periodic wrapping is
/// exact through the scenario's analytic catalog functions.
inline Field2D euler_u2_at(const Scenario& s, const EulerSolution& e, int stamp_idx) {
    const auto& grid = *e.grid;
    const int nx = grid.nx, nz = grid.nz();
    const double t = e.stamps[stamp_idx];
    const int upto = stamp_idx * e.sub;
    Field2D out(e.grid, t);
    for (int j = 0; j < nz; ++j) {
        const double z = grid.z[j];
        const double Xt = e.drift_at(t, j);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = grid.x(ix);
            double v = detail::eval(s.b.v, "b", wrap_periodic(x - Xt, s.L), z);
            if (s.has_f2()) {
                v += detail::path_integral(e,
                    [&](int m) {
                        double xs = x - (Xt - e.drift_at(e.ft[m], j));
                        return detail::eval(s.f2.v, "f2", e.ft[m],
                                            wrap_periodic(xs, s.L), z);
                    },
                    upto);
            }
            out.at(ix, j) = v;
        }
    }
    return out;
}

/// Materializes the whole u2^0 series (transport solve along characteristics).
inline TimeSeries<Field2D> solve_euler_u2(const Scenario& s, const EulerSolution& e) {
    TimeSeries<Field2D> out;
    for (int k = 0; k < static_cast<int>(e.stamps.size()); ++k)
        out.push(e.stamps[k], euler_u2_at(s, e, k));
    return out;
}

/// dx u2^0 at a stamp (analytic chain rule along characteristics).
inline Field2D euler_dxu2_at(const Scenario& s, const EulerSolution& e, int stamp_idx) {
    const auto& grid = *e.grid;
    const double t = e.stamps[stamp_idx];
    const int upto = stamp_idx * e.sub;
    Field2D out(e.grid, t);
    for (int j = 0; j < grid.nz(); ++j) {
        const double z = grid.z[j];
        const double Xt = e.drift_at(t, j);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.x(ix);
            double v = detail::eval(s.b.dx, "b.dx", wrap_periodic(x - Xt, s.L), z);
            if (s.has_f2())
                v += detail::path_integral(e,
                    [&](int m) {
                        double xs = x - (Xt - e.drift_at(e.ft[m], j));
                        return detail::eval(s.f2.dx, "f2.dx", e.ft[m],
                                            wrap_periodic(xs, s.L), z);
                    },
                    upto);
            out.at(ix, j) = v;
        }
    }
    return out;
}

inline Field2D euler_dxxu2_at(const Scenario& s, const EulerSolution& e, int stamp_idx) {
    const auto& grid = *e.grid;
    const double t = e.stamps[stamp_idx];
    const int upto = stamp_idx * e.sub;
    Field2D out(e.grid, t);
    for (int j = 0; j < grid.nz(); ++j) {
        const double z = grid.z[j];
        const double Xt = e.drift_at(t, j);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.x(ix);
            double v = detail::eval(s.b.dxx, "b.dxx", wrap_periodic(x - Xt, s.L), z);
            if (s.has_f2())
                v += detail::path_integral(e,
                    [&](int m) {
                        double xs = x - (Xt - e.drift_at(e.ft[m], j));
                        return detail::eval(s.f2.dxx, "f2.dxx", e.ft[m],
                                            wrap_periodic(xs, s.L), z);
                    },
                    upto);
            out.at(ix, j) = v;
        }
    }
    return out;
}

/// dzz u2^0 at a stamp: full chain rule through the z-dependent drift.
inline Field2D euler_dzzu2_at(const Scenario& s, const EulerSolution& e, int stamp_idx) {
    const auto& grid = *e.grid;
    const double t = e.stamps[stamp_idx];
    const int upto = stamp_idx * e.sub;
    Field2D out(e.grid, t);
    for (int j = 0; j < grid.nz(); ++j) {
        const double z = grid.z[j];
        const double Xt = e.drift_at(t, j);
        const double Xtz = e.drift_dz_at(t, j);
        const double Xtzz = e.drift_dzz_at(t, j);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.x(ix);
            double xi = wrap_periodic(x - Xt, s.L);
            double v = detail::eval(s.b.dxx, "b.dxx", xi, z) * Xtz * Xtz -
                       detail::eval(s.b.dx, "b.dx", xi, z) * Xtzz -
                       2.0 * detail::eval(s.b.dxz, "b.dxz", xi, z) * Xtz +
                       detail::eval(s.b.dzz, "b.dzz", xi, z);
            if (s.has_f2())
                v += detail::path_integral(e,
                    [&](int m) {
                        double ts = e.ft[m];
                        double dXz = Xtz - e.drift_dz_at(ts, j);
                        double dXzz = Xtzz - e.drift_dzz_at(ts, j);
                        double xs = wrap_periodic(x - (Xt - e.drift_at(ts, j)), s.L);
                        return detail::eval(s.f2.dxx, "f2.dxx", ts, xs, z) * dXz * dXz -
                               detail::eval(s.f2.dx, "f2.dx", ts, xs, z) * dXzz -
                               2.0 * detail::eval(s.f2.dxz, "f2.dxz", ts, xs, z) * dXz +
                               detail::eval(s.f2.dzz, "f2.dzz", ts, xs, z);
                    },
                    upto);
            out.at(ix, j) = v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wall traces (arbitrary t within the horizon, for the corrector solvers)

inline double euler_u2_wall(const Scenario& s, const EulerSolution& e, Side side,
                            double t, double x) {
    const int j = e.wall_node(side);
    const double zi = wall_z(side);
    const double Xt = e.drift_at(t, j);
    double v = detail::eval(s.b.v, "b", wrap_periodic(x - Xt, s.L), zi);
    if (s.has_f2()) {
        bool exact = false;
        int upto = e.fine_index(t, &exact);
        require(exact, "euler_u2_wall: t must lie on the fine time grid");
        v += detail::path_integral(e,
            [&](int m) {
                double xs = x - (Xt - e.drift_at(e.ft[m], j));
                return detail::eval(s.f2.v, "f2", e.ft[m], wrap_periodic(xs, s.L), zi);
            },
            upto);
    }
    return v;
}

inline double euler_dxu2_wall(const Scenario& s, const EulerSolution& e, Side side,
                              double t, double x) {
    const int j = e.wall_node(side);
    const double zi = wall_z(side);
    const double Xt = e.drift_at(t, j);
    double v = detail::eval(s.b.dx, "b.dx", wrap_periodic(x - Xt, s.L), zi);
    if (s.has_f2()) {
        bool exact = false;
        int upto = e.fine_index(t, &exact);
        require(exact, "euler_dxu2_wall: t must lie on the fine time grid");
        v += detail::path_integral(e,
            [&](int m) {
                double xs = x - (Xt - e.drift_at(e.ft[m], j));
                return detail::eval(s.f2.dx, "f2.dx", e.ft[m], wrap_periodic(xs, s.L), zi);
            },
            upto);
    }
    return v;
}

/// d/dz (rho0 dx u2^0) at the wall, analytic.
inline double euler_ddz_rho_dxu2_wall(const Scenario& s, const EulerSolution& e, Side side,
                                      double t, double x) {
    const int j = e.wall_node(side);
    const double zi = wall_z(side);
    const double rho = s.rho_wall(side);
    const double drho = s.drho_wall(side);
    const double Xt = e.drift_at(t, j);
    const double Xtz = e.drift_dz_at(t, j);
    double xi = wrap_periodic(x - Xt, s.L);
    // dz(dx u2^0) = -b_xx dzX + b_xz (+ path terms)
    double dzdx = -detail::eval(s.b.dxx, "b.dxx", xi, zi) * Xtz +
                  detail::eval(s.b.dxz, "b.dxz", xi, zi);
    double dxu2 = detail::eval(s.b.dx, "b.dx", xi, zi);
    if (s.has_f2()) {
        bool exact = false;
        int upto = e.fine_index(t, &exact);
        require(exact, "euler_ddz_rho_dxu2_wall: t must lie on the fine time grid");
        dzdx += detail::path_integral(e,
            [&](int m) {
                double ts = e.ft[m];
                double dXz = Xtz - e.drift_dz_at(ts, j);
                double xs = wrap_periodic(x - (Xt - e.drift_at(ts, j)), s.L);
                return -detail::eval(s.f2.dxx, "f2.dxx", ts, xs, zi) * dXz +
                       detail::eval(s.f2.dxz, "f2.dxz", ts, xs, zi);
            },
            upto);
        dxu2 += detail::path_integral(e,
            [&](int m) {
                double xs = x - (Xt - e.drift_at(e.ft[m], j));
                return detail::eval(s.f2.dx, "f2.dx", e.ft[m], wrap_periodic(xs, s.L), zi);
            },
            upto);
    }
    return drho * dxu2 + rho * dzdx;
}

/// d/dz (rho0 u1^0)(t; wall), analytic.
inline double euler_ddz_rho_u1_wall(const Scenario& s, const EulerSolution& e, Side side,
                                    double t) {
    return s.drho_wall(side) * e.u1_wall(side, t) +
           s.rho_wall(side) * e.du1dz_wall(side, t);
}

// ---------------------------------------------------------------------------
// Boundary mismatch between prescribed boundary data and the Euler traces

struct BoundaryMismatch {
    std::function<double(double)> g1;          // beta1 - u1^0 trace
    std::function<double(double, double)> g2;  // beta2 - u2^0 trace
};

/// The corrector boundary data: traces of beta - u^0 at the chosen wall.
/// The returned closures reference both arguments; keep them alive.
inline BoundaryMismatch boundary_mismatch(const Scenario& s, const EulerSolution& e,
                                          Side side) {
    require(e.stamps.back() >= s.T - 1e-12 * std::max(1.0, s.T),
            "boundary_mismatch: euler solution does not cover the horizon");
    BoundaryMismatch m;
    const TimeFn& b1 = s.beta1(side);
    const BoundaryFn& b2 = s.beta2(side);
    m.g1 = [&s, &e, side, &b1](double t) {
        return detail::eval(b1.v, "beta1", t) - e.u1_wall(side, t);
    };
    m.g2 = [&s, &e, side, &b2](double t, double x) {
        return detail::eval(b2.v, "beta2", t, x) - euler_u2_wall(s, e, side, t, x);
    };
    return m;
}

}  // namespace layerlab
