// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/euler.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/norms.hpp"
#include "layerlab/scenario.hpp"
#include "layerlab/stencils.hpp"
#include "layerlab/tridiag.hpp"

namespace layerlab {

// The corrector systems live on the truncated half-line [0, Z_max] with a
// homogeneous Dirichlet far-field row; the committed truncation error decays
// at Gaussian rate and is checked by the Z_max-doubling invariant. The
// systems are free of eps, so one corrector solve serves a whole sweep.

struct CorrectorOptions {
    bool override_compatibility = false;
    double compat_tol = 1e-8;
    int startup_be_steps = 0;
    double cfl = 0.5;
};

/// theta1: constant-coefficient heat march, wall row pinned to g1(t).
/// Returns all nt+1 internal steps (record_stride thins them).
inline TimeSeries<HalfLineField> solve_theta1(Side side, const Scenario& s,
                                              const std::function<double(double)>& g1,
                                              HalfGridPtr zgrid, int nt,
                                              int record_stride = 1,
                                              CorrectorOptions opt = {}) {
    require(nt >= 1 && record_stride >= 1 && nt % record_stride == 0,
            "solve_theta1: record_stride must divide nt");
    const double rho = s.rho_wall(side);
    require(rho >= s.c0 && s.c0 > 0.0, "solve_theta1: wall density below c0");
    if (!opt.override_compatibility && std::fabs(g1(0.0)) > opt.compat_tol)
        throw DomainError("solve_theta1: boundary mismatch g1(0) violates compatibility; "
                          "pass override_compatibility for oracle runs");

    const int n = zgrid->n();
    const double dZ = zgrid->dZ();
    const double g = 1.0 / (dZ * dZ);
    const double dt = s.T / nt;

    std::vector<double> th(n, 0.0), w(n), rhs(n), sub(n), dia(n), sup(n);
    TridiagWorkspace ws;
    th[0] = g1(0.0);

    TimeSeries<HalfLineField> out;
    auto record = [&](int k) {
        HalfLineField f(zgrid, k * dt);
        f.v = th;
        out.push(f.t, std::move(f));
    };
    record(0);

    auto implicit_step = [&](double dtp, double theta, double t_end) {
        for (int j = 1; j + 1 < n; ++j) {
            rhs[j] = g * ((th[j + 1] - th[j]) - (th[j] - th[j - 1]));
            sub[j] = -theta * g;
            sup[j] = -theta * g;
            dia[j] = rho / dtp + 2.0 * theta * g;
        }
        sub[0] = sup[0] = 0.0;
        dia[0] = 1.0;
        rhs[0] = g1(t_end) - th[0];
        sub[n - 1] = sup[n - 1] = 0.0;
        dia[n - 1] = 1.0;
        rhs[n - 1] = 0.0;  // pinned far field
        solve_tridiag(sub.data(), dia.data(), sup.data(), rhs.data(), w.data(), n, ws);
        for (int j = 0; j < n; ++j) th[j] += w[j];
        if (!all_finite(th)) throw SolverError("solve_theta1: non-finite state");
    };

    for (int k = 0; k < nt; ++k) {
        double t = k * dt;
        if (k < opt.startup_be_steps) {
            implicit_step(0.5 * dt, 1.0, t + 0.5 * dt);
            implicit_step(0.5 * dt, 1.0, t + dt);
        } else {
            implicit_step(dt, 0.5, t + dt);
        }
        if ((k + 1) % record_stride == 0) record(k + 1);
    }
    return out;
}

/// Wall traces feeding the theta2 equation.
struct CorrectorTraces {
    std::function<double(double)> u1_wall;               // u1^0(t; wall)
    std::function<double(double, double)> dxu2_wall;     // dx u2^0(t; x, wall)
    std::function<double(double, double)> g2;            // beta2 - u2^0 trace
};

/// theta2: IMEX march; d_ZZ implicit (CN), x-advection with Z-dependent speed
/// u1_wall + theta1 and the source -dxu2_wall * theta1 explicit (Strang/RK2).
/// theta1_half must carry 2*nt+1 frames at spacing dt/2.
inline TimeSeries<HalfLineField2D> solve_theta2(Side side, const Scenario& s,
                                                const TimeSeries<HalfLineField>& theta1_half,
                                                const CorrectorTraces& tr, HalfGridPtr zgrid,
                                                int nx, int nt, int record_stride = 1,
                                                CorrectorOptions opt = {},
                                                int* max_substeps_out = nullptr) {
    require(nt >= 1 && record_stride >= 1 && nt % record_stride == 0,
            "solve_theta2: record_stride must divide nt");
    require(theta1_half.size() == 2 * nt + 1,
            "solve_theta2: theta1 series must hold 2*nt+1 half-step frames");
    require(nx >= 4, "solve_theta2: nx >= 4");
    const double rho = s.rho_wall(side);
    const double dt = s.T / nt;
    const int n = zgrid->n();
    const double dZ = zgrid->dZ();
    const double gz = 1.0 / (dZ * dZ);
    const double dx = s.L / nx;

    if (!opt.override_compatibility) {
        for (int ix = 0; ix < nx; ++ix)
            if (std::fabs(tr.g2(0.0, s.L * ix / nx)) > opt.compat_tol)
                throw DomainError("solve_theta2: boundary mismatch g2(0,.) violates "
                                  "compatibility");
    }

    const std::size_t N = static_cast<std::size_t>(nx) * n;
    std::vector<double> th(N, 0.0), k1(N), k2(N);
    std::vector<double> th1col(n), srow(nx), grow(nx);
    std::vector<double> sub(n), dia(n), sup(n), colrhs(n), colsol(n);
    TridiagWorkspace ws;

    auto at = [nx](std::vector<double>& a, int ix, int j) -> double& {
        return a[static_cast<std::size_t>(j) * nx + ix];
    };

    auto fill_th1col = [&](double tau) {
        double r = tau / (0.5 * dt);
        int i0 = std::max(0, std::min(2 * nt - 1, static_cast<int>(std::floor(r))));
        double a = std::max(0.0, std::min(1.0, r - i0));
        const auto& f0 = theta1_half.at(i0).v;
        const auto& f1 = theta1_half.at(i0 + 1).v;
        for (int j = 0; j < n; ++j) th1col[j] = (1.0 - a) * f0[j] + a * f1[j];
    };

    auto fill_g2_row = [&](double tau, std::vector<double>& row) {
        for (int ix = 0; ix < nx; ++ix) row[ix] = tr.g2(tau, s.L * ix / nx);
    };

    auto pin_rows = [&](double tau) {
        fill_g2_row(tau, grow);
        for (int ix = 0; ix < nx; ++ix) {
            at(th, ix, 0) = grow[ix];
            at(th, ix, n - 1) = 0.0;
        }
    };

    // tendency: k = -(u1w + theta1) dx(w) - dxu2w * theta1
    auto tendency = [&](const std::vector<double>& wf, double tau, std::vector<double>& k) {
        fill_th1col(tau);
        const double u1w = tr.u1_wall(tau);
        for (int ix = 0; ix < nx; ++ix) srow[ix] = tr.dxu2_wall(tau, s.L * ix / nx);
        const double inv2h = 1.0 / (2.0 * dx);
        for (int j = 0; j < n; ++j) {
            const double c = u1w + th1col[j];
            const double t1 = th1col[j];
            const double* row = wf.data() + static_cast<std::size_t>(j) * nx;
            double* krow = k.data() + static_cast<std::size_t>(j) * nx;
            for (int ix = 0; ix < nx; ++ix) {
                int ip = ix + 1 == nx ? 0 : ix + 1;
                int im = ix == 0 ? nx - 1 : ix - 1;
                krow[ix] = -c * (row[ip] - row[im]) * inv2h - srow[ix] * t1;
            }
        }
    };

    int max_substeps = 1;
    auto advect_half = [&](double t0) {
        double cmax = 0.0;
        fill_th1col(t0);
        for (int j = 0; j < n; ++j)
            cmax = std::max(cmax, std::fabs(tr.u1_wall(t0) + th1col[j]));
        fill_th1col(t0 + 0.5 * dt);
        for (int j = 0; j < n; ++j)
            cmax = std::max(cmax, std::fabs(tr.u1_wall(t0 + 0.5 * dt) + th1col[j]));
        int m = std::max(1, static_cast<int>(std::ceil(cmax * 0.5 * dt / (opt.cfl * dx))));
        max_substeps = std::max(max_substeps, m);
        double h = 0.5 * dt / m;
        // boundary rows ride along; the step-end pin restores the exact data
        for (int q = 0; q < m; ++q) {
            double tau = t0 + q * h;
            tendency(th, tau, k1);
            for (std::size_t p = 0; p < N; ++p) k2[p] = th[p] + 0.5 * h * k1[p];
            tendency(k2, tau + 0.5 * h, k1);
            for (std::size_t p = 0; p < N; ++p) th[p] += h * k1[p];
        }
    };

    pin_rows(0.0);
    TimeSeries<HalfLineField2D> out;
    auto record = [&](int k) {
        HalfLineField2D f(zgrid, nx, s.L, k * dt);
        f.v = th;
        out.push(f.t, std::move(f));
    };
    record(0);

    for (int k = 0; k < nt; ++k) {
        const double t = k * dt;
        advect_half(t);
        pin_rows(t);  // step-start boundary value on the explicit CN side

        // CN diffusion in Z per x column, increment form
        fill_g2_row(t + dt, grow);
        for (int ix = 0; ix < nx; ++ix) {
            for (int j = 1; j + 1 < n; ++j) {
                double um = at(th, ix, j - 1), uc = at(th, ix, j), up = at(th, ix, j + 1);
                colrhs[j] = gz * ((up - uc) - (uc - um));
                sub[j] = -0.5 * gz;
                sup[j] = -0.5 * gz;
                dia[j] = rho / dt + gz;
            }
            sub[0] = sup[0] = 0.0;
            dia[0] = 1.0;
            colrhs[0] = grow[ix] - at(th, ix, 0);
            sub[n - 1] = sup[n - 1] = 0.0;
            dia[n - 1] = 1.0;
            colrhs[n - 1] = 0.0;
            solve_tridiag(sub.data(), dia.data(), sup.data(), colrhs.data(), colsol.data(),
                          n, ws);
            for (int j = 0; j < n; ++j) at(th, ix, j) += colsol[j];
        }

        advect_half(t + 0.5 * dt);
        pin_rows(t + dt);

        if (!all_finite(th)) throw SolverError("solve_theta2: non-finite state");
        if ((k + 1) % record_stride == 0) record(k + 1);
    }
    if (max_substeps_out) *max_substeps_out = max_substeps;
    return out;
}

/// One wall's corrector pair on shared analysis stamps.
struct CorrectorSet {
    Side side = Side::lower;
    double rho_wall = 1.0;
    HalfGridPtr zgrid;
    int nx = 0;
    double L = 0.0;
    std::vector<double> stamps;
    TimeSeries<HalfLineField> theta1;
    TimeSeries<HalfLineField2D> theta2;
    int max_substeps = 1;
};

/// Solves both corrector equations for one wall. nt internal steps land on
/// stamp boundaries; theta1 runs at half steps internally for the theta2
/// stage values and is recorded on the same stamps.
inline CorrectorSet solve_corrector(Side side, const Scenario& s, const EulerSolution& e,
                                    HalfGridPtr zgrid, int nx, int nt, int record_stride,
                                    CorrectorOptions opt = {}) {
    CorrectorSet c;
    c.side = side;
    c.rho_wall = s.rho_wall(side);
    c.zgrid = zgrid;
    c.nx = nx;
    c.L = s.L;

    BoundaryMismatch mis = boundary_mismatch(s, e, side);
    auto theta1_half = solve_theta1(side, s, mis.g1, zgrid, 2 * nt, 1, opt);

    CorrectorTraces tr;
    tr.u1_wall = [&s, &e, side](double t) { return e.u1_wall(side, t); };
    tr.dxu2_wall = [&s, &e, side](double t, double x) {
        return euler_dxu2_wall(s, e, side, t, x);
    };
    tr.g2 = mis.g2;

    c.theta2 = solve_theta2(side, s, theta1_half, tr, zgrid, nx, nt, record_stride, opt,
                            &c.max_substeps);
    c.stamps = c.theta2.stamps;

    // thin theta1 to the same stamps
    for (int k = 0; k < static_cast<int>(theta1_half.size()); k += 2 * record_stride)
        c.theta1.push(theta1_half.stamps[k], theta1_half.at(k));
    return c;
}

// ---------------------------------------------------------------------------
// Weighted-decay report

struct WeightedEntry {
    Side side;
    std::string quantity;  // "theta1" or "theta2"
    int l = 0;             // weight power
    int i = 0;             // x-derivative order
    std::string norm_kind;
    double value = 0.0;
    bool bounded = true;
};

struct WeightedReport {
    std::vector<WeightedEntry> entries;
    double ceiling = 0.0;
    bool all_finite = true;
    bool all_bounded = true;
};

namespace detail {

inline HalfLineField dZ_field(const HalfLineField& f) {
    HalfLineField g(f.grid, f.t);
    const int n = f.n();
    const double h = f.grid->dZ();
    g.v[0] = (-1.5 * f.v[0] + 2.0 * f.v[1] - 0.5 * f.v[2]) / h;
    for (int j = 1; j + 1 < n; ++j) g.v[j] = (f.v[j + 1] - f.v[j - 1]) / (2.0 * h);
    g.v[n - 1] = (1.5 * f.v[n - 1] - 2.0 * f.v[n - 2] + 0.5 * f.v[n - 3]) / h;
    return g;
}

inline HalfLineField2D dZ_field(const HalfLineField2D& f) {
    HalfLineField2D g(f.grid, f.nx, f.L, f.t);
    const int n = f.nZ(), nx = f.nx;
    const double h = f.grid->dZ();
    for (int ix = 0; ix < nx; ++ix) {
        g.at(ix, 0) = (-1.5 * f.at(ix, 0) + 2.0 * f.at(ix, 1) - 0.5 * f.at(ix, 2)) / h;
        for (int j = 1; j + 1 < n; ++j)
            g.at(ix, j) = (f.at(ix, j + 1) - f.at(ix, j - 1)) / (2.0 * h);
        g.at(ix, n - 1) =
            (1.5 * f.at(ix, n - 1) - 2.0 * f.at(ix, n - 2) + 0.5 * f.at(ix, n - 3)) / h;
    }
    return g;
}

inline HalfLineField2D dx_field(const HalfLineField2D& f, int order) {
    HalfLineField2D g(f.grid, f.nx, f.L, f.t);
    const double dx = f.L / f.nx;
    for (int j = 0; j < f.nZ(); ++j) {
        const double* row = f.v.data() + static_cast<std::size_t>(j) * f.nx;
        double* grow = g.v.data() + static_cast<std::size_t>(j) * f.nx;
        if (order == 1) d_dx_row(row, grow, f.nx, dx);
        else d_dxx_row(row, grow, f.nx, dx);
    }
    return g;
}

template <class F>
F dt_series(const TimeSeries<F>& ts, int k) {
    const int S = ts.size();
    const double h = ts.stamps[1] - ts.stamps[0];
    F g = ts.at(k);
    if (k == 0) {
        for (std::size_t p = 0; p < g.v.size(); ++p)
            g.v[p] = (-1.5 * ts.at(0).v[p] + 2.0 * ts.at(1).v[p] - 0.5 * ts.at(2).v[p]) / h;
    } else if (k == S - 1) {
        for (std::size_t p = 0; p < g.v.size(); ++p)
            g.v[p] = (1.5 * ts.at(S - 1).v[p] - 2.0 * ts.at(S - 2).v[p] +
                      0.5 * ts.at(S - 3).v[p]) / h;
    } else {
        for (std::size_t p = 0; p < g.v.size(); ++p)
            g.v[p] = (ts.at(k + 1).v[p] - ts.at(k - 1).v[p]) / (2.0 * h);
    }
    return g;
}

/// sup-in-time and L2-in-time accumulator per (l, i) bucket.
struct NormTrack {
    double sup_l2 = 0.0;
    double int_l2sq = 0.0;  // trapezoid of the squared norms over stamps
    double sup_inf = 0.0;
};

inline double weighted_linf(const HalfLineField& f, int l) {
    double m = 0.0;
    for (int j = 0; j < f.n(); ++j) {
        double wt = 1.0, q = 1.0 + f.grid->Z[j] * f.grid->Z[j];
        for (int p = 0; p < l; ++p) wt *= q;
        m = std::max(m, std::sqrt(wt) * std::fabs(f.v[j]));
    }
    return m;
}

inline double weighted_linf(const HalfLineField2D& f, int l) {
    double m = 0.0;
    for (int j = 0; j < f.nZ(); ++j) {
        double wt = 1.0, q = 1.0 + f.grid->Z[j] * f.grid->Z[j];
        for (int p = 0; p < l; ++p) wt *= q;
        double rowmax = 0.0;
        for (int ix = 0; ix < f.nx; ++ix) rowmax = std::max(rowmax, std::fabs(f.at(ix, j)));
        m = std::max(m, std::sqrt(wt) * rowmax);
    }
    return m;
}

}  // namespace detail

/// Evaluates the weighted-decay norms of one corrector set for the requested
/// weight powers and x-derivative orders: sup-in-time weighted L2 of the
/// field and its Z-derivative, time-integrated weighted L2 of the Z- and
/// t-derivatives, and weighted sup norms.
inline WeightedReport weighted_report(const CorrectorSet& c, const std::vector<int>& l_list,
                                      const std::vector<int>& i_list, double ceiling = 1e6) {
    WeightedReport rep;
    rep.ceiling = ceiling;
    const int S = c.theta1.size();
    require(S >= 3, "weighted_report: need at least 3 stamps");
    const double hw = c.stamps[1] - c.stamps[0];

    auto push = [&](const std::string& q, int l, int i, const std::string& kind, double v) {
        WeightedEntry en;
        en.side = c.side;
        en.quantity = q;
        en.l = l;
        en.i = i;
        en.norm_kind = kind;
        en.value = v;
        en.bounded = std::isfinite(v) && v <= ceiling;
        rep.all_finite = rep.all_finite && std::isfinite(v);
        rep.all_bounded = rep.all_bounded && en.bounded;
        rep.entries.push_back(en);
    };

    // theta1 (x-independent, i = 0 only)
    for (int l : l_list) {
        detail::NormTrack f, dz, dt;
        double supw = 0.0;
        for (int k = 0; k < S; ++k) {
            double wq = (k == 0 || k == S - 1) ? 0.5 * hw : hw;
            double nf = weighted_l2(c.theta1.at(k), l);
            double nz = weighted_l2(detail::dZ_field(c.theta1.at(k)), l);
            double ntd = weighted_l2(detail::dt_series(c.theta1, k), l);
            f.sup_l2 = std::max(f.sup_l2, nf);
            dz.sup_l2 = std::max(dz.sup_l2, nz);
            dz.int_l2sq += wq * nz * nz;
            dt.int_l2sq += wq * ntd * ntd;
            supw = std::max(supw, detail::weighted_linf(c.theta1.at(k), l));
        }
        push("theta1", l, 0, "sup_weighted_l2", f.sup_l2);
        push("theta1", l, 0, "l2t_weighted_dZ", std::sqrt(dz.int_l2sq));
        push("theta1", l, 0, "sup_weighted_dZ", dz.sup_l2);
        push("theta1", l, 0, "l2t_weighted_dt", std::sqrt(dt.int_l2sq));
        push("theta1", l, 0, "sup_weighted_inf", supw);
    }

    // theta2 with x-derivative orders
    for (int i : i_list) {
        // cache the derivative series once per order
        TimeSeries<HalfLineField2D> di;
        for (int k = 0; k < S; ++k) {
            HalfLineField2D f =
                i == 0 ? c.theta2.at(k) : detail::dx_field(c.theta2.at(k), i);
            di.push(c.stamps[k], std::move(f));
        }
        for (int l : l_list) {
            detail::NormTrack f, dz, dt;
            double supw = 0.0;
            for (int k = 0; k < S; ++k) {
                double wq = (k == 0 || k == S - 1) ? 0.5 * hw : hw;
                double nf = weighted_l2(di.at(k), l);
                double nz = weighted_l2(detail::dZ_field(di.at(k)), l);
                double ntd = weighted_l2(detail::dt_series(di, k), l);
                f.sup_l2 = std::max(f.sup_l2, nf);
                dz.sup_l2 = std::max(dz.sup_l2, nz);
                dz.int_l2sq += wq * nz * nz;
                dt.int_l2sq += wq * ntd * ntd;
                supw = std::max(supw, detail::weighted_linf(di.at(k), l));
            }
            push("theta2", l, i, "sup_weighted_l2", f.sup_l2);
            push("theta2", l, i, "l2t_weighted_dZ", std::sqrt(dz.int_l2sq));
            push("theta2", l, i, "sup_weighted_dZ", dz.sup_l2);
            push("theta2", l, i, "l2t_weighted_dt", std::sqrt(dt.int_l2sq));
            push("theta2", l, i, "sup_weighted_inf", supw);
        }
    }
    return rep;
}

}  // namespace layerlab
