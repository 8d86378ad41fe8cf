// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/scenario.hpp"
#include "layerlab/stencils.hpp"
#include "layerlab/tridiag.hpp"

namespace layerlab {

// Both solvers advance in increment form: the tridiagonal systems are solved
// for w = u^{n+1} - u^n with the explicit operator applied in flux-difference
// form. A constant state then yields an exactly zero right-hand side, so
// constants are preserved bitwise and Dirichlet rows are pinned, not
// penalized.

struct ViscousOptions {
    int startup_be_steps = 0;  // backward-Euler half-step pairs before CN
    double cfl = 0.5;
    int min_layer_nodes = 24;
};

struct ViscousDiagnostics {
    double max_step_change = 0.0;
    int max_substeps = 1;
    int layer_nodes_lower = 0;
    int layer_nodes_upper = 0;
    bool layer_resolved = true;
    std::vector<std::string> warnings;
};

namespace detail {

/// z-diffusion stencil bundle on a (possibly graded) mesh.
struct ZStencil {
    std::vector<double> gm, gp;  // flux factors: Lu_j = gp*(u_{j+1}-u_j) - gm*(u_j-u_{j-1})

    explicit ZStencil(const std::vector<double>& z) {
        const std::size_t n = z.size();
        gm.assign(n, 0.0);
        gp.assign(n, 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double hm = z[j] - z[j - 1], hp = z[j + 1] - z[j];
            gm[j] = 2.0 / (hm * (hm + hp));
            gp[j] = 2.0 / (hp * (hm + hp));
        }
    }

    double apply(const double* u, std::size_t j) const {
        return gp[j] * (u[j + 1] - u[j]) - gm[j] * (u[j] - u[j - 1]);
    }
};

inline void check_layer(const Grid2D& g, double eps, const ViscousOptions& opt,
                        ViscousDiagnostics* diag) {
    if (!diag) return;
    double w = std::sqrt(eps);
    int lo = 0, hi = 0;
    for (double z : g.z) {
        if (z <= w) ++lo;
        if (z >= 1.0 - w) ++hi;
    }
    diag->layer_nodes_lower = lo;
    diag->layer_nodes_upper = hi;
    diag->layer_resolved = lo >= opt.min_layer_nodes && hi >= opt.min_layer_nodes;
    if (!diag->layer_resolved)
        diag->warnings.push_back("unresolved layer: only " + std::to_string(std::min(lo, hi)) +
                                 " nodes within sqrt(eps) of a wall");
}

}  // namespace detail

/// Crank-Nicolson march of rho0 du1/dt = eps d2u1/dz2 + rho0 f1 with Dirichlet
/// rows pinned to beta1. Returns all nt+1 steps (record_stride thins them).
inline TimeSeries<Field1D> solve_viscous_u1(const Scenario& s, double eps, GridPtr grid,
                                            int nt, int record_stride = 1,
                                            ViscousOptions opt = {},
                                            ViscousDiagnostics* diag = nullptr) {
    require(eps > 0.0, "solve_viscous_u1: eps > 0 required");
    require(nt >= 1 && record_stride >= 1 && nt % record_stride == 0,
            "solve_viscous_u1: record_stride must divide nt");
    grid->validate_nodes();
    detail::check_layer(*grid, eps, opt, diag);

    const int nz = grid->nz();
    const auto& z = grid->z;
    const double dt = s.T / nt;
    detail::ZStencil st(z);

    std::vector<double> rho(nz);
    for (int j = 0; j < nz; ++j) rho[j] = s.rho_at(z[j]);

    std::vector<double> u(nz), w(nz), rhs(nz);
    std::vector<double> sub(nz), dia(nz), sup(nz);
    TridiagWorkspace ws;

    for (int j = 0; j < nz; ++j) u[j] = s.a_at(z[j]);
    u[0] = detail::eval(s.beta1_lower.v, "beta1", 0.0);
    u[nz - 1] = detail::eval(s.beta1_upper.v, "beta1", 0.0);

    TimeSeries<Field1D> out;
    auto record = [&](int n) {
        Field1D f(grid, n * dt);
        f.v = u;
        out.push(f.t, std::move(f));
    };
    record(0);

    // one implicit sub-step: (rho/dt' - theta*eps*L) w = eps*L u + rho*f1(t_f)
    // theta = 1/2 for CN with f at midpoint, 1 for BE with f at the end
    auto implicit_step = [&](double dtp, double theta, double t_force, double t_end) {
        for (int j = 1; j + 1 < nz; ++j) {
            rhs[j] = eps * st.apply(u.data(), j) + rho[j] * s.f1_at(t_force, z[j]);
            sub[j] = -theta * eps * st.gm[j];
            sup[j] = -theta * eps * st.gp[j];
            dia[j] = rho[j] / dtp + theta * eps * (st.gm[j] + st.gp[j]);
        }
        sub[0] = sup[0] = 0.0;
        dia[0] = 1.0;
        rhs[0] = detail::eval(s.beta1_lower.v, "beta1", t_end) - u[0];
        sub[nz - 1] = sup[nz - 1] = 0.0;
        dia[nz - 1] = 1.0;
        rhs[nz - 1] = detail::eval(s.beta1_upper.v, "beta1", t_end) - u[nz - 1];
        solve_tridiag(sub.data(), dia.data(), sup.data(), rhs.data(), w.data(), nz, ws);
        double mw = 0.0;
        for (int j = 0; j < nz; ++j) {
            u[j] += w[j];
            mw = std::max(mw, std::fabs(w[j]));
        }
        if (!all_finite(u)) throw SolverError("solve_viscous_u1: non-finite state");
        if (diag) diag->max_step_change = std::max(diag->max_step_change, mw);
    };

    for (int n = 0; n < nt; ++n) {
        double t = n * dt;
        if (n < opt.startup_be_steps) {
            implicit_step(0.5 * dt, 1.0, t + 0.5 * dt, t + 0.5 * dt);
            implicit_step(0.5 * dt, 1.0, t + dt, t + dt);
        } else {
            implicit_step(dt, 0.5, t + 0.5 * dt, t + dt);
        }
        if ((n + 1) % record_stride == 0) record(n + 1);
    }
    return out;
}

using StampSink = std::function<void(int stamp_idx, const Field2D& u2, const Field1D& u1)>;

/// IMEX march of rho0 du2/dt - eps lap(u2) + rho0 u1 dx(u2) = rho0 f2:
/// Strang half-steps of centered/RK2 advection (+forcing) around one
/// Douglas-Gunn CN-ADI diffusion step. u1_half must carry 2*nt+1 frames at
/// spacing dt/2 (typically from solve_viscous_u1 run with 2*nt steps).
inline TimeSeries<Field2D> solve_viscous_u2(const Scenario& s, double eps,
                                            const TimeSeries<Field1D>& u1_half,
                                            GridPtr grid, int nt, int record_stride = 1,
                                            ViscousOptions opt = {},
                                            ViscousDiagnostics* diag = nullptr,
                                            const StampSink* sink = nullptr,
                                            bool keep_frames = true) {
    require(eps > 0.0, "solve_viscous_u2: eps > 0 required");
    require(nt >= 1 && record_stride >= 1 && nt % record_stride == 0,
            "solve_viscous_u2: record_stride must divide nt");
    require(u1_half.size() == 2 * nt + 1,
            "solve_viscous_u2: u1 series must hold 2*nt+1 half-step frames");
    grid->validate_nodes();
    detail::check_layer(*grid, eps, opt, diag);

    const int nx = grid->nx, nz = grid->nz();
    const auto& z = grid->z;
    const double dx = grid->dx();
    const double dt = s.T / nt;
    detail::ZStencil st(z);

    std::vector<double> nu(nz);  // eps / rho0
    for (int j = 0; j < nz; ++j) nu[j] = eps / s.rho_at(z[j]);

    const std::size_t N = static_cast<std::size_t>(nx) * nz;
    std::vector<double> u(N), k1(N), k2(N), dstar(N), rhs_r(N);
    std::vector<double> u1col(nz), beta_lo(nx), beta_hi(nx);
    std::vector<double> sub(std::max(nx, nz)), dia(std::max(nx, nz)), sup(std::max(nx, nz)),
        colrhs(std::max(nx, nz)), colsol(std::max(nx, nz));
    TridiagWorkspace ws;

    auto at = [nx](std::vector<double>& a, int ix, int j) -> double& {
        return a[static_cast<std::size_t>(j) * nx + ix];
    };

    // u1 column at arbitrary time by linear interpolation of half-step frames
    auto fill_u1col = [&](double tau) {
        double r = tau / (0.5 * dt);
        int i0 = std::max(0, std::min(2 * nt - 1, static_cast<int>(std::floor(r))));
        double th = r - i0;
        th = std::max(0.0, std::min(1.0, th));
        const auto& f0 = u1_half.at(i0).v;
        const auto& f1 = u1_half.at(i0 + 1).v;
        for (int j = 0; j < nz; ++j) u1col[j] = (1.0 - th) * f0[j] + th * f1[j];
    };

    auto fill_beta_rows = [&](double tau) {
        for (int ix = 0; ix < nx; ++ix) {
            double x = grid->x(ix);
            beta_lo[ix] = detail::eval(s.beta2_lower.v, "beta2", tau, x);
            beta_hi[ix] = detail::eval(s.beta2_upper.v, "beta2", tau, x);
        }
    };

    auto pin_rows = [&](std::vector<double>& a, double tau) {
        fill_beta_rows(tau);
        for (int ix = 0; ix < nx; ++ix) {
            at(a, ix, 0) = beta_lo[ix];
            at(a, ix, nz - 1) = beta_hi[ix];
        }
    };

    // advection + forcing tendency: k = -u1 dx(w) + f2
    auto tendency = [&](const std::vector<double>& wf, double tau, std::vector<double>& k) {
        fill_u1col(tau);
        const double inv2h = 1.0 / (2.0 * dx);
        for (int j = 0; j < nz; ++j) {
            const double c = u1col[j];
            const double* row = wf.data() + static_cast<std::size_t>(j) * nx;
            double* krow = k.data() + static_cast<std::size_t>(j) * nx;
            for (int ix = 0; ix < nx; ++ix) {
                int ip = ix + 1 == nx ? 0 : ix + 1;
                int im = ix == 0 ? nx - 1 : ix - 1;
                krow[ix] = -c * (row[ip] - row[im]) * inv2h;
            }
            if (s.has_f2())
                for (int ix = 0; ix < nx; ++ix)
                    krow[ix] += s.f2_at(tau, grid->x(ix), z[j]);
        }
    };

    // half-interval advection by midpoint RK2, with CFL sub-stepping
    auto advect_half = [&](double t0, int steps_hint) {
        // conservative speed bound from the bracketing half frames
        double umax = 0.0;
        fill_u1col(t0);
        for (int j = 0; j < nz; ++j) umax = std::max(umax, std::fabs(u1col[j]));
        fill_u1col(t0 + 0.5 * dt);
        for (int j = 0; j < nz; ++j) umax = std::max(umax, std::fabs(u1col[j]));
        int m = std::max(steps_hint,
                         static_cast<int>(std::ceil(umax * 0.5 * dt / (opt.cfl * dx))));
        m = std::max(1, m);
        if (diag) diag->max_substeps = std::max(diag->max_substeps, m);
        double h = 0.5 * dt / m;
        // boundary rows ride along; the step-end pin restores the exact data
        for (int q = 0; q < m; ++q) {
            double tau = t0 + q * h;
            tendency(u, tau, k1);
            for (std::size_t p = 0; p < N; ++p) k2[p] = u[p] + 0.5 * h * k1[p];
            tendency(k2, tau + 0.5 * h, k1);
            for (std::size_t p = 0; p < N; ++p) u[p] += h * k1[p];
        }
    };

    // initial state
    for (int j = 0; j < nz; ++j)
        for (int ix = 0; ix < nx; ++ix) at(u, ix, j) = s.b_at(grid->x(ix), z[j]);
    pin_rows(u, 0.0);

    TimeSeries<Field2D> out;
    auto record = [&](int n) {
        Field2D f(grid, n * dt);
        f.v = u;
        if (sink) (*sink)(n / record_stride, f, u1_half.at(2 * n));
        if (keep_frames) out.push(f.t, std::move(f));
    };
    record(0);

    for (int n = 0; n < nt; ++n) {
        const double t = n * dt;

        advect_half(t, 1);
        // the diffusion step wants the step-start boundary value on its
        // explicit side (textbook CN Dirichlet treatment)
        pin_rows(u, t);

        // Douglas-Gunn delta form:
        //   (I - (dt/2) Ax) d* = dt (Ax + Az) v,  (I - (dt/2) Az) d = d*
        const double inv_h2 = 1.0 / (dx * dx);
        for (int j = 1; j + 1 < nz; ++j) {
            const double* row = u.data() + static_cast<std::size_t>(j) * nx;
            const double* rowm = row - nx;
            const double* rowp = row + nx;
            double* rr = rhs_r.data() + static_cast<std::size_t>(j) * nx;
            const double gm = st.gm[j], gp = st.gp[j], scale = dt * nu[j];
            for (int ix = 0; ix < nx; ++ix) {
                int ip = ix + 1 == nx ? 0 : ix + 1;
                int im = ix == 0 ? nx - 1 : ix - 1;
                double lx = ((row[ip] - row[ix]) - (row[ix] - row[im])) * inv_h2;
                double lz = gp * (rowp[ix] - row[ix]) - gm * (row[ix] - rowm[ix]);
                rr[ix] = scale * (lx + lz);
            }
        }

        // boundary increment rows for the delta system
        fill_beta_rows(t + dt);
        for (int ix = 0; ix < nx; ++ix) {
            at(dstar, ix, 0) = beta_lo[ix] - at(u, ix, 0);
            at(dstar, ix, nz - 1) = beta_hi[ix] - at(u, ix, nz - 1);
        }

        // x sweep: cyclic tridiagonal per interior z row
        for (int j = 1; j + 1 < nz; ++j) {
            double kx = 0.5 * dt * nu[j] * inv_h2;
            for (int ix = 0; ix < nx; ++ix) {
                sub[ix] = -kx;
                dia[ix] = 1.0 + 2.0 * kx;
                sup[ix] = -kx;
                colrhs[ix] = at(rhs_r, ix, j);
            }
            solve_cyclic_tridiag(sub.data(), dia.data(), sup.data(), -kx, -kx, colrhs.data(),
                                 colsol.data(), nx, ws);
            for (int ix = 0; ix < nx; ++ix) at(dstar, ix, j) = colsol[ix];
        }

        // z sweep: tridiagonal per x column with Dirichlet increment rows
        for (int ix = 0; ix < nx; ++ix) {
            for (int j = 1; j + 1 < nz; ++j) {
                double kz = 0.5 * dt * nu[j];
                sub[j] = -kz * st.gm[j];
                dia[j] = 1.0 + kz * (st.gm[j] + st.gp[j]);
                sup[j] = -kz * st.gp[j];
                colrhs[j] = at(dstar, ix, j);
            }
            sub[0] = sup[0] = 0.0;
            dia[0] = 1.0;
            colrhs[0] = at(dstar, ix, 0);
            sub[nz - 1] = sup[nz - 1] = 0.0;
            dia[nz - 1] = 1.0;
            colrhs[nz - 1] = at(dstar, ix, nz - 1);
            solve_tridiag(sub.data(), dia.data(), sup.data(), colrhs.data(), colsol.data(),
                          nz, ws);
            for (int j = 0; j < nz; ++j) at(u, ix, j) += colsol[j];
        }

        advect_half(t + 0.5 * dt, 1);
        pin_rows(u, t + dt);

        if (!all_finite(u)) throw SolverError("solve_viscous_u2: non-finite state");
        if ((n + 1) % record_stride == 0) record(n + 1);
    }
    return out;
}

}  // namespace layerlab
