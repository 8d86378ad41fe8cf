// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/euler.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/prandtl.hpp"
#include "layerlab/scenario.hpp"
#include "layerlab/viscous.hpp"

namespace layerlab {

// ---------------------------------------------------------------------------
// Cutoff: 1 on [0,1/3], 0 on [1/2,1], quintic smoothstep transition (C2 at
// the junctions; the remainder formulas use at most psi''). The two-wall
// product identity psi(z) psi(1-z) = 0 holds exactly on [0,1].

struct CutoffEval {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

inline CutoffEval cutoff_psi(double z) {
    if (z < 0.0 || z > 1.0) throw DomainError("cutoff_psi: z outside [0,1]");
    CutoffEval c;
    if (z <= 1.0 / 3.0) {
        c.v = 1.0;
        return c;
    }
    if (z >= 0.5) return c;  // zero plateau
    const double scale = 6.0;  // 1/(1/2 - 1/3)
    double u = (z - 1.0 / 3.0) * scale;
    double su = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    double s1 = 30.0 * u * u * (1.0 + u * (-2.0 + u));
    double s2 = 60.0 * u * (1.0 + u * (-3.0 + 2.0 * u));
    c.v = 1.0 - su;
    c.d1 = -s1 * scale;
    c.d2 = -s2 * scale * scale;
    return c;
}

// ---------------------------------------------------------------------------
// Cubic evaluation of half-line fields at stretched coordinates, with zero
// extension beyond Z_max.

struct LayerInterp {
    bool inside = false;
    int i0 = 0;
    std::array<double, 4> w = {0, 0, 0, 0};
};

inline LayerInterp make_layer_interp(double Z, const HalfLineGrid& zg) {
    LayerInterp p;
    if (Z > zg.z_max || Z < 0.0) return p;
    p.inside = true;
    const int n = zg.n();
    double sidx = Z / zg.dZ();
    int i = static_cast<int>(std::floor(sidx));
    p.i0 = std::max(0, std::min(n - 4, i - 1));
    double r = sidx - p.i0;
    p.w[0] = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
    p.w[1] = r * (r - 2.0) * (r - 3.0) / 2.0;
    p.w[2] = -r * (r - 1.0) * (r - 3.0) / 2.0;
    p.w[3] = r * (r - 1.0) * (r - 2.0) / 6.0;
    return p;
}

inline double layer_eval(const HalfLineField& f, const LayerInterp& p) {
    if (!p.inside) return 0.0;
    return p.w[0] * f.v[p.i0] + p.w[1] * f.v[p.i0 + 1] + p.w[2] * f.v[p.i0 + 2] +
           p.w[3] * f.v[p.i0 + 3];
}

inline double layer_eval(const HalfLineField2D& f, int ix, const LayerInterp& p) {
    if (!p.inside) return 0.0;
    return p.w[0] * f.at(ix, p.i0) + p.w[1] * f.at(ix, p.i0 + 1) +
           p.w[2] * f.at(ix, p.i0 + 2) + p.w[3] * f.at(ix, p.i0 + 3);
}

// ---------------------------------------------------------------------------

struct RemainderFrame {
    Field1D A, B;
    Field2D C, D, E;
};

/// Assembles the truncated approximation u^a = u^0 + psi-localized correctors
/// at the stretched coordinates, and evaluates the remainder fields of the
/// modified equations term by term. Holds references; keep inputs alive.
class Composer {
public:
    Composer(const Scenario& s, const EulerSolution& e, const CorrectorSet& lower,
             const CorrectorSet& upper, double eps, GridPtr grid)
        : s_(&s), e_(&e), lo_(&lower), up_(&upper), eps_(eps),
          sq_(std::sqrt(eps)), grid_(grid) {
        require(eps > 0.0, "Composer: eps > 0");
        require(lower.side == Side::lower && upper.side == Side::upper,
                "Composer: corrector sides are swapped");
        require(lower.nx == grid->nx && upper.nx == grid->nx,
                "Composer: corrector x-resolution must match the grid");
        const auto& st = e.stamps;
        require(lower.stamps.size() == st.size() && upper.stamps.size() == st.size(),
                "Composer: stamp mismatch between euler and correctors");
        for (std::size_t k = 0; k < st.size(); ++k)
            require(std::fabs(lower.stamps[k] - st[k]) < 1e-12 &&
                        std::fabs(upper.stamps[k] - st[k]) < 1e-12,
                    "Composer: stamp mismatch between euler and correctors");

        const int nz = grid->nz();
        psi_.resize(nz);
        dpsi_.resize(nz);
        ddpsi_.resize(nz);
        psiu_.resize(nz);
        dpsiu_.resize(nz);
        ddpsiu_.resize(nz);
        Zlo_.resize(nz);
        Zup_.resize(nz);
        mlo_.resize(nz);
        mup_.resize(nz);
        rho_.resize(nz);
        for (int j = 0; j < nz; ++j) {
            double z = grid->z[j];
            auto c = cutoff_psi(z);
            auto cu = cutoff_psi(1.0 - z);
            psi_[j] = c.v;
            dpsi_[j] = c.d1;
            ddpsi_[j] = c.d2;
            psiu_[j] = cu.v;
            dpsiu_[j] = cu.d1;
            ddpsiu_[j] = cu.d2;
            Zlo_[j] = z / sq_;
            Zup_[j] = (1.0 - z) / sq_;
            mlo_[j] = make_layer_interp(Zlo_[j], *lower.zgrid);
            mup_[j] = make_layer_interp(Zup_[j], *upper.zgrid);
            rho_[j] = s.rho_at(z);
        }
    }

    double eps() const { return eps_; }
    const std::vector<double>& stamps() const { return e_->stamps; }
    GridPtr grid() const { return grid_; }
    const EulerSolution* euler() const { return e_; }
    const CorrectorSet* lower() const { return lo_; }
    const CorrectorSet* upper() const { return up_; }

    /// psi-localized corrector contribution to u1 (i.e. u1^a - u1^0).
    Field1D layer_u1(int k) const {
        Field1D f(grid_, e_->stamps[k]);
        const auto& t1l = lo_->theta1.at(k);
        const auto& t1u = up_->theta1.at(k);
        for (int j = 0; j < grid_->nz(); ++j) {
            double v = 0.0;
            if (psi_[j] != 0.0) v += psi_[j] * layer_eval(t1l, mlo_[j]);
            if (psiu_[j] != 0.0) v += psiu_[j] * layer_eval(t1u, mup_[j]);
            f.v[j] = v;
        }
        return f;
    }

    Field2D layer_u2(int k) const {
        Field2D f(grid_, e_->stamps[k]);
        const auto& t2l = lo_->theta2.at(k);
        const auto& t2u = up_->theta2.at(k);
        for (int j = 0; j < grid_->nz(); ++j) {
            bool any_lo = psi_[j] != 0.0 && mlo_[j].inside;
            bool any_up = psiu_[j] != 0.0 && mup_[j].inside;
            if (!any_lo && !any_up) continue;
            for (int ix = 0; ix < grid_->nx; ++ix) {
                double v = 0.0;
                if (any_lo) v += psi_[j] * layer_eval(t2l, ix, mlo_[j]);
                if (any_up) v += psiu_[j] * layer_eval(t2u, ix, mup_[j]);
                f.at(ix, j) = v;
            }
        }
        return f;
    }

    Field1D approx_u1(int k) const {
        Field1D f = layer_u1(k);
        const auto& u10 = e_->u1.at(k);
        for (int j = 0; j < grid_->nz(); ++j) f.v[j] += u10.v[j];
        return f;
    }

    Field2D approx_u2(int k) const {
        Field2D f = layer_u2(k);
        Field2D u20 = euler_u2_at(*s_, *e_, k);
        for (std::size_t p = 0; p < f.v.size(); ++p) f.v[p] += u20.v[p];
        return f;
    }

    /// The remainder fields of the modified u1 / u2 equations at one stamp,
    /// evaluated term by term with corrector derivatives by finite
    /// differences and wall-trace coefficients analytic.
    RemainderFrame remainders(int k) const {
        const double t = e_->stamps[k];
        const int nx = grid_->nx, nz = grid_->nz();
        RemainderFrame R;
        R.A = Field1D(grid_, t);
        R.B = Field1D(grid_, t);
        R.C = Field2D(grid_, t);
        R.D = Field2D(grid_, t);
        R.E = Field2D(grid_, t);

        const double drl = s_->drho_wall(Side::lower);
        const double dru = s_->drho_wall(Side::upper);

        HalfLineField t1l = lo_->theta1.at(k), t1u = up_->theta1.at(k);
        HalfLineField t1l_t = detail::dt_series(lo_->theta1, k);
        HalfLineField t1u_t = detail::dt_series(up_->theta1, k);
        HalfLineField t1l_Z = detail::dZ_field(t1l);
        HalfLineField t1u_Z = detail::dZ_field(t1u);

        const HalfLineField2D& t2l = lo_->theta2.at(k);
        const HalfLineField2D& t2u = up_->theta2.at(k);
        HalfLineField2D t2l_t = detail::dt_series(lo_->theta2, k);
        HalfLineField2D t2u_t = detail::dt_series(up_->theta2, k);
        HalfLineField2D t2l_Z = detail::dZ_field(t2l);
        HalfLineField2D t2u_Z = detail::dZ_field(t2u);
        HalfLineField2D t2l_x = detail::dx_field(t2l, 1);
        HalfLineField2D t2u_x = detail::dx_field(t2u, 1);
        HalfLineField2D t2l_xx = detail::dx_field(t2l, 2);
        HalfLineField2D t2u_xx = detail::dx_field(t2u, 2);

        Field2D dxxu2 = euler_dxxu2_at(*s_, *e_, k);
        Field2D dzzu2 = euler_dzzu2_at(*s_, *e_, k);

        const double ddzru1_l = euler_ddz_rho_u1_wall(*s_, *e_, Side::lower, t);
        const double ddzru1_u = euler_ddz_rho_u1_wall(*s_, *e_, Side::upper, t);
        std::vector<double> ddzrdxu2_l(nx), ddzrdxu2_u(nx);
        for (int ix = 0; ix < nx; ++ix) {
            double x = grid_->x(ix);
            ddzrdxu2_l[ix] = euler_ddz_rho_dxu2_wall(*s_, *e_, Side::lower, t, x);
            ddzrdxu2_u[ix] = euler_ddz_rho_dxu2_wall(*s_, *e_, Side::upper, t, x);
        }

        for (int j = 0; j < nz; ++j) {
            const bool in_lo = mlo_[j].inside;
            const bool in_up = mup_[j].inside;
            const double p = psi_[j], pu = psiu_[j];
            const double dp = dpsi_[j], dpu = dpsiu_[j];
            const double ddp = ddpsi_[j], ddpu = ddpsiu_[j];

            // ---- u1 remainders
            double a = 0.0;
            if (in_lo && p != 0.0)
                a += p * Zlo_[j] * drl * layer_eval(t1l_t, mlo_[j]);
            if (in_up && pu != 0.0)
                a -= pu * Zup_[j] * dru * layer_eval(t1u_t, mup_[j]);
            if (in_lo && dp != 0.0) a -= 2.0 * dp * layer_eval(t1l_Z, mlo_[j]);
            if (in_up && dpu != 0.0) a -= 2.0 * dpu * layer_eval(t1u_Z, mup_[j]);
            R.A.v[j] = sq_ * a;

            double bterm = -e_->dzzu1_at(t, j);
            if (in_lo && ddp != 0.0) bterm -= ddp * layer_eval(t1l, mlo_[j]);
            if (in_up && ddpu != 0.0) bterm -= ddpu * layer_eval(t1u, mup_[j]);
            R.B.v[j] = eps_ * bterm;

            // ---- u2 remainders
            const double th1l_here = in_lo ? layer_eval(t1l, mlo_[j]) : 0.0;
            const double th1u_here = in_up ? layer_eval(t1u, mup_[j]) : 0.0;
            const double cl = p * (p - 1.0), cu = pu * (pu - 1.0);
            for (int ix = 0; ix < nx; ++ix) {
                double Cv = 0.0, Dv = 0.0, Ev = 0.0;
                if (in_lo) {
                    double x2 = layer_eval(t2l_x, ix, mlo_[j]);
                    if (cl != 0.0) Cv += cl * rho_[j] * th1l_here * x2;
                    if (p != 0.0) {
                        double t2t = layer_eval(t2l_t, ix, mlo_[j]);
                        Dv += p * Zlo_[j] *
                              (drl * t2t + ddzru1_l * x2 + ddzrdxu2_l[ix] * th1l_here +
                               drl * th1l_here * x2);
                        Ev -= p * layer_eval(t2l_xx, ix, mlo_[j]);
                    }
                    if (dp != 0.0) Dv -= 2.0 * dp * layer_eval(t2l_Z, ix, mlo_[j]);
                    if (ddp != 0.0) Ev -= ddp * layer_eval(t2l, ix, mlo_[j]);
                }
                if (in_up) {
                    double x2 = layer_eval(t2u_x, ix, mup_[j]);
                    if (cu != 0.0) Cv += cu * rho_[j] * th1u_here * x2;
                    if (pu != 0.0) {
                        double t2t = layer_eval(t2u_t, ix, mup_[j]);
                        Dv -= pu * Zup_[j] *
                              (dru * t2t + ddzru1_u * x2 + ddzrdxu2_u[ix] * th1u_here +
                               dru * th1u_here * x2);
                        Ev -= pu * layer_eval(t2u_xx, ix, mup_[j]);
                    }
                    if (dpu != 0.0) Dv -= 2.0 * dpu * layer_eval(t2u_Z, ix, mup_[j]);
                    if (ddpu != 0.0) Ev -= ddpu * layer_eval(t2u, ix, mup_[j]);
                }
                Ev -= dxxu2.at(ix, j) + dzzu2.at(ix, j);
                R.C.at(ix, j) = Cv;
                R.D.at(ix, j) = sq_ * Dv;
                R.E.at(ix, j) = eps_ * Ev;
            }
        }
        return R;
    }

private:
    const Scenario* s_;
    const EulerSolution* e_;
    const CorrectorSet* lo_;
    const CorrectorSet* up_;
    double eps_, sq_;
    GridPtr grid_;
    std::vector<double> psi_, dpsi_, ddpsi_, psiu_, dpsiu_, ddpsiu_;
    std::vector<double> Zlo_, Zup_, rho_;
    std::vector<LayerInterp> mlo_, mup_;
};

// ---------------------------------------------------------------------------
// Residual identity diagnostics: inserting the truncated approximation into
// the modified equations and subtracting rho0 f + remainders must leave a
// field that vanishes under grid refinement. Interior nodes and stamps only
// (the identity holds there with centered differences).

struct ApproxSeries {
    TimeSeries<Field1D> u1a;
    TimeSeries<Field2D> u2a;
};

inline ApproxSeries materialize_approximation(const Composer& cmp) {
    ApproxSeries a;
    for (int k = 0; k < static_cast<int>(cmp.stamps().size()); ++k) {
        a.u1a.push(cmp.stamps()[k], cmp.approx_u1(k));
        a.u2a.push(cmp.stamps()[k], cmp.approx_u2(k));
    }
    return a;
}

inline Field1D residual_identity_u1(const Scenario& s, const Composer& cmp,
                                    const ApproxSeries& a, int k) {
    const auto grid = cmp.grid();
    const auto& z = grid->z;
    const int nz = grid->nz();
    const double t = cmp.stamps()[k];
    const double hs = cmp.stamps()[1] - cmp.stamps()[0];
    require(k >= 1 && k + 1 < static_cast<int>(cmp.stamps().size()),
            "residual_identity_u1: interior stamps only");

    RemainderFrame R = cmp.remainders(k);
    detail::ZStencil st(z);
    Field1D r(grid, t);
    const auto& um = a.u1a.at(k - 1).v;
    const auto& uc = a.u1a.at(k).v;
    const auto& upn = a.u1a.at(k + 1).v;
    for (int j = 1; j + 1 < nz; ++j) {
        double rho = s.rho_at(z[j]);
        double ut = (upn[j] - um[j]) / (2.0 * hs);
        double uzz = st.apply(uc.data(), j);
        r.v[j] = rho * ut - cmp.eps() * uzz - rho * s.f1_at(t, z[j]) - R.A.v[j] - R.B.v[j];
    }
    return r;
}

inline Field2D residual_identity_u2(const Scenario& s, const Composer& cmp,
                                    const ApproxSeries& a, int k) {
    const auto grid = cmp.grid();
    const auto& z = grid->z;
    const int nx = grid->nx, nz = grid->nz();
    const double t = cmp.stamps()[k];
    const double hs = cmp.stamps()[1] - cmp.stamps()[0];
    require(k >= 1 && k + 1 < static_cast<int>(cmp.stamps().size()),
            "residual_identity_u2: interior stamps only");

    RemainderFrame R = cmp.remainders(k);
    detail::ZStencil st(z);
    const double inv_h2 = 1.0 / (grid->dx() * grid->dx());
    const double inv2h = 1.0 / (2.0 * grid->dx());
    Field2D r(grid, t);
    const auto& fm = a.u2a.at(k - 1);
    const auto& fc = a.u2a.at(k);
    const auto& fp = a.u2a.at(k + 1);
    const auto& u1a = a.u1a.at(k);
    for (int j = 1; j + 1 < nz; ++j) {
        double rho = s.rho_at(z[j]);
        for (int ix = 0; ix < nx; ++ix) {
            int ip = ix + 1 == nx ? 0 : ix + 1;
            int im = ix == 0 ? nx - 1 : ix - 1;
            double ut = (fp.at(ix, j) - fm.at(ix, j)) / (2.0 * hs);
            double lx = ((fc.at(ip, j) - fc.at(ix, j)) - (fc.at(ix, j) - fc.at(im, j))) *
                        inv_h2;
            double lz = st.gp[j] * (fc.at(ix, j + 1) - fc.at(ix, j)) -
                        st.gm[j] * (fc.at(ix, j) - fc.at(ix, j - 1));
            double adv = u1a.v[j] * (fc.at(ip, j) - fc.at(im, j)) * inv2h;
            r.at(ix, j) = rho * ut - cmp.eps() * (lx + lz) + rho * adv -
                          rho * s.f2_at(t, grid->x(ix), z[j]) - R.C.at(ix, j) -
                          R.D.at(ix, j) - R.E.at(ix, j);
        }
    }
    return r;
}

}  // namespace layerlab
