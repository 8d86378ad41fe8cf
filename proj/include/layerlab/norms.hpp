// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/fields.hpp"
#include "layerlab/stencils.hpp"

namespace layerlab {

/// Trapezoid weights over possibly graded z nodes. Exact for constants.
inline std::vector<double> trapezoid_weights(const std::vector<double>& z) {
    const std::size_t n = z.size();
    std::vector<double> w(n);
    w[0] = 0.5 * (z[1] - z[0]);
    for (std::size_t j = 1; j + 1 < n; ++j) w[j] = 0.5 * (z[j + 1] - z[j - 1]);
    w[n - 1] = 0.5 * (z[n - 1] - z[n - 2]);
    return w;
}

inline double l2_norm(const Field1D& f) {
    auto w = trapezoid_weights(f.grid->z);
    double s = 0.0;
    for (std::size_t j = 0; j < f.v.size(); ++j) s += w[j] * f.v[j] * f.v[j];
    return std::sqrt(s);
}

/// Trapezoid in z, rectangle rule in the periodic x direction.
inline double l2_norm(const Field2D& f) {
    auto w = trapezoid_weights(f.grid->z);
    const int nx = f.nx(), nz = f.nz();
    double s = 0.0;
    for (int j = 0; j < nz; ++j) {
        double row = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            double v = f.at(ix, j);
            row += v * v;
        }
        s += w[j] * row;
    }
    return std::sqrt(s * f.grid->dx());
}

inline double linf_norm(const Field1D& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::fabs(v));
    return m;
}

inline double linf_norm(const Field2D& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::fabs(v));
    return m;
}

inline double linf_norm(const HalfLineField& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::fabs(v));
    return m;
}

inline double linf_norm(const HalfLineField2D& f) {
    double m = 0.0;
    for (double v : f.v) m = std::max(m, std::fabs(v));
    return m;
}

inline double h1_norm(const Field1D& f) {
    Field1D g = d_dz(f);
    double a = l2_norm(f), b = l2_norm(g);
    return std::sqrt(a * a + b * b);
}

/// sqrt(||f||^2 + ||df/dx||^2 + ||df/dz||^2), centered x, one-sided z ends.
inline double h1_norm(const Field2D& f) {
    Field2D fx = d_dx(f);
    Field2D fz = d_dz(f);
    double a = l2_norm(f), b = l2_norm(fx), c = l2_norm(fz);
    return std::sqrt(a * a + b * b + c * c);
}

/// L2 norm of <Z>^l * f over [0, Z_max] (x [0,L] for the 2D variant).
inline double weighted_l2(const HalfLineField& f, int l) {
    require(l >= 0, "weighted_l2: l must be nonnegative");
    auto w = trapezoid_weights(f.grid->Z);
    const auto& Z = f.grid->Z;
    double s = 0.0;
    for (std::size_t j = 0; j < f.v.size(); ++j) {
        double wt = 1.0;
        double q = 1.0 + Z[j] * Z[j];
        for (int p = 0; p < l; ++p) wt *= q;  // <Z>^{2l}
        s += w[j] * wt * f.v[j] * f.v[j];
    }
    return std::sqrt(s);
}

inline double weighted_l2(const HalfLineField2D& f, int l) {
    require(l >= 0, "weighted_l2: l must be nonnegative");
    auto w = trapezoid_weights(f.grid->Z);
    const auto& Z = f.grid->Z;
    const int nx = f.nx;
    double s = 0.0;
    for (int j = 0; j < f.nZ(); ++j) {
        double wt = 1.0;
        double q = 1.0 + Z[j] * Z[j];
        for (int p = 0; p < l; ++p) wt *= q;
        double row = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            double v = f.at(ix, j);
            row += v * v;
        }
        s += w[j] * wt * row;
    }
    return std::sqrt(s * (f.L / nx));
}

inline double l2_norm(const HalfLineField& f) { return weighted_l2(f, 0); }
inline double l2_norm(const HalfLineField2D& f) { return weighted_l2(f, 0); }

/// Restrict to the interior band z in [delta, 1-delta] (Kato-type windows).
inline Field2D interior_restrict(const Field2D& f, double delta) {
    require(delta > 0.0 && delta < 0.5, "interior_restrict: delta must lie in (0, 1/2)");
    const auto& z = f.grid->z;
    const double tol = 1e-12;
    std::vector<int> keep;
    for (int j = 0; j < f.nz(); ++j)
        if (z[j] >= delta - tol && z[j] <= 1.0 - delta + tol) keep.push_back(j);
    if (keep.empty()) throw DomainError("interior_restrict: no nodes in [delta, 1-delta]");

    auto sub = std::make_shared<Grid2D>();
    sub->nx = f.grid->nx;
    sub->L = f.grid->L;
    sub->z.reserve(keep.size());
    for (int j : keep) sub->z.push_back(z[j]);

    Field2D g;
    g.grid = sub;
    g.t = f.t;
    g.v.resize(static_cast<std::size_t>(sub->nx) * keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (int ix = 0; ix < f.nx(); ++ix)
            g.v[r * f.nx() + ix] = f.at(ix, keep[r]);
    return g;
}

inline Field1D interior_restrict(const Field1D& f, double delta) {
    require(delta > 0.0 && delta < 0.5, "interior_restrict: delta must lie in (0, 1/2)");
    const auto& z = f.grid->z;
    const double tol = 1e-12;
    std::vector<int> keep;
    for (int j = 0; j < f.nz(); ++j)
        if (z[j] >= delta - tol && z[j] <= 1.0 - delta + tol) keep.push_back(j);
    if (keep.empty()) throw DomainError("interior_restrict: no nodes in [delta, 1-delta]");

    auto sub = std::make_shared<Grid2D>();
    sub->nx = f.grid->nx;
    sub->L = f.grid->L;
    for (int j : keep) sub->z.push_back(z[j]);

    Field1D g;
    g.grid = sub;
    g.t = f.t;
    for (int j : keep) g.v.push_back(f.v[j]);
    return g;
}

struct AnisoResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// Accumulates the pieces of the anisotropic interpolation inequality over a
/// time series; each norm is taken L-infinity in time before combining.
struct AnisoAccumulator {
    double sup = 0.0, l2 = 0.0, l2_dz = 0.0, l2_dx = 0.0, l2_dxdz = 0.0;
    double trace_tol = 1e-8;

    void add(const Field2D& f) {
        const int nz = f.nz();
        for (int ix = 0; ix < f.nx(); ++ix) {
            if (std::fabs(f.at(ix, 0)) > trace_tol || std::fabs(f.at(ix, nz - 1)) > trace_tol)
                throw DomainError("anisotropic check: field must vanish on z boundaries");
        }
        Field2D fz = d_dz(f);
        Field2D fx = d_dx(f);
        Field2D fxz = d_dx(fz);
        sup = std::max(sup, linf_norm(f));
        l2 = std::max(l2, l2_norm(f));
        l2_dz = std::max(l2_dz, l2_norm(fz));
        l2_dx = std::max(l2_dx, l2_norm(fx));
        l2_dxdz = std::max(l2_dxdz, l2_norm(fxz));
    }

    AnisoResult finalize() const {
        AnisoResult r;
        r.lhs = sup;
        r.rhs = std::sqrt(l2) * std::sqrt(l2_dz) + std::sqrt(l2_dz) * std::sqrt(l2_dx) +
                std::sqrt(l2) * std::sqrt(l2_dxdz);
        r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
        return r;
    }
};

/// Single-field version of the inequality check (constant C taken as 1).
inline AnisoResult anisotropic_sobolev_check(const Field2D& f, double trace_tol = 1e-8) {
    AnisoAccumulator acc;
    acc.trace_tol = trace_tol;
    acc.add(f);
    return acc.finalize();
}

}  // namespace layerlab
