// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/fields.hpp"

namespace layerlab {

/// Three-point coefficients of d/dz on a nonuniform mesh, second order.
struct DzCoeffs {
    double lo, mid, hi;
};

inline DzCoeffs dz_interior(double hm, double hp) {
    return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

/// One-sided 3-point d/dz at the left end (nodes j, j+1, j+2; h1, h2 spacings).
inline DzCoeffs dz_left(double h1, double h2) {
    return {-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2),
            -h1 / (h2 * (h1 + h2))};
}

/// One-sided 3-point d/dz at the right end (nodes j-2, j-1, j).
inline DzCoeffs dz_right(double h1, double h2) {
    // h1 = z_{n-1}-z_{n-2}, h2 = z_{n-2}-z_{n-3}
    return {h1 / (h2 * (h1 + h2)), -(h1 + h2) / (h1 * h2),
            (2.0 * h1 + h2) / (h1 * (h1 + h2))};
}

/// d/dz of a 1D z-profile, centered inside, one-sided at the walls.
inline std::vector<double> d_dz(const std::vector<double>& f, const std::vector<double>& z) {
    const int n = static_cast<int>(z.size());
    std::vector<double> g(n);
    {
        auto c = dz_left(z[1] - z[0], z[2] - z[1]);
        g[0] = c.lo * f[0] + c.mid * f[1] + c.hi * f[2];
    }
    for (int j = 1; j + 1 < n; ++j) {
        auto c = dz_interior(z[j] - z[j - 1], z[j + 1] - z[j]);
        g[j] = c.lo * f[j - 1] + c.mid * f[j] + c.hi * f[j + 1];
    }
    {
        auto c = dz_right(z[n - 1] - z[n - 2], z[n - 2] - z[n - 3]);
        g[n - 1] = c.lo * f[n - 3] + c.mid * f[n - 2] + c.hi * f[n - 1];
    }
    return g;
}

inline Field1D d_dz(const Field1D& f) {
    Field1D g(f.grid, f.t);
    g.v = d_dz(f.v, f.grid->z);
    return g;
}

inline Field2D d_dz(const Field2D& f) {
    const auto& z = f.grid->z;
    const int nx = f.nx(), nz = f.nz();
    Field2D g(f.grid, f.t);
    auto cl = dz_left(z[1] - z[0], z[2] - z[1]);
    auto cr = dz_right(z[nz - 1] - z[nz - 2], z[nz - 2] - z[nz - 3]);
    for (int ix = 0; ix < nx; ++ix) {
        g.at(ix, 0) = cl.lo * f.at(ix, 0) + cl.mid * f.at(ix, 1) + cl.hi * f.at(ix, 2);
        g.at(ix, nz - 1) = cr.lo * f.at(ix, nz - 3) + cr.mid * f.at(ix, nz - 2) +
                           cr.hi * f.at(ix, nz - 1);
    }
    for (int j = 1; j + 1 < nz; ++j) {
        auto c = dz_interior(z[j] - z[j - 1], z[j + 1] - z[j]);
        for (int ix = 0; ix < nx; ++ix)
            g.at(ix, j) = c.lo * f.at(ix, j - 1) + c.mid * f.at(ix, j) + c.hi * f.at(ix, j + 1);
    }
    return g;
}

/// d/dx of a periodic 2D field, centered second order.
inline Field2D d_dx(const Field2D& f) {
    const int nx = f.nx(), nz = f.nz();
    const double inv2h = 1.0 / (2.0 * f.grid->dx());
    Field2D g(f.grid, f.t);
    for (int j = 0; j < nz; ++j)
        for (int ix = 0; ix < nx; ++ix) {
            int ip = ix + 1 == nx ? 0 : ix + 1;
            int im = ix == 0 ? nx - 1 : ix - 1;
            g.at(ix, j) = (f.at(ip, j) - f.at(im, j)) * inv2h;
        }
    return g;
}

/// Periodic centered d/dx over raw rows of length nx (helper for half-line fields).
inline void d_dx_row(const double* f, double* g, int nx, double dx) {
    const double inv2h = 1.0 / (2.0 * dx);
    for (int ix = 0; ix < nx; ++ix) {
        int ip = ix + 1 == nx ? 0 : ix + 1;
        int im = ix == 0 ? nx - 1 : ix - 1;
        g[ix] = (f[ip] - f[im]) * inv2h;
    }
}

inline void d_dxx_row(const double* f, double* g, int nx, double dx) {
    const double invh2 = 1.0 / (dx * dx);
    for (int ix = 0; ix < nx; ++ix) {
        int ip = ix + 1 == nx ? 0 : ix + 1;
        int im = ix == 0 ? nx - 1 : ix - 1;
        g[ix] = ((f[ip] - f[ix]) - (f[ix] - f[im])) * invh2;
    }
}

}  // namespace layerlab
