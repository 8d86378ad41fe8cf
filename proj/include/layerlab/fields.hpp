// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "layerlab/common.hpp"
#include "layerlab/grid.hpp"

namespace layerlab {

using GridPtr = std::shared_ptr<const Grid2D>;
using HalfGridPtr = std::shared_ptr<const HalfLineGrid>;

/// Scalar samples over the z nodes of a channel grid (u1-type fields).
struct Field1D {
    GridPtr grid;
    std::vector<double> v;
    double t = 0.0;

    Field1D() = default;
    explicit Field1D(GridPtr g, double stamp = 0.0)
        : grid(std::move(g)), v(grid->z.size(), 0.0), t(stamp) {}

    int nz() const { return grid->nz(); }
};

/// Scalar samples over (x,z); row-major over z then x: v[iz*nx + ix].
struct Field2D {
    GridPtr grid;
    std::vector<double> v;
    double t = 0.0;

    Field2D() = default;
    explicit Field2D(GridPtr g, double stamp = 0.0)
        : grid(std::move(g)),
          v(static_cast<std::size_t>(grid->nx) * grid->z.size(), 0.0), t(stamp) {}

    int nx() const { return grid->nx; }
    int nz() const { return grid->nz(); }
    double& at(int ix, int iz) { return v[static_cast<std::size_t>(iz) * grid->nx + ix]; }
    double at(int ix, int iz) const { return v[static_cast<std::size_t>(iz) * grid->nx + ix]; }
};

/// Samples over the truncated half-line Z grid (theta1-type correctors).
struct HalfLineField {
    HalfGridPtr grid;
    std::vector<double> v;
    double t = 0.0;

    HalfLineField() = default;
    explicit HalfLineField(HalfGridPtr g, double stamp = 0.0)
        : grid(std::move(g)), v(grid->Z.size(), 0.0), t(stamp) {}

    int n() const { return grid->n(); }
};

/// Samples over (x,Z); v[iZ*nx + ix] with uniform periodic x of period L.
struct HalfLineField2D {
    HalfGridPtr grid;
    int nx = 0;
    double L = 0.0;
    std::vector<double> v;
    double t = 0.0;

    HalfLineField2D() = default;
    HalfLineField2D(HalfGridPtr g, int nx_, double L_, double stamp = 0.0)
        : grid(std::move(g)), nx(nx_), L(L_),
          v(static_cast<std::size_t>(nx_) * grid->Z.size(), 0.0), t(stamp) {}

    int nZ() const { return grid->n(); }
    double& at(int ix, int iZ) { return v[static_cast<std::size_t>(iZ) * nx + ix]; }
    double at(int ix, int iZ) const { return v[static_cast<std::size_t>(iZ) * nx + ix]; }
};

/// Ordered stamps with one field per stamp. Stamps are strictly increasing
/// and uniform unless a solver was configured otherwise.
template <class F>
struct TimeSeries {
    std::vector<double> stamps;
    std::vector<F> frames;

    int size() const { return static_cast<int>(stamps.size()); }
    const F& at(int k) const { return frames[static_cast<std::size_t>(k)]; }
    F& at(int k) { return frames[static_cast<std::size_t>(k)]; }

    void push(double t, F f) {
        if (!stamps.empty())
            require(t > stamps.back(), "TimeSeries: stamps must be strictly increasing");
        stamps.push_back(t);
        frames.push_back(std::move(f));
    }
};

/// Uniform stamp grid t_0=0,...,t_{count-1}=T.
inline std::vector<double> make_stamps(double T, int count) {
    require(count >= 2 && T > 0.0, "make_stamps: need count >= 2, T > 0");
    std::vector<double> s(count);
    for (int k = 0; k < count; ++k) s[k] = T * k / (count - 1);
    s.back() = T;
    return s;
}

/// Plain-text dump: one-line header, then nz rows of nx values (x fastest).
inline void dump_field(std::FILE* f, const Field2D& u) {
    std::fprintf(f, "# t=%.17g nx=%d nz=%d\n", u.t, u.nx(), u.nz());
    for (int iz = 0; iz < u.nz(); ++iz) {
        for (int ix = 0; ix < u.nx(); ++ix)
            std::fprintf(f, "%.17g%c", u.at(ix, iz), ix + 1 == u.nx() ? '\n' : ' ');
    }
}

inline void dump_field(std::FILE* f, const Field1D& u) {
    std::fprintf(f, "# t=%.17g nx=1 nz=%d\n", u.t, u.nz());
    for (int iz = 0; iz < u.nz(); ++iz) std::fprintf(f, "%.17g\n", u.v[iz]);
}

}  // namespace layerlab
