// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "layerlab/common.hpp"

namespace layerlab {

/// Periodic-in-x channel grid on [0,L] x [z.front(), z.back()].
/// x nodes are uniform without the duplicate right endpoint; z nodes may be
/// graded. Channel grids run over [0,1] exactly; restricted grids (interior
/// bands) carry a sub-range.
struct Grid2D {
    int nx = 0;
    double L = 0.0;
    std::vector<double> z;

    int nz() const { return static_cast<int>(z.size()); }
    double dx() const { return L / nx; }
    double x(int i) const { return L * i / nx; }

    void validate_nodes() const {
        require(nx >= 4, "Grid2D: nx >= 4 required");
        require(static_cast<int>(z.size()) >= 8, "Grid2D: nz >= 8 required");
        require(L > 0.0, "Grid2D: L > 0 required");
        for (std::size_t j = 1; j < z.size(); ++j)
            require(z[j] > z[j - 1], "Grid2D: z nodes must be strictly increasing");
    }

    /// Full channel grid; endpoints must be exactly 0 and 1.
    static Grid2D channel(int nx, std::vector<double> z_nodes, double L) {
        Grid2D g;
        g.nx = nx;
        g.L = L;
        g.z = std::move(z_nodes);
        g.validate_nodes();
        require(g.z.front() == 0.0 && g.z.back() == 1.0,
                "Grid2D: channel z endpoints must be exactly 0 and 1");
        return g;
    }
};

inline std::vector<double> uniform_nodes(int n, double lo, double hi) {
    require(n >= 2, "uniform_nodes: n >= 2");
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = lo + (hi - lo) * j / (n - 1);
    v.front() = lo;
    v.back() = hi;
    return v;
}

/// Two-sided tanh-stretched nodes on [0,1], clustering at both walls.
/// gamma = 0 falls back to uniform spacing.
inline std::vector<double> tanh_graded_nodes(int n, double gamma) {
    require(n >= 2, "tanh_graded_nodes: n >= 2");
    if (gamma <= 0.0) return uniform_nodes(n, 0.0, 1.0);
    std::vector<double> v(n);
    const double th = std::tanh(gamma);
    for (int j = 0; j < n; ++j) {
        double s = static_cast<double>(j) / (n - 1);
        v[j] = 0.5 * (1.0 + std::tanh(gamma * (2.0 * s - 1.0)) / th);
    }
    v.front() = 0.0;
    v.back() = 1.0;
    return v;
}

/// Smallest stretch gamma whose wall spacing on an n-node mesh is <= target.
inline double pick_tanh_gamma(int n, double target_wall_spacing) {
    auto wall_h = [n](double gamma) {
        auto v = tanh_graded_nodes(n, gamma);
        return v[1] - v[0];
    };
    if (wall_h(0.0) <= target_wall_spacing) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (wall_h(hi) > target_wall_spacing) {
        hi *= 2.0;
        require(hi < 64.0, "pick_tanh_gamma: unattainable wall spacing");
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (wall_h(mid) > target_wall_spacing ? lo : hi) = mid;
    }
    return hi;
}

inline int count_nodes_below(const std::vector<double>& z, double bound) {
    int c = 0;
    for (double v : z)
        if (v <= bound) ++c;
    return c;
}

/// Truncated half-line [0, Z_max] with uniform spacing (boundary-layer
/// variables are already stretched, no grading needed).
struct HalfLineGrid {
    double z_max = 0.0;
    std::vector<double> Z;

    int n() const { return static_cast<int>(Z.size()); }
    double dZ() const { return Z[1] - Z[0]; }

    static HalfLineGrid uniform(int n, double z_max) {
        require(n >= 8, "HalfLineGrid: n >= 8 required");
        require(z_max >= 10.0, "HalfLineGrid: Z_max >= 10 required");
        HalfLineGrid g;
        g.z_max = z_max;
        g.Z = uniform_nodes(n, 0.0, z_max);
        return g;
    }
};

}  // namespace layerlab
