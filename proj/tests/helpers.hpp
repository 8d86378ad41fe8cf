// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "layerlab/fields.hpp"
#include "layerlab/grid.hpp"

namespace layerlab::testing {

inline GridPtr uniform_channel(int nx, int nz, double L) {
    return std::make_shared<Grid2D>(Grid2D::channel(nx, uniform_nodes(nz, 0.0, 1.0), L));
}

template <class FieldT>
void fill_random(FieldT& f, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    for (auto& v : f.v) v = d(rng);
}

inline Field2D sample2d(GridPtr g, const std::function<double(double, double)>& fn,
                        double t = 0.0) {
    Field2D f(g, t);
    for (int j = 0; j < g->nz(); ++j)
        for (int ix = 0; ix < g->nx; ++ix) f.at(ix, j) = fn(g->x(ix), g->z[j]);
    return f;
}

inline Field1D sample1d(GridPtr g, const std::function<double(double)>& fn, double t = 0.0) {
    Field1D f(g, t);
    for (int j = 0; j < g->nz(); ++j) f.v[j] = fn(g->z[j]);
    return f;
}

}  // namespace layerlab::testing
