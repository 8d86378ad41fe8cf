// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "layerlab/common.hpp"

namespace layerlab {

/// Scratch buffers for the Thomas algorithm, reusable across solves.
struct TridiagWorkspace {
    std::vector<double> cp;    // modified super-diagonal
    std::vector<double> dp;    // modified rhs
    std::vector<double> diag;  // modified diagonal (cyclic solve)
    std::vector<double> u;     // Sherman-Morrison auxiliary solution
    std::vector<double> ru;    // Sherman-Morrison auxiliary rhs

    void resize(std::size_t n) {
        if (cp.size() < n) {
            cp.resize(n);
            dp.resize(n);
            diag.resize(n);
            u.resize(n);
            ru.resize(n);
        }
    }
};

/// Thomas algorithm for a (diagonally dominant) tridiagonal system.
/// a = sub-diagonal (a[0] unused), b = diagonal, c = super-diagonal
/// (c[n-1] unused), d = rhs. Solution written into x. No pivoting.
inline void solve_tridiag(const double* a, const double* b, const double* c,
                          const double* d, double* x, std::size_t n,
                          TridiagWorkspace& ws) {
    ws.resize(n);
    double* cp = ws.cp.data();
    double* dp = ws.dp.data();

    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for (std::size_t i = 1; i < n; ++i) {
        double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
}

/// Periodic (cyclic) tridiagonal solve via the Sherman-Morrison correction.
/// alpha couples row 0 to column n-1, beta couples row n-1 to column 0.
inline void solve_cyclic_tridiag(const double* a, const double* b, const double* c,
                                 double alpha, double beta, const double* d, double* x,
                                 std::size_t n, TridiagWorkspace& ws) {
    require(n >= 3, "cyclic tridiagonal system needs n >= 3");
    ws.resize(n);

    // Rank-one split: B = A - u v^T with u = gamma e_0 + beta e_{n-1},
    // v = e_0 + (alpha/gamma) e_{n-1}; A is the plain tridiagonal part.
    const double gamma = -b[0];
    double* bb = ws.diag.data();
    for (std::size_t i = 0; i < n; ++i) bb[i] = b[i];
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;

    double* ru = ws.ru.data();
    for (std::size_t i = 0; i < n; ++i) ru[i] = 0.0;
    ru[0] = gamma;
    ru[n - 1] = beta;

    solve_tridiag(a, bb, c, d, x, n, ws);
    // cp/dp are free to reuse once the first solve completed
    double* usol = ws.u.data();
    solve_tridiag(a, bb, c, ru, usol, n, ws);

    double fact = (x[0] + alpha * x[n - 1] / gamma) /
                  (1.0 + usol[0] + alpha * usol[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * usol[i];
}

}  // namespace layerlab
