// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "layerlab/analysis.hpp"
#include "layerlab/norms.hpp"
#include "layerlab/viscous.hpp"
#include "helpers.hpp"

using namespace layerlab;
using layerlab::testing::uniform_channel;
using Catch::Approx;

namespace {

TimeSeries<Field1D> analytic_u1_half(GridPtr grid, int nt, double T,
                                     const std::function<double(double, double)>& u1) {
    TimeSeries<Field1D> out;
    for (int i = 0; i <= 2 * nt; ++i) {
        double t = T * i / (2.0 * nt);
        Field1D f(grid, t);
        for (int j = 0; j < grid->nz(); ++j) f.v[j] = u1(t, grid->z[j]);
        out.push(t, std::move(f));
    }
    return out;
}

}  // namespace

TEST_CASE("u1 solver trivial states") {
    auto grid = uniform_channel(8, 33, 2.0 * pi);

    SECTION("all-zero data stays zero") {
        Scenario s = make_scenario("zero", {});
        auto u = solve_viscous_u1(s, 0.01, grid, 64);
        for (int k = 0; k < u.size(); ++k)
            for (double v : u.at(k).v) CHECK(v == 0.0);
    }

    SECTION("constant state is preserved bitwise") {
        Scenario s = make_scenario("zero", {});
        s.rho0.v = [](double z) { return 1.0 + 0.5 * z; };
        s.a.v = [](double) { return 1.0; };
        s.beta1_lower.v = [](double) { return 1.0; };
        s.beta1_upper.v = [](double) { return 1.0; };
        auto u = solve_viscous_u1(s, 0.05, grid, 64);
        for (int k = 0; k < u.size(); ++k)
            for (double v : u.at(k).v) CHECK(v == 1.0);
    }
}

TEST_CASE("u1 erfc similarity oracle") {
    // step boundary data (deliberately incompatible), half-space regime
    const double eps = 1.0 / 256.0;
    Scenario s = make_scenario("zero", {});
    s.beta1_lower.v = [](double) { return 1.0; };

    GridPolicy pol;
    pol.nx = 4;
    pol.nz = 257;
    pol.wall_refine = 32.0;
    GridPtr grid = build_grid(pol, eps, s.L);
    int nt = pick_nt(pol, *grid, s.T);

    ViscousOptions opt;
    opt.startup_be_steps = 2;
    auto u = solve_viscous_u1(s, eps, grid, nt, nt / 4, opt);

    for (int k = 1; k < u.size(); ++k) {
        double t = u.at(k).t;
        REQUIRE(std::sqrt(eps * t) <= 0.1);
        double worst = 0.0;
        for (int j = 0; j < grid->nz(); ++j) {
            double exact = std::erfc(grid->z[j] / (2.0 * std::sqrt(eps * t)));
            worst = std::max(worst, std::fabs(u.at(k).v[j] - exact));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("u1 discrete maximum principle with zero forcing") {
    Scenario s = make_scenario("default", {});
    const double eps = 1.0 / 64.0;
    GridPolicy pol;
    pol.nx = 4;
    pol.nz = 257;
    pol.stamps = 9;
    GridPtr grid = build_grid(pol, eps, s.L);
    int nt = 4 * pick_nt(pol, *grid, s.T);  // resolved steps
    auto u = solve_viscous_u1(s, eps, grid, nt, nt / 8);

    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < grid->nz(); ++j) {
        lo = std::min(lo, s.a_at(grid->z[j]));
        hi = std::max(hi, s.a_at(grid->z[j]));
    }
    for (int i = 0; i <= 200; ++i) {
        double t = s.T * i / 200.0;
        for (Side sd : {Side::lower, Side::upper}) {
            double b = layerlab::detail::eval(s.beta1(sd).v, "beta1", t);
            lo = std::min(lo, b);
            hi = std::max(hi, b);
        }
    }
    for (int k = 0; k < u.size(); ++k)
        for (double v : u.at(k).v) {
            CHECK(v >= lo - 1e-10);
            CHECK(v <= hi + 1e-10);
        }
}

TEST_CASE("u2 solver trivial states and determinism") {
    auto grid = uniform_channel(16, 33, 2.0 * pi);

    SECTION("all data zero stays zero") {
        Scenario s = make_scenario("zero", {});
        auto u1h = solve_viscous_u1(s, 0.01, grid, 2 * 32);
        auto u2 = solve_viscous_u2(s, 0.01, u1h, grid, 32);
        for (int k = 0; k < u2.size(); ++k)
            for (double v : u2.at(k).v) CHECK(v == 0.0);
    }

    SECTION("constant state is preserved bitwise") {
        Scenario s = make_scenario("zero", {});
        s.rho0.v = [](double z) { return 1.0 + 0.5 * z; };
        s.a.v = [](double) { return 0.4; };
        s.beta1_lower.v = [](double) { return 0.4; };
        s.beta1_upper.v = [](double) { return 0.4; };
        s.b.v = [](double, double) { return -2.0; };
        s.beta2_lower.v = [](double, double) { return -2.0; };
        s.beta2_upper.v = [](double, double) { return -2.0; };
        auto u1h = solve_viscous_u1(s, 0.05, grid, 2 * 32);
        auto u2 = solve_viscous_u2(s, 0.05, u1h, grid, 32);
        for (int k = 0; k < u2.size(); ++k)
            for (double v : u2.at(k).v) CHECK(v == -2.0);
    }

    SECTION("identical inputs give bit-identical outputs") {
        Scenario s = make_scenario("default", {});
        auto u1h = solve_viscous_u1(s, 0.02, grid, 2 * 32);
        auto a = solve_viscous_u2(s, 0.02, u1h, grid, 32);
        auto b = solve_viscous_u2(s, 0.02, u1h, grid, 32);
        for (int k = 0; k < a.size(); ++k)
            REQUIRE(std::memcmp(a.at(k).v.data(), b.at(k).v.data(),
                                a.at(k).v.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("u2 with x-independent data matches the 1D heat machinery") {
    const double eps = 0.05;
    const int nt = 64;
    auto grid = uniform_channel(16, 65, 2.0 * pi);

    Scenario s = make_scenario("zero", {});
    s.rho0.v = [](double z) { return 1.0 + 0.5 * z; };
    s.rho0.dz = [](double) { return 0.5; };
    s.a.v = [](double) { return 0.3; };
    s.beta1_lower.v = [](double) { return 0.3; };
    s.beta1_upper.v = [](double) { return 0.3; };
    s.b.v = [](double, double z) { return std::sin(pi * z); };

    auto u1h = solve_viscous_u1(s, eps, grid, 2 * nt);
    auto u2 = solve_viscous_u2(s, eps, u1h, grid, nt);

    // same data through the 1D path
    Scenario s1 = make_scenario("zero", {});
    s1.rho0.v = [](double z) { return 1.0 + 0.5 * z; };
    s1.rho0.dz = [](double) { return 0.5; };
    s1.a.v = [](double z) { return std::sin(pi * z); };
    auto ref = solve_viscous_u1(s1, eps, grid, nt);

    double worst = 0.0;
    for (int k = 0; k < u2.size(); ++k)
        for (int j = 0; j < grid->nz(); ++j)
            for (int ix = 0; ix < grid->nx; ++ix)
                worst = std::max(worst, std::fabs(u2.at(k).at(ix, j) - ref.at(k).v[j]));
    CHECK(worst < 1e-10);
}

TEST_CASE("u2 manufactured solution converges at second order") {
    // u2* = sin(kx) z(1-z) (1+t) with a prescribed analytic u1
    const double eps = 0.05;
    const double L = 2.0 * pi, T = 1.0;
    const double k = 2.0 * pi / L;

    auto u1fn = [](double t, double z) { return 0.3 * (1.0 + t) * std::cos(pi * z); };
    auto exact = [k](double t, double x, double z) {
        return std::sin(k * x) * z * (1.0 - z) * (1.0 + t);
    };

    Scenario s = make_scenario("zero", {});
    s.L = L;
    s.T = T;
    s.rho0.v = [](double z) { return 1.0 + 0.5 * z; };
    s.rho0.dz = [](double) { return 0.5; };
    s.b.v = [k](double x, double z) { return std::sin(k * x) * z * (1.0 - z); };
    s.f2.v = [eps, k, u1fn](double t, double x, double z) {
        double rho = 1.0 + 0.5 * z;
        double u2t = std::sin(k * x) * z * (1.0 - z);
        double lap = -k * k * std::sin(k * x) * z * (1.0 - z) * (1.0 + t) -
                     2.0 * std::sin(k * x) * (1.0 + t);
        double u2x = k * std::cos(k * x) * z * (1.0 - z) * (1.0 + t);
        return u2t - (eps / rho) * lap + u1fn(t, z) * u2x;
    };

    std::vector<double> errs;
    for (int lev = 0; lev < 3; ++lev) {
        int nx = 16 << lev;
        int nz = 16 * (1 << lev) + 1;
        int nt = 20 << lev;
        auto grid = uniform_channel(nx, nz, L);
        auto u1h = analytic_u1_half(grid, nt, T, u1fn);
        auto u2 = solve_viscous_u2(s, eps, u1h, grid, nt, nt);
        double err = 0.0;
        const Field2D& last = u2.at(u2.size() - 1);
        for (int j = 0; j < nz; ++j)
            for (int ix = 0; ix < nx; ++ix)
                err = std::max(err,
                               std::fabs(last.at(ix, j) - exact(T, grid->x(ix), grid->z[j])));
        errs.push_back(err);
    }
    double order1 = std::log2(errs[0] / errs[1]);
    double order2 = std::log2(errs[1] / errs[2]);
    INFO("errors " << errs[0] << " " << errs[1] << " " << errs[2]);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);
}

TEST_CASE("layer resolution warning") {
    Scenario s = make_scenario("default", {});
    auto grid = uniform_channel(8, 33, s.L);  // far too coarse for eps = 2^-10
    ViscousDiagnostics diag;
    solve_viscous_u1(s, 1.0 / 1024.0, grid, 16, 16, {}, &diag);
    CHECK_FALSE(diag.layer_resolved);
    CHECK_FALSE(diag.warnings.empty());
}
