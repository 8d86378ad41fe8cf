// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "layerlab/euler.hpp"
#include "layerlab/norms.hpp"
#include "helpers.hpp"

using namespace layerlab;
using layerlab::testing::uniform_channel;
using Catch::Approx;

TEST_CASE("u1 quadrature") {
    auto grid = uniform_channel(8, 17, 2.0 * pi);

    SECTION("zero forcing keeps the initial profile") {
        Scenario s = make_scenario("zero", {});
        s.a.v = [](double z) { return std::sin(pi * z); };
        EulerSolution e = solve_euler(s, grid, 33);
        for (int k = 0; k < 33; ++k)
            for (int j = 0; j < grid->nz(); ++j)
                CHECK(e.u1.at(k).v[j] == Approx(std::sin(pi * grid->z[j])).margin(1e-15));
    }

    SECTION("constant forcing integrates to t") {
        Scenario s = make_scenario("zero", {});
        s.f1.v = [](double, double) { return 1.0; };
        EulerSolution e = solve_euler(s, grid, 33);
        for (int k = 0; k < 33; ++k)
            CHECK(e.u1.at(k).v[5] == Approx(e.stamps[k]).margin(1e-14));
    }

    SECTION("f1 = sin(t) against the closed-form antiderivative") {
        Scenario s = make_scenario("zero", {});
        s.f1.v = [](double t, double) { return std::sin(t); };
        EulerSolution e = solve_euler(s, grid, 201);
        for (int k = 0; k < 201; ++k)
            CHECK(e.u1.at(k).v[3] == Approx(1.0 - std::cos(e.stamps[k])).margin(1e-8));
    }
}

TEST_CASE("u2 characteristics") {
    SECTION("pure translation: constant u1 transports the profile exactly") {
        const int nx = 32;
        const double L = 2.0 * pi;
        Scenario s = make_scenario("zero", {});
        s.L = L;
        const double c = L / 4.0;
        s.a.v = [c](double) { return c; };
        s.b.v = [L](double x, double) { return std::cos(2.0 * pi * x / L); };
        auto grid = uniform_channel(nx, 17, L);
        EulerSolution e = solve_euler(s, grid, 9);
        for (int k = 0; k < 9; ++k) {
            Field2D u2 = euler_u2_at(s, e, k);
            double t = e.stamps[k];
            for (int ix = 0; ix < nx; ++ix)
                CHECK(u2.at(ix, 5) ==
                      Approx(std::cos(2.0 * pi * (grid->x(ix) - c * t) / L)).margin(1e-10));
        }
    }

    SECTION("x-independent data reduces to plain quadrature") {
        Scenario s = make_scenario("zero", {});
        s.a.v = [](double z) { return 0.3 * z; };  // advection inert
        s.b.v = [](double, double z) { return std::cos(pi * z); };
        s.b.dz = [](double, double z) { return -pi * std::sin(pi * z); };
        s.f2.v = [](double t, double, double) { return std::sin(t); };
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 65);
        for (int k : {0, 10, 40, 64}) {
            Field2D u2 = euler_u2_at(s, e, k);
            double t = e.stamps[k];
            for (int ix = 0; ix < 8; ++ix)
                CHECK(u2.at(ix, 4) ==
                      Approx(std::cos(pi * grid->z[4]) + 1.0 - std::cos(t)).margin(1e-9));
        }
    }

    SECTION("all data zero gives the zero solution") {
        Scenario s = make_scenario("zero", {});
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 17);
        TimeSeries<Field2D> u2 = solve_euler_u2(s, e);
        for (int k = 0; k < u2.size(); ++k) CHECK(linf_norm(u2.at(k)) == 0.0);
    }
}

TEST_CASE("transport preserves the range with zero forcing") {
    // node-aligned shifts, so the nodal max is carried exactly
    const int nx = 32;
    const double L = 2.0 * pi;
    Scenario s = make_scenario("zero", {});
    s.L = L;
    s.a.v = [L](double) { return L / 4.0; };
    s.b.v = [L](double x, double) { return std::cos(2.0 * pi * x / L); };
    auto grid = uniform_channel(nx, 17, L);
    EulerSolution e = solve_euler(s, grid, 9);
    double m0 = linf_norm(euler_u2_at(s, e, 0));
    for (int k = 1; k < 9; ++k)
        CHECK(linf_norm(euler_u2_at(s, e, k)) == Approx(m0).margin(1e-10));
}

TEST_CASE("euler solve is independent of eps and rho0") {
    Scenario s1 = make_scenario("default", {});
    Scenario s2 = make_scenario("default", {{"rho_base", 2.0}, {"rho_slope", -0.7}});
    auto grid = uniform_channel(16, 17, s1.L);
    EulerSolution e1 = solve_euler(s1, grid, 33);
    EulerSolution e2 = solve_euler(s2, grid, 33);
    for (int k = 0; k < 33; ++k) {
        REQUIRE(std::memcmp(e1.u1.at(k).v.data(), e2.u1.at(k).v.data(),
                            e1.u1.at(k).v.size() * sizeof(double)) == 0);
        Field2D a = euler_u2_at(s1, e1, k);
        Field2D b = euler_u2_at(s2, e2, k);
        REQUIRE(std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("u2 periodicity through the analytic trace") {
    Scenario s = make_scenario("default", {});
    auto grid = uniform_channel(16, 17, s.L);
    EulerSolution e = solve_euler(s, grid, 17);
    for (int k : {5, 16}) {
        double t = e.stamps[k];
        for (double x : {0.3, 2.0})
            CHECK(euler_u2_wall(s, e, Side::lower, t, x) ==
                  Approx(euler_u2_wall(s, e, Side::lower, t, x + s.L)).margin(1e-12));
    }
}
