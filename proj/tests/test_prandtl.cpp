// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "layerlab/prandtl.hpp"
#include "helpers.hpp"

using namespace layerlab;
using layerlab::testing::uniform_channel;
using Catch::Approx;

namespace {

HalfGridPtr half_grid(int n = 401, double zmax = 20.0) {
    return std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(n, zmax));
}

CorrectorSet default_corrector(Side side, int nx = 16, int stamps = 101,
                               double zmax = 20.0, int nZ = 401) {
    Scenario s = make_scenario("default", {});
    auto ref = uniform_channel(nx, 9, s.L);
    EulerSolution e = solve_euler(s, ref, stamps);
    auto zg = std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(nZ, zmax));
    return solve_corrector(side, s, e, zg, nx, stamps - 1, 1, {});
}

}  // namespace

TEST_CASE("theta1 solver") {
    Scenario s = make_scenario("zero", {});

    SECTION("zero mismatch gives the zero corrector") {
        auto th = solve_theta1(Side::lower, s, [](double) { return 0.0; }, half_grid(), 64);
        for (int k = 0; k < th.size(); ++k)
            for (double v : th.at(k).v) CHECK(v == 0.0);
    }

    SECTION("incompatible boundary data is rejected without the override") {
        CHECK_THROWS_AS(
            solve_theta1(Side::lower, s, [](double) { return 1.0; }, half_grid(), 64),
            DomainError);
    }

    SECTION("constant wall data reproduces the erfc similarity solution") {
        Scenario sc = make_scenario("zero", {{"rho_base", 1.25}});
        const double rho = 1.25, c = 0.7;
        CorrectorOptions opt;
        opt.override_compatibility = true;
        opt.startup_be_steps = 2;
        auto th = solve_theta1(Side::lower, sc, [c](double) { return c; }, half_grid(),
                               400, 40, opt);
        REQUIRE(sc.T <= (20.0 / 8.0) * (20.0 / 8.0) * rho);  // truncation-validity window
        for (int k = 1; k < th.size(); ++k) {
            double t = th.at(k).t;
            if (t < 0.1) continue;  // early front narrower than the mesh
            double worst = 0.0;
            for (int j = 0; j < th.at(k).n(); ++j) {
                double Z = th.at(k).grid->Z[j];
                worst = std::max(worst, std::fabs(th.at(k).v[j] -
                                                  c * std::erfc(Z * std::sqrt(rho) /
                                                                (2.0 * std::sqrt(t)))));
            }
            CHECK(worst < 1e-3);
        }
    }

    SECTION("far-field row is pinned to exactly zero") {
        Scenario sd = make_scenario("default", {});
        auto th = solve_theta1(Side::lower, sd,
                               [](double t) { return 1.0 - std::cos(t); }, half_grid(), 64);
        for (int k = 0; k < th.size(); ++k) CHECK(th.at(k).v[th.at(k).n() - 1] == 0.0);
    }

    SECTION("discrete maximum principle") {
        Scenario sd = make_scenario("default", {});
        auto g1 = [](double t) { return 1.0 - std::cos(t); };
        auto th = solve_theta1(Side::lower, sd, g1, half_grid(), 128);
        double gmax = 0.0;
        for (int i = 0; i <= 256; ++i) gmax = std::max(gmax, g1(sd.T * i / 256.0));
        for (int k = 0; k < th.size(); ++k)
            for (double v : th.at(k).v) CHECK(std::fabs(v) <= gmax + 1e-10);
    }
}

TEST_CASE("theta2 solver") {
    SECTION("zero data gives the zero corrector") {
        Scenario s = make_scenario("zero", {});
        auto zg = half_grid();
        auto th1 = solve_theta1(Side::lower, s, [](double) { return 0.0; }, zg, 2 * 32);
        CorrectorTraces tr;
        tr.u1_wall = [](double) { return 0.0; };
        tr.dxu2_wall = [](double, double) { return 0.0; };
        tr.g2 = [](double, double) { return 0.0; };
        auto th2 = solve_theta2(Side::lower, s, th1, tr, zg, 8, 32);
        for (int k = 0; k < th2.size(); ++k)
            for (double v : th2.at(k).v) CHECK(v == 0.0);
    }

    SECTION("x-independent data reduces to the theta1 machinery") {
        Scenario s = make_scenario("zero", {{"rho_base", 1.5}});
        auto zg = half_grid();
        const int nt = 64;
        auto g = [](double t) { return 0.8 * (1.0 - std::cos(t)); };
        auto th1 = solve_theta1(Side::lower, s, [](double t) { return 0.3 * (1.0 - std::cos(t)); },
                                zg, 2 * nt);
        CorrectorTraces tr;
        tr.u1_wall = [](double) { return 0.25; };
        tr.dxu2_wall = [](double, double) { return 0.0; };
        tr.g2 = [g](double t, double) { return g(t); };
        auto th2 = solve_theta2(Side::lower, s, th1, tr, zg, 8, nt);

        auto ref = solve_theta1(Side::lower, s, g, zg, nt);
        double worst = 0.0;
        for (int k = 0; k < th2.size(); ++k)
            for (int j = 0; j < th2.at(k).nZ(); ++j)
                for (int ix = 0; ix < 8; ++ix)
                    worst = std::max(worst,
                                     std::fabs(th2.at(k).at(ix, j) - ref.at(k).v[j]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("corrector pair for the default scenario") {
    CorrectorSet lo = default_corrector(Side::lower);
    CorrectorSet up = default_corrector(Side::upper);

    SECTION("zero initial data and pinned rows") {
        for (double v : lo.theta1.at(0).v) CHECK(v == 0.0);
        for (double v : lo.theta2.at(0).v) CHECK(std::fabs(v) < 1e-12);
        for (int k = 0; k < lo.theta2.size(); ++k)
            for (int ix = 0; ix < lo.nx; ++ix)
                CHECK(lo.theta2.at(k).at(ix, lo.theta2.at(k).nZ() - 1) == 0.0);
    }

    SECTION("weighted report entries are finite and bounded") {
        WeightedReport rl = weighted_report(lo, {0, 1, 2, 3, 4}, {0, 1, 2});
        WeightedReport ru = weighted_report(up, {0, 1, 2, 3, 4}, {0, 1, 2});
        CHECK(rl.all_finite);
        CHECK(ru.all_finite);
        CHECK(rl.all_bounded);
        CHECK(ru.all_bounded);
        // theta1: 5 kinds x 5 weights; theta2: 5 kinds x 5 weights x 3 orders
        CHECK(rl.entries.size() == 5u * 5u + 5u * 5u * 3u);
    }

    SECTION("doubling Z_max leaves every weighted entry unchanged") {
        CorrectorSet lo40 = default_corrector(Side::lower, 16, 101, 40.0, 801);
        WeightedReport a = weighted_report(lo, {0, 1, 2, 3, 4}, {0, 1, 2});
        WeightedReport b = weighted_report(lo40, {0, 1, 2, 3, 4}, {0, 1, 2});
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            CHECK(std::fabs(a.entries[i].value - b.entries[i].value) < 1e-8);
    }
}

TEST_CASE("weighted norms of a synthetic exponential profile") {
    // theta1 = e^{-Z}, constant in time: the l = 1 in-time sup norm is the
    // closed-form integral sqrt(int (1+Z^2) e^{-2Z}) = sqrt(3/4)
    auto zg = half_grid(2001, 20.0);
    CorrectorSet c;
    c.side = Side::lower;
    c.rho_wall = 1.0;
    c.zgrid = zg;
    c.nx = 4;
    c.L = 2.0 * pi;
    for (int k = 0; k < 5; ++k) {
        double t = 0.25 * k;
        c.stamps.push_back(t);
        HalfLineField f(zg, t);
        for (int j = 0; j < f.n(); ++j) f.v[j] = std::exp(-zg->Z[j]);
        c.theta1.push(t, std::move(f));
        HalfLineField2D f2(zg, 4, c.L, t);
        c.theta2.push(t, std::move(f2));
    }
    WeightedReport r = weighted_report(c, {1}, {0});
    bool found = false;
    for (const auto& en : r.entries)
        if (en.quantity == "theta1" && en.l == 1 && en.norm_kind == "sup_weighted_l2") {
            CHECK(en.value == Approx(std::sqrt(0.75)).margin(1e-4));
            found = true;
        }
    CHECK(found);
}
