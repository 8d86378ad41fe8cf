// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "layerlab/euler.hpp"
#include "layerlab/scenario.hpp"
#include "helpers.hpp"

using namespace layerlab;
using layerlab::testing::uniform_channel;
using Catch::Approx;

TEST_CASE("default scenario satisfies the structural hypotheses") {
    Scenario s = make_scenario("default", {});
    ValidationReport r = validate_scenario(s);
    CHECK(r.density_ok);
    CHECK(r.zero_order_ok);
    CHECK(r.periodicity_ok);
    CHECK(r.ok());
    for (int si = 0; si < 2; ++si) {
        CHECK(r.first_order_residual[si] == Approx(0.0).margin(1e-10));
        CHECK(r.eps_defect_a[si] == Approx(0.0).margin(1e-10));
        CHECK(r.eps_defect_b[si] == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("zero-order mismatch is detected") {
    // beta1 jumps to 1 at t=0 while a(0) = 0
    Scenario s = make_scenario("zero", {});
    s.beta1_lower.v = [](double) { return 1.0; };
    ValidationReport r = validate_scenario(s);
    CHECK_FALSE(r.zero_order_ok);
    CHECK(r.zero_order_residual[0][0] == Approx(1.0));
}

TEST_CASE("density floor violation is detected") {
    Scenario s = make_scenario("zero", {});
    s.rho0.v = [](double z) { return z; };  // rho0(0) = 0 < c0
    ValidationReport r = validate_scenario(s);
    CHECK_FALSE(r.density_ok);
    CHECK_FALSE(r.ok());
}

TEST_CASE("evaluation failure identifies the function") {
    Scenario s = make_scenario("zero", {});
    s.b.v = [](double, double) -> double { throw std::runtime_error("boom"); };
    try {
        validate_scenario(s);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
}

TEST_CASE("validation is deterministic") {
    Scenario s = make_scenario("default", {});
    ValidationReport a = validate_scenario(s, 1e-10);
    ValidationReport b = validate_scenario(s, 1e-10);
    CHECK(a.density_min == b.density_min);
    for (int si = 0; si < 2; ++si) {
        CHECK(a.zero_order_residual[si][0] == b.zero_order_residual[si][0]);
        CHECK(a.zero_order_residual[si][1] == b.zero_order_residual[si][1]);
        CHECK(a.first_order_residual[si] == b.first_order_residual[si]);
    }
}

TEST_CASE("boundary mismatch traces") {
    SECTION("beta identical to the euler trace gives zero mismatch") {
        // zero scenario: u^0 = 0 and beta = 0
        Scenario s = make_scenario("zero", {});
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 33);
        auto m = boundary_mismatch(s, e, Side::lower);
        for (double t : {0.0, 0.25, 0.5, 1.0}) {
            CHECK(m.g1(t) == 0.0);
            CHECK(m.g2(t, 1.0) == 0.0);
        }
    }

    SECTION("f = 0, a = 0: g1 equals the boundary data itself") {
        Scenario s = make_scenario("zero", {});
        s.beta1_lower.v = [](double t) { return 1.0 - std::cos(t); };
        s.beta1_lower.dt = [](double t) { return std::sin(t); };
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 33);
        auto m = boundary_mismatch(s, e, Side::lower);
        for (double t : {0.0, 0.3, 0.7, 1.0})
            CHECK(m.g1(t) == Approx(1.0 - std::cos(t)).margin(1e-14));
    }

    SECTION("zero-order compatible scenario has vanishing traces at t = 0") {
        Scenario s = make_scenario("default", {});
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 33);
        for (Side side : {Side::lower, Side::upper}) {
            auto m = boundary_mismatch(s, e, side);
            CHECK(std::fabs(m.g1(0.0)) < 1e-12);
            for (int i = 0; i < 8; ++i)
                CHECK(std::fabs(m.g2(0.0, s.L * i / 8.0)) < 1e-12);
        }
    }

    SECTION("horizon mismatch is rejected") {
        Scenario s = make_scenario("default", {});
        auto grid = uniform_channel(8, 17, s.L);
        EulerSolution e = solve_euler(s, grid, 33);
        Scenario longer = s;
        longer.T = 2.0;
        CHECK_THROWS_AS(boundary_mismatch(longer, e, Side::lower), DomainError);
    }
}

TEST_CASE("catalog guards") {
    CHECK_THROWS_AS(make_scenario("no_such_catalog", {}), ConfigError);

    // residual_linear is zero-order compatible by construction
    Scenario s = make_scenario("residual_linear", {});
    ValidationReport r = validate_scenario(s);
    CHECK(r.zero_order_ok);
    CHECK(r.density_ok);
    for (int si = 0; si < 2; ++si)
        CHECK(r.first_order_residual[si] == Approx(0.0).margin(1e-10));
}
