// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "layerlab/norms.hpp"
#include "helpers.hpp"

using namespace layerlab;
using layerlab::testing::uniform_channel;
using Catch::Approx;

TEST_CASE("l2_norm basics") {
    auto g = uniform_channel(8, 65, 2.0 * pi);

    Field2D zero(g);
    CHECK(l2_norm(zero) == 0.0);

    Field2D one(g);
    for (auto& v : one.v) v = 1.0;
    CHECK(l2_norm(one) == Approx(std::sqrt(2.0 * pi)).epsilon(1e-13));

    // sin(2 pi z) on [0,1]: integral of sin^2 is 1/2
    auto fine = uniform_channel(4, 2001, 1.0);
    Field1D s = testing::sample1d(fine, [](double z) { return std::sin(2.0 * pi * z); });
    CHECK(l2_norm(s) == Approx(1.0 / std::sqrt(2.0)).margin(1e-5));

    // second-order quadrature on a non-periodic integrand: ||e^z||^2 = (e^2-1)/2
    const double ez = std::sqrt((std::exp(2.0) - 1.0) / 2.0);
    auto coarse = uniform_channel(4, 26, 1.0);
    auto finer = uniform_channel(4, 101, 1.0);
    Field1D ec = testing::sample1d(coarse, [](double z) { return std::exp(z); });
    Field1D ef = testing::sample1d(finer, [](double z) { return std::exp(z); });
    double err_coarse = std::fabs(l2_norm(ec) - ez);
    double err_fine = std::fabs(l2_norm(ef) - ez);
    CHECK(err_coarse > 10.0 * err_fine);  // (100/25)^2 = 16 expected
}

TEST_CASE("h1_norm basics") {
    auto g = uniform_channel(512, 129, 2.0 * pi);

    Field2D zero(g);
    CHECK(h1_norm(zero) == 0.0);

    Field2D c(g);
    for (auto& v : c.v) v = -2.5;
    CHECK(h1_norm(c) == Approx(2.5 * std::sqrt(2.0 * pi)).epsilon(1e-13));

    Field2D s = testing::sample2d(g, [](double x, double) { return std::sin(x); });
    CHECK(h1_norm(s) == Approx(std::sqrt(2.0 * pi)).epsilon(1e-4));
}

TEST_CASE("linf_norm basics") {
    auto g = uniform_channel(8, 17, 1.0);
    Field2D f(g);
    CHECK(linf_norm(f) == 0.0);
    for (auto& v : f.v) v = 0.25;
    CHECK(linf_norm(f) == 0.25);
    f.at(3, 5) = -3.0;
    CHECK(linf_norm(f) == 3.0);
}

TEST_CASE("weighted_l2 on the half line") {
    auto zg = std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(20001, 20.0));
    HalfLineField zero(zg);
    CHECK(weighted_l2(zero, 3) == 0.0);

    HalfLineField f(zg);
    for (int j = 0; j < f.n(); ++j) f.v[j] = std::exp(-zg->Z[j]);
    // int_0^inf (1+Z^2) e^{-2Z} dZ = 1/2 + 1/4 = 3/4
    CHECK(weighted_l2(f, 1) == Approx(std::sqrt(0.75)).margin(2e-6));

    SECTION("l = 0 equals the plain norm bit for bit") {
        HalfLineField r(zg);
        layerlab::testing::fill_random(r, 42u);
        CHECK(weighted_l2(r, 0) == l2_norm(r));
    }

    SECTION("truncation insensitivity of the Gaussian-decay profile") {
        auto zg40 = std::make_shared<HalfLineGrid>(HalfLineGrid::uniform(40001, 40.0));
        HalfLineField f40(zg40);
        for (int j = 0; j < f40.n(); ++j) f40.v[j] = std::exp(-zg40->Z[j]);
        CHECK(std::fabs(weighted_l2(f40, 1) - weighted_l2(f, 1)) < 1e-12);
    }
}

TEST_CASE("interior restriction") {
    auto g = uniform_channel(4, 9, 1.0);
    Field2D f = testing::sample2d(g, [](double, double z) { return z; });

    Field2D r = interior_restrict(f, 0.25);
    REQUIRE(r.nz() == 5);
    CHECK(r.grid->z.front() == Approx(0.25));
    CHECK(r.grid->z.back() == Approx(0.75));

    Field2D r2 = interior_restrict(f, 1e-6);
    CHECK(r2.nz() == 7);  // all interior nodes

    auto g8 = uniform_channel(4, 8, 1.0);
    Field2D f8 = testing::sample2d(g8, [](double, double z) { return z; });
    CHECK_THROWS_AS(interior_restrict(f8, 0.49), DomainError);

    SECTION("restricted l2 is monotone nonincreasing in delta") {
        auto gg = uniform_channel(8, 65, 1.0);
        Field2D rf(gg);
        layerlab::testing::fill_random(rf, 7u);
        double prev = l2_norm(interior_restrict(rf, 0.05));
        for (double d : {0.1, 0.2, 0.3, 0.4}) {
            double cur = l2_norm(interior_restrict(rf, d));
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("anisotropic interpolation inequality check") {
    auto g = uniform_channel(16, 129, 1.0);
    Field2D zero(g);
    auto r0 = anisotropic_sobolev_check(zero);
    CHECK(r0.lhs == 0.0);
    CHECK(r0.rhs == 0.0);
    CHECK(r0.ratio == 0.0);

    // x-independent sin(pi z): closed-form norms give rhs = sqrt(pi/2)
    Field2D s = testing::sample2d(g, [](double, double z) { return std::sin(pi * z); });
    auto r = anisotropic_sobolev_check(s);
    CHECK(r.lhs == Approx(1.0).epsilon(1e-12));
    CHECK(r.rhs == Approx(std::sqrt(pi / 2.0)).epsilon(2e-3));
    CHECK(r.ratio == Approx(1.0 / std::sqrt(pi / 2.0)).epsilon(2e-3));

    Field2D bad(g);
    for (auto& v : bad.v) v = 1.0;
    CHECK_THROWS_AS(anisotropic_sobolev_check(bad), DomainError);
}

TEST_CASE("norm properties") {
    auto g = uniform_channel(16, 33, 2.0);

    SECTION("absolute homogeneity") {
        Field2D f(g);
        layerlab::testing::fill_random(f, 11u);
        for (double c : {-3.0, 0.5, 7.25}) {
            Field2D cf = f;
            for (auto& v : cf.v) v *= c;
            CHECK(l2_norm(cf) == Approx(std::fabs(c) * l2_norm(f)).epsilon(1e-13));
            CHECK(h1_norm(cf) == Approx(std::fabs(c) * h1_norm(f)).epsilon(1e-13));
            CHECK(linf_norm(cf) == Approx(std::fabs(c) * linf_norm(f)).epsilon(1e-13));
        }
    }

    SECTION("triangle inequality") {
        for (unsigned seed = 0; seed < 8; ++seed) {
            Field2D a(g), b(g);
            layerlab::testing::fill_random(a, 100u + seed);
            layerlab::testing::fill_random(b, 200u + seed);
            Field2D sum = a;
            for (std::size_t p = 0; p < sum.v.size(); ++p) sum.v[p] += b.v[p];
            CHECK(l2_norm(sum) <= l2_norm(a) + l2_norm(b) + 1e-12);
            CHECK(h1_norm(sum) <= h1_norm(a) + h1_norm(b) + 1e-12);
        }
    }
}

TEST_CASE("grid construction guards") {
    CHECK_THROWS_AS(Grid2D::channel(2, uniform_nodes(17, 0.0, 1.0), 1.0), DomainError);
    CHECK_THROWS_AS(Grid2D::channel(8, uniform_nodes(4, 0.0, 1.0), 1.0), DomainError);
    CHECK_THROWS_AS(Grid2D::channel(8, uniform_nodes(17, 0.0, 0.9), 1.0), DomainError);
    CHECK_THROWS_AS(HalfLineGrid::uniform(101, 5.0), DomainError);

    SECTION("tanh grading resolves the requested wall spacing") {
        double gamma = pick_tanh_gamma(257, 1e-4);
        auto nodes = tanh_graded_nodes(257, gamma);
        CHECK(nodes[1] - nodes[0] <= 1e-4);
        CHECK(nodes.front() == 0.0);
        CHECK(nodes.back() == 1.0);
        for (std::size_t j = 1; j < nodes.size(); ++j) CHECK(nodes[j] > nodes[j - 1]);
    }
}
