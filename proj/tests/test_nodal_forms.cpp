#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "spectral_plane/errors.hpp"
#include "spectral_plane/nodal_forms.hpp"

using namespace spectral_plane;
using testing::make_config;

namespace {
const double pi = std::numbers::pi;
const double k_mod = constants::period_modulus();
const double a = constants::a();
}

TEST_CASE("period plane on the nodal locus") {
    const PeriodPlane p1 = uv_origin(make_config({pi / 6.0}));
    CHECK(std::abs(p1.u[0]) < 1e-16);
    CHECK(p1.v[0] == doctest::Approx(k_mod).epsilon(1e-14));
    CHECK(p1.v[0] == doctest::Approx(0.27566444771089598).epsilon(1e-12));

    const PeriodPlane p2 = uv_origin(make_config({pi / 3.0}));
    CHECK(p2.u[0] == doctest::Approx(k_mod * 0.5).epsilon(1e-14));
    CHECK(p2.v[0] == doctest::Approx(k_mod * std::sqrt(3.0) / 2.0).epsilon(1e-14));

    // Virtual slots: angle 0 gives (-1/2, sqrt(3)/2) times the modulus, angle
    // 2pi/3 gives (1, 0).
    CHECK(p2.u[1] == doctest::Approx(-0.5 * k_mod).epsilon(1e-14));
    CHECK(p2.v[1] == doctest::Approx(k_mod * std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(p2.u[2] == doctest::Approx(k_mod).epsilon(1e-14));
    CHECK(std::abs(p2.v[2]) < 1e-16);
}

TEST_CASE("modulus law at t = 0") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto theta = testing::random_theta(rng, 4);
        const PeriodPlane p = uv_origin(make_config(theta));
        for (int m = 0; m < 6; ++m)
            CHECK(std::hypot(p.u[m], p.v[m]) == doctest::Approx(k_mod).epsilon(1e-14));
    }
}

TEST_CASE("node pair closed forms") {
    const NodePair at_third = node_pair(pi / 3.0);
    CHECK(at_third.xi1.real() == doctest::Approx(-a).epsilon(1e-14));
    CHECK(at_third.xi2.real() == doctest::Approx(2.0 * a).epsilon(1e-14));
    CHECK(std::abs(at_third.eta1) < 1e-15);
    CHECK(at_third.eta2.imag() ==
          doctest::Approx(-2.0 * std::sqrt(3.0) * a * a).epsilon(1e-14));
    CHECK(std::abs(at_third.eta2.real()) < 1e-15);

    const NodePair at_sixth = node_pair(pi / 6.0);
    CHECK(at_sixth.xi1.real() == doctest::Approx(a * (1.0 - std::sqrt(3.0))).epsilon(1e-14));
    CHECK(at_sixth.xi2.real() == doctest::Approx(a).epsilon(1e-14));

    CHECK_THROWS_AS(node_pair(0.0), SingularPair);
}

TEST_CASE("node pair invariants on a grid") {
    for (int i = 1; i < 100; ++i) {
        const double gap = -2.0 * pi / 3.0 + 4.0 * pi / 3.0 * i / 100.0;
        if (std::abs(gap) < 0.05) continue;
        const NodePair p = node_pair(gap);
        const double xi1 = p.xi1.real();
        const double xi2 = p.xi2.real();
        // Product identity.
        const double expected =
            2.0 * a * a * (2.0 * std::cos(gap) + 1.0) * (std::cos(gap) - 1.0);
        CHECK(xi1 * xi2 == doctest::Approx(expected).epsilon(1e-12));
        // Curve membership y^2 = x^2 (x - 3a)(x + a).
        for (auto [xi, eta] : {std::pair{p.xi1, p.eta1}, std::pair{p.xi2, p.eta2}}) {
            const complexd lhs = eta * eta;
            const complexd rhs = xi * xi * (xi - 3.0 * a) * (xi + a);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
        // eta2/xi2^2 - eta1/xi1^2 = -sqrt(3) i / (2 cos(gap) + 1).
        const complexd lhs = p.eta2 / (p.xi2 * p.xi2) - p.eta1 / (p.xi1 * p.xi1);
        const complexd rhs = complexd(0.0, -std::sqrt(3.0) / (2.0 * std::cos(gap) + 1.0));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("coupling values and parity") {
    const PairCoupling at_third = pair_coupling(pi / 3.0);
    CHECK(at_third.odd == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(at_third.even == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));

    const PairCoupling at_minus_third = pair_coupling(-pi / 3.0);
    CHECK(at_minus_third.odd == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(at_minus_third.even == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));

    // Exact value 3 + 2 sqrt(3) at pi/6.
    CHECK(pair_coupling(pi / 6.0).even ==
          doctest::Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-13));

    for (int i = 1; i < 60; ++i) {
        const double gap = 0.01 + (2.0 * pi / 3.0 - 0.02) * i / 60.0;
        const PairCoupling plus = pair_coupling(gap);
        const PairCoupling minus = pair_coupling(-gap);
        CHECK(plus.odd == doctest::Approx(-minus.odd).epsilon(1e-12));
        CHECK(plus.even == doctest::Approx(minus.even).epsilon(1e-12));
    }
}

TEST_CASE("analytic jacobian structure") {
    const BranchConfig cfg = make_config({pi / 6.0});
    const DerivativeTable table = analytic_jacobian(cfg);
    // phi = 2pi/3 - pi/6 = pi/2.
    CHECK(table.du_dtheta(0, 0) == doctest::Approx(k_mod).epsilon(1e-14));
    CHECK(std::abs(table.du_dt(0, 0)) < 1e-16);
    CHECK(table.dv_dt(0, 0) == doctest::Approx(-k_mod / a).epsilon(1e-14));
    CHECK(std::abs(table.dv_dtheta(0, 0)) < 1e-16);
    // Virtual rows of the theta-tables vanish.
    for (int m = 1; m < 3; ++m) {
        CHECK(table.du_dtheta(m, 0) == 0.0);
        CHECK(table.dv_dtheta(m, 0) == 0.0);
        CHECK(table.du_dt(m, 0) != 0.0);
    }

    const BranchConfig cfg3 = make_config({0.4, 0.9, 1.6});
    const DerivativeTable t3 = analytic_jacobian(cfg3);
    for (int m = 0; m < 3; ++m) {
        for (int j = 0; j < 3; ++j) {
            if (m == j) continue;
            CHECK(t3.du_dtheta(m, j) == 0.0);
            CHECK(t3.dv_dtheta(m, j) == 0.0);
        }
    }
}
