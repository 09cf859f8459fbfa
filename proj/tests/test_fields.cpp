#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "eulerlab/fields.hpp"

using namespace eulerlab;

TEST_CASE("scaling exponents follow the one-parameter family") {
    const ScalingExponents e = scaling_exponents(2.9133);
    CHECK(e.u == doctest::Approx(0.45665).epsilon(1e-12));
    CHECK(e.omega == -1.0);
    CHECK(e.psi == doctest::Approx(4.8266).epsilon(1e-12));
    CHECK(e.l == 2.9133);

    const ScalingExponents e2 = scaling_exponents(2.0);
    CHECK(e2.u == 0.0);
    CHECK(e2.omega == -1.0);
    CHECK(e2.psi == 3.0);
    CHECK(e2.l == 2.0);

    const ScalingExponents e3 = scaling_exponents(0.4);
    CHECK(e3.u == doctest::Approx(-0.8).epsilon(1e-14));
    CHECK(e3.omega == -1.0);
    CHECK(e3.psi == doctest::Approx(-0.2).epsilon(1e-13));

    CHECK_THROWS_AS(scaling_exponents(0.0), std::domain_error);
    CHECK_THROWS_AS(scaling_exponents(-1.0), std::domain_error);
}

TEST_CASE("exponent identities hold exactly on dyadic rationals") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> ticks(1, 10 << 20);
    for (int k = 0; k < 1000; ++k) {
        const double gamma = std::ldexp(static_cast<double>(ticks(rng)), -20);
        const ScalingExponents e = scaling_exponents(gamma);
        CHECK(e.omega == -1.0);
        // (gamma_psi + 1) - 2 (gamma_u + 1) = 2 gamma - gamma = gamma
        CHECK((e.psi + 1.0) - 2.0 * (e.u + 1.0) == gamma);
        CHECK(e.l == gamma);
    }
}

TEST_CASE("Constantin admissibility threshold is inclusive") {
    CHECK(constantin_admissible(2.9133));
    CHECK(constantin_admissible(0.4));
    CHECK_FALSE(constantin_admissible(0.39));
}

TEST_CASE("self-similar coordinate maps") {
    const SelfSimilarParams p(2.0, 1.0, 0.2);

    const RZPoint origin = to_selfsimilar(1.0, 0.0, p.T - 0.1, p);
    CHECK(origin.R == 0.0);
    CHECK(origin.Z == 0.0);

    const RZPoint q = to_selfsimilar(0.99, 0.01, p.T - 0.1, p);
    CHECK(q.R == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(q.Z == doctest::Approx(1.0).epsilon(1e-12));

    const RZPhysical back = from_selfsimilar(-1.0, 1.0, p.T - 0.1, p);
    CHECK(back.r == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(back.z == doctest::Approx(0.01).epsilon(1e-12));

    CHECK_THROWS_AS(to_selfsimilar(0.9, 0.0, p.T, p), std::domain_error);
    CHECK_THROWS_AS(from_selfsimilar(0.0, 0.0, p.T + 0.1, p), std::domain_error);
}

TEST_CASE("coordinate maps are mutually inverse to 1e-14") {
    const SelfSimilarParams p(2.9133, 0.8, 0.3);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ur(0.5, 0.999);
    std::uniform_real_distribution<double> uz(-0.4, 0.4);
    std::uniform_real_distribution<double> ut(0.0, 0.799);
    for (int k = 0; k < 500; ++k) {
        const double r = ur(rng), z = uz(rng), t = ut(rng);
        const RZPoint s = to_selfsimilar(r, z, t, p);
        const RZPhysical b = from_selfsimilar(s.R, s.Z, t, p);
        CHECK(std::abs(b.r - r) <= 1e-14);
        CHECK(std::abs(b.z - z) <= 1e-14 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("window membership is strict") {
    const SelfSimilarParams p(1.0, 1.0, 0.1);
    CHECK(in_window(1.0 - 0.05, 0.0, p.T - 0.05, p));
    CHECK_FALSE(in_window(1.0, 0.0, p.T - 0.05, p));
    CHECK_FALSE(in_window(1.0 - 0.05, 0.0, p.T, p));
    CHECK_FALSE(in_window(1.0 - 0.05, p.delta, p.T - 0.05, p));
    CHECK_FALSE(in_window(1.0 - p.delta, 0.0, p.T - 0.05, p));
}

TEST_CASE("grid nodes avoid the axis and the wall") {
    const GridSpec g(16, 32, 0.5);
    CHECK(g.r(0) > 0.0);
    CHECK(g.r(g.nr - 1) < 1.0);
    CHECK(g.z(0) == 0.0);
    CHECK(g.z(g.nz - 1) < g.length);
    CHECK(g.dr() == doctest::Approx(1.0 / 16));
    CHECK(g.dz() == doctest::Approx(0.5 / 32));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec(7, 32, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(16, 7, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(16, 24, 1.0), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(GridSpec(16, 32, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(16, 32, -1.0), std::invalid_argument);
}

TEST_CASE("field arithmetic requires identical grids") {
    const GridSpec a(16, 16, 1.0), b(16, 32, 1.0);
    ScalarField2D fa(a, 1.0), fb(b, 2.0);
    CHECK_THROWS_AS(fa += fb, std::invalid_argument);

    ScalarField2D fc(a, 2.0);
    fa += fc;
    CHECK(fa(3, 5) == 3.0);
    fa *= -2.0;
    CHECK(fa(0, 0) == -6.0);
    CHECK(fa.max_abs() == 6.0);
    CHECK(fa.all_finite());
}

TEST_CASE("self-similar parameter validation") {
    CHECK_THROWS_AS(SelfSimilarParams(0.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(SelfSimilarParams(1.0, -1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(SelfSimilarParams(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SelfSimilarParams(1.0, 0.5, 0.6), std::invalid_argument);
    CHECK_NOTHROW(SelfSimilarParams(2.9133, 1.0, 0.1));
}
