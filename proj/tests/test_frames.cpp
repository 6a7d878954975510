#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hac/frames.hpp"

using namespace hac;
using Catch::Approx;

TEST_CASE("clarke of balanced set at angle zero", "[frames]") {
    const auto ab = abc_to_alphabeta({1.0, -0.5, -0.5});
    CHECK(ab.alpha == Approx(1.0));
    CHECK(ab.beta == Approx(0.0).margin(1e-15));
}

TEST_CASE("clarke of zero input", "[frames]") {
    const auto ab = abc_to_alphabeta({0.0, 0.0, 0.0});
    CHECK(ab.alpha == 0.0);
    CHECK(ab.beta == 0.0);
}

TEST_CASE("clarke matches direct matrix multiply", "[frames]") {
    // Hand-evaluated 2x3 Clarke on (0.3, -0.9, 0.6):
    //   alpha = (2/3)(0.3 + 0.45 - 0.3)            = 0.3
    //   beta  = (2/3)(sqrt(3)/2)(-0.9 - 0.6)       = -sqrt(3)/2
    const auto ab = abc_to_alphabeta({0.3, -0.9, 0.6});
    CHECK(ab.alpha == Approx(0.3).epsilon(1e-14));
    CHECK(ab.beta == Approx(-std::numbers::sqrt3 / 2.0).epsilon(1e-14));
}

TEST_CASE("park rotation basics", "[frames]") {
    const auto dq0 = alphabeta_to_dq({1.0, 0.0}, 0.0);
    CHECK(dq0.d == Approx(1.0));
    CHECK(dq0.q == Approx(0.0).margin(1e-15));

    const auto dq90 = alphabeta_to_dq({1.0, 0.0}, std::numbers::pi / 2.0);
    CHECK(dq90.d == Approx(0.0).margin(1e-15));
    CHECK(dq90.q == Approx(-1.0));
}

TEST_CASE("park composes like a rotation", "[frames]") {
    const TwoAxis x{0.6, 0.8};
    const double th1 = 0.3, th2 = 0.9;
    const auto once = alphabeta_to_dq(x, th1 + th2);
    // rotate by th1, re-embed, rotate by th2
    const auto first = alphabeta_to_dq(x, th1);
    const auto twice = alphabeta_to_dq({first.d, first.q}, th2);
    CHECK(twice.d == Approx(once.d).epsilon(1e-13));
    CHECK(twice.q == Approx(once.q).epsilon(1e-13));
}

TEST_CASE("dq to abc inverse examples", "[frames]") {
    const auto abc = dq_to_abc({1.0, 0.0}, 0.0);
    CHECK(abc.a == Approx(1.0));
    CHECK(abc.b == Approx(-0.5));
    CHECK(abc.c == Approx(-0.5));

    const auto zero = dq_to_abc({0.0, 0.0}, 1.234);
    CHECK(zero.a == 0.0);
    CHECK(zero.b == 0.0);
    CHECK(zero.c == 0.0);
}

TEST_CASE("round trip abc->dq->abc is identity on balanced signals", "[frames][property]") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> mag(0.1, 500.0);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int it = 0; it < 200; ++it) {
        const double m = mag(rng);
        const double phase = ang(rng);
        const double theta = ang(rng);
        const ThreePhase x = balanced_abc(m, phase);
        const ThreePhase back = dq_to_abc(abc_to_dq(x, theta), theta);
        CHECK(std::abs(back.a - x.a) < 1e-12 * m);
        CHECK(std::abs(back.b - x.b) < 1e-12 * m);
        CHECK(std::abs(back.c - x.c) < 1e-12 * m);
    }
}

TEST_CASE("rotation preserves magnitude", "[frames][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> comp(-300.0, 300.0);
    std::uniform_real_distribution<double> ang(-20.0, 20.0);
    for (int it = 0; it < 200; ++it) {
        const TwoAxis x{comp(rng), comp(rng)};
        const double theta = ang(rng);
        const auto dq = alphabeta_to_dq(x, theta);
        const double m_ab = magnitude(x);
        const double m_dq = magnitude(dq);
        CHECK(std::abs(m_dq - m_ab) <= 1e-12 * std::max(1.0, m_ab));
    }
}

TEST_CASE("balanced sinusoidal triple traces a circle of the phase amplitude",
          "[frames][property]") {
    const double m = 326.59;
    for (int k = 0; k < 360; k += 7) {
        const double theta = k * std::numbers::pi / 180.0;
        const auto ab = abc_to_alphabeta(balanced_abc(m, theta));
        CHECK(magnitude(ab) == Approx(m).epsilon(1e-12));
        CHECK(ab.alpha == Approx(m * std::cos(theta)).margin(1e-9));
        CHECK(ab.beta == Approx(m * std::sin(theta)).margin(1e-9));
    }
}

TEST_CASE("wrap_to_pi", "[frames]") {
    CHECK(wrap_to_pi(0.0) == 0.0);
    CHECK(wrap_to_pi(3.0 * std::numbers::pi) == Approx(std::numbers::pi));
    CHECK(wrap_to_pi(-3.0 * std::numbers::pi) == Approx(std::numbers::pi));
    CHECK(wrap_to_pi(two_pi + 0.25) == Approx(0.25));
}

TEST_CASE("per-unit base validation and derived members", "[frames]") {
    PerUnitBase b{500e3, 60.0, 326.59};
    b.validate();
    CHECK(b.i_base() == Approx((2.0 / 3.0) * 500e3 / 326.59));
    CHECK(b.omega_b() == Approx(two_pi * 60.0));
    CHECK_THROWS_AS((PerUnitBase{0.0, 60.0, 326.59}.validate()), ConfigError);
    CHECK_THROWS_AS((PerUnitBase{500e3, -1.0, 326.59}.validate()), ConfigError);
}
