#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "otelbaev/error.hpp"
#include "otelbaev/oracle.hpp"
#include "otelbaev/otelbaev.hpp"

using namespace otelbaev;

namespace {

const Potential kOne(PotentialSpec::constant(1.0));
const Potential kFour(PotentialSpec::constant(4.0));
const Potential kStep(PotentialSpec::step(1.0, 4.0, 0.0));
const Potential kStair(PotentialSpec::staircase5());
const Potential kPowCos(PotentialSpec::powcos(2.0, 3.0));

}  // namespace

TEST_CASE("S examples") {
    CHECK(s_of(kOne, 0.0, 1.0) == 2.0);
    CHECK(s_of(kFour, 3.0, 0.5) == 2.0);
    CHECK(s_of(kStep, 0.0, 1.0) == 5.0);
    CHECK(s_of(kOne, 0.0, 0.0) == 0.0);
}

TEST_CASE("S is nondecreasing") {
    for (const auto* p : {&kStep, &kStair, &kPowCos}) {
        double prev = 0.0;
        for (double eta = 0.01; eta < 3.0; eta += 0.01) {
            const double s = s_of(*p, 7.3, eta);
            CHECK(s >= prev);
            prev = s;
        }
    }
}

TEST_CASE("d examples") {
    CHECK(solve_d(kOne, 12.5).d == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(solve_d(kFour, -3.0).d == doctest::Approx(0.5).epsilon(1e-10));
    const auto s = solve_d(kStep, 0.0);
    CHECK(s.d == doctest::Approx(std::sqrt(0.4)).epsilon(1e-10));
    CHECK(std::abs(s.residual) <= 1e-10);
    CHECK(s.d > 0);
}

TEST_CASE("d_hat examples") {
    const auto a = solve_d_hat(kOne, 0.0);
    CHECK(a.d_hat == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.d_hat_prime == doctest::Approx(0.0));
    for (double c : {0.5, 2.0, 3.0}) {
        const Potential p(PotentialSpec::constant(c * c));
        CHECK(solve_d_hat(p, 1.7).d_hat == doctest::Approx(1.0 / c).epsilon(1e-10));
    }
    const auto st = solve_d_hat(kStep, 0.0);
    CHECK(st.d_hat == doctest::Approx(std::sqrt(0.4)).epsilon(1e-10));
    CHECK(st.d_hat_prime == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(std::abs(st.residual) <= 1e-10);
}

TEST_CASE("sup_d examples") {
    CHECK(sup_d(kOne, -5.0, 5.0, 11) == doctest::Approx(1.0).epsilon(1e-10));
    const double st = sup_d(kStair, -50.0, 50.0, 101);
    CHECK(st >= 1.0 / std::sqrt(3.0));
    CHECK(st <= 1.0 / std::sqrt(2.0) + 1e-12);
    const double pc = sup_d(kPowCos, 50.0, 60.0, 11);
    CHECK(pc >= 0.9 / 60.0);
    CHECK(pc <= 1.1 / 50.0);
    CHECK_THROWS_AS(sup_d(kOne, 0.0, 1.0, 1), InvalidParams);
}

TEST_CASE("bracket failure on a vanishing potential") {
    const Potential zero(PotentialSpec::constant(0.0));
    CHECK_THROWS_AS(solve_d(zero, 0.0), BracketFailure);
    CHECK_THROWS_AS(solve_d(kOne, NAN), NonFiniteInput);
}

TEST_CASE("uniqueness: different seeds give the same d") {
    const double tol = 1e-10;
    for (const auto* p : {&kStep, &kStair, &kPowCos}) {
        for (double x : {-7.0, 0.3, 12.0, 55.0}) {
            const double d0 = solve_d(*p, x, tol).d;
            for (double seed : {1e-4, 0.37, 20.0}) {
                CHECK(std::abs(solve_d(*p, x, tol, seed).d - d0) <= 10 * tol * d0);
            }
        }
    }
}

TEST_CASE("monotone criterion for d") {
    const double tol = 1e-10;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ux(-30.0, 30.0);
    std::uniform_real_distribution<double> ue(0.0, 3.0);
    for (const auto* p : {&kStep, &kStair, &kPowCos}) {
        for (int i = 0; i < 200; ++i) {
            const double x = ux(rng);
            const double d = solve_d(*p, x, tol).d;
            const double eta = ue(rng) * d;
            const double s = s_of(*p, x, eta);
            if (eta >= d) CHECK(s >= 2.0 - 10 * tol);
            else CHECK(s <= 2.0 + 10 * tol);
        }
    }
}

TEST_CASE("d and d_hat relations") {
    const double tol = 1e-10;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(-40.0, 40.0);
    for (const auto* p : {&kOne, &kStep, &kStair, &kPowCos}) {
        for (int i = 0; i < 60; ++i) {
            const double x = ux(rng);
            const double d = solve_d(*p, x, tol).d;
            const auto h = solve_d_hat(*p, x, tol);
            CHECK(std::abs(h.residual) <= tol);
            CHECK(2 * h.d_hat - d >= -10 * tol);
            CHECK(3 * d - 2 * h.d_hat >= -10 * tol);
            CHECK(h.d_hat * p->integrate(x - h.d_hat, x + h.d_hat) >= 1.0 - 10 * tol);
            const double anti = p->integrate(x, x + h.d_hat) - p->integrate(x - h.d_hat, x);
            CHECK(std::abs(h.d_hat_prime) <= h.d_hat * std::abs(anti) + 10 * tol);
        }
    }
}

TEST_CASE("d_hat derivative against finite differences") {
    const double tol = 1e-12;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ux(-40.0, 40.0);
    int checked = 0;
    for (const auto* p : {&kStep, &kStair, &kPowCos}) {
        for (int i = 0; i < 40; ++i) {
            const double x = ux(rng);
            const auto h = solve_d_hat(*p, x, tol);
            const double step = 1e-5 * h.d_hat;
            // Skip when a jump of q sits near either end of the window.
            const double lo = x - h.d_hat;
            const double hi = x + h.d_hat;
            const double guard = 4 * step + 1e-3 * h.d_hat;
            if (!p->breakpoints(lo - guard, lo + guard).empty() || !p->breakpoints(hi - guard, hi + guard).empty())
                continue;
            const double fd =
                (solve_d_hat(*p, x + step, tol).d_hat - solve_d_hat(*p, x - step, tol).d_hat) / (2 * step);
            CHECK(std::abs(fd - h.d_hat_prime) <= 1e-3 * std::max(std::abs(h.d_hat_prime), 1e-3));
            ++checked;
        }
    }
    CHECK(checked > 30);
}

TEST_CASE("x - d(x) grows") {
    for (const auto* p : {&kStair, &kPowCos}) {
        double prev = -INFINITY;
        for (double x : {10.0, 20.0, 40.0, 80.0}) {
            const double v = x - solve_d(*p, x).d;
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("solve_d agrees with the independent bisection") {
    std::mt19937_64 rng(12);
    for (const auto* p : {&kOne, &kStep, &kStair, &kPowCos}) {
        std::uniform_real_distribution<double> ux(p == &kPowCos ? 2.0 : -50.0, p == &kPowCos ? 120.0 : 50.0);
        for (int i = 0; i < 50; ++i) {
            const double x = ux(rng);
            const double d = solve_d(*p, x).d;
            const double ref = oracle::high_precision_d(*p, x);
            CHECK(std::abs(d / ref - 1.0) <= 1e-9);
        }
    }
}
