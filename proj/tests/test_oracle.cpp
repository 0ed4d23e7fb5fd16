#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "otelbaev/oracle.hpp"

using namespace otelbaev;
using namespace otelbaev::oracle;

TEST_CASE("propagation closed forms") {
    const auto one = PiecewiseQ::constant(1.0);
    const auto s = propagate_piecewise(one, {0.0, 1.0, 0.0}, 1.0);
    CHECK(s.y == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
    CHECK(s.yp == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
    CHECK(s.y == doctest::Approx(1.543081).epsilon(1e-6));
    const auto g = propagate_piecewise(PiecewiseQ::constant(4.0), {0.0, 1.0, 2.0}, 1.0);
    CHECK(g.y == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    const auto z = propagate_piecewise(PiecewiseQ::step(1.0, 4.0, 0.0), {0.3, 1.7, -0.2}, 0.3);
    CHECK(z.y == 1.7);
    CHECK(z.yp == -0.2);
}

TEST_CASE("propagation composes") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (const auto& q : {PiecewiseQ::step(1.0, 4.0, 0.0), PiecewiseQ::staircase(5),
                          PiecewiseQ{{-1.0, 0.0, 2.0}, {0.0, 3.0}, 1.0, 0.5}}) {
        for (int i = 0; i < 100; ++i) {
            const TransferState a{u(rng), 1.0, 0.3};
            // Monotone order: going out and back loses the decaying component to cancellation.
            double b = u(rng);
            double c = u(rng);
            if ((b - a.x) * (c - b) < 0) std::swap(b, c);
            if ((b - a.x) * (c - b) < 0) c = b + (b - a.x);
            const auto direct = propagate_piecewise(q, a, c);
            const auto twice = propagate_piecewise(q, propagate_piecewise(q, a, b), c);
            const double scale = std::max({1.0, std::abs(direct.y), std::abs(direct.yp)});
            CHECK(std::abs(direct.y - twice.y) <= 1e-12 * scale);
            CHECK(std::abs(direct.yp - twice.yp) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("rho on constants") {
    for (double q0 : {0.25, 1.0, 4.0, 9.0}) {
        const auto q = PiecewiseQ::constant(q0);
        for (double x : {-3.0, 0.0, 2.5}) CHECK(std::abs(rho_exact_piecewise(q, x) - 0.5 / std::sqrt(q0)) <= 1e-12);
    }
}

TEST_CASE("rho from ratios matches the propagated pair") {
    const auto q = PiecewiseQ::step(1.0, 4.0, 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto ref = pfss_exact_piecewise(q, 0.0);
    const double w0 = ref.v.yp * ref.u.y - ref.u.yp * ref.v.y;
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        const auto s = pfss_exact_piecewise(q, x);
        const double w = s.v.yp * s.u.y - s.u.yp * s.v.y;
        CHECK(std::abs(w / w0 - 1.0) <= 1e-10);
        CHECK(rho_exact_piecewise(q, x) == doctest::Approx(s.u.y * s.v.y / w).epsilon(1e-12));
    }
    // Far from the jump each side sees its own constant.
    CHECK(rho_exact_piecewise(q, -30.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho_exact_piecewise(q, 30.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("staircase truncation") {
    const auto q = PiecewiseQ::staircase(60);
    CHECK(q.eval(0.5) == 2.0);
    CHECK(q.eval(-0.5) == 2.0);
    CHECK(q.eval(1.5) == 2.0);
    CHECK(q.eval(4.5) == doctest::Approx(2.25));
    CHECK(q.eval(-4.5) == doctest::Approx(2.25));
    CHECK(q.eval(1e5) == doctest::Approx(std::pow(1.0 + 1.0 / 60, 60)));
    CHECK(q.integral(0.0, 2.0) == 4.0);
}

TEST_CASE("d for constants") {
    CHECK(d_exact_constant(1.0) == 1.0);
    CHECK(d_exact_constant(4.0) == 0.5);
    CHECK(d_exact_constant(0.25) == 2.0);
}

TEST_CASE("Riccati closed forms") {
    CHECK(riccati_constant_closed_form(1.0, 0.0, 0.0, 5.0).value == doctest::Approx(0.999909).epsilon(1e-6));
    const auto r = riccati_constant_closed_form(1.0, 0.0, 2.0, -2.0);
    CHECK(r.pole);
    CHECK(r.pole_x == doctest::Approx(-0.5 * std::log(3.0)).epsilon(1e-14));
    const auto fwd = riccati_constant_closed_form(1.0, 0.0, 2.0, 1.0);
    CHECK_FALSE(fwd.pole);
    CHECK(fwd.value == doctest::Approx(1.0 / std::tanh(1.0 + 0.5 * std::log(3.0))));
    CHECK(riccati_constant_closed_form(1.0, 0.0, 1.0, 7.0).value == 1.0);
    CHECK(riccati_constant_closed_form(1.0, 0.0, -1.0, -7.0).value == -1.0);
}

TEST_CASE("high precision d") {
    CHECK(high_precision_d(Potential(PotentialSpec::constant(1.0)), 3.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(high_precision_d(Potential(PotentialSpec::step(1.0, 4.0, 0.0)), 0.0) ==
          doctest::Approx(0.6324555320336759).epsilon(1e-12));
    CHECK(high_precision_d(Potential(PotentialSpec::staircase5()), 2.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}
