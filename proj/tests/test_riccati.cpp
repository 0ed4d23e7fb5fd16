#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "otelbaev/error.hpp"
#include "otelbaev/oracle.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/riccati.hpp"

using namespace otelbaev;

namespace {

const Potential kOne(PotentialSpec::constant(1.0));
const Potential kStep(PotentialSpec::step(1.0, 4.0, 0.0));
const Potential kStair(PotentialSpec::staircase5());

double max_dev_closed_form(const RiccatiTrajectory& t, double x0, double y0) {
    double worst = 0.0;
    for (std::size_t i = 0; i < t.xs.size(); ++i) {
        const auto ref = oracle::riccati_constant_closed_form(1.0, x0, y0, t.xs[i]);
        worst = std::max(worst, std::abs(t.ys[i] - ref.value));
    }
    return worst;
}

}  // namespace

TEST_CASE("closed forms for q = 1") {
    const auto th = integrate_riccati(kOne, 0.0, 0.0, Direction::forward, 5.0);
    CHECK_FALSE(th.blowup);
    CHECK(th.xs.back() == 5.0);
    CHECK(th.ys.back() == doctest::Approx(0.999909).epsilon(1e-6));
    CHECK(max_dev_closed_form(th, 0.0, 0.0) <= 1e-6);

    const auto ct = integrate_riccati(kOne, 0.0, 2.0, Direction::forward, 5.0);
    CHECK_FALSE(ct.blowup);
    CHECK(max_dev_closed_form(ct, 0.0, 2.0) <= 1e-6);

    const auto eq = integrate_riccati(kOne, 0.0, -1.0, Direction::forward, 3.0);
    for (double y : eq.ys) CHECK(std::abs(y + 1.0) <= 1e-6);

    const auto pole = integrate_riccati(kOne, 0.0, 2.0, Direction::backward, 2.0);
    REQUIRE(pole.blowup);
    CHECK(pole.sign == 1);
    CHECK(std::abs(pole.x_star + 0.5 * std::log(3.0)) <= 1e-3);
    CHECK(std::abs(pole.ys.back()) >= 1e8);
    for (std::size_t i = 1; i < pole.xs.size(); ++i) CHECK(pole.xs[i] < pole.xs[i - 1]);
}

TEST_CASE("pole location across seeds") {
    for (double y0 : {1.5, -1.5, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0, 100.0, -100.0}) {
        const auto dir = y0 > 0 ? Direction::backward : Direction::forward;
        const auto t = integrate_riccati(kOne, 0.0, y0, dir, 3.0);
        REQUIRE(t.blowup);
        const double ref = oracle::riccati_constant_closed_form(1.0, 0.0, y0, 0.0).pole_x;
        CHECK(std::abs(t.x_star - ref) <= 1e-3);
        CHECK(t.sign == (y0 > 0 ? 1 : -1));
    }
}

TEST_CASE("classification on q = 1") {
    struct Expect {
        double y0;
        ForwardClass f;
        BackwardClass b;
    };
    const Expect cases[] = {{-2.0, ForwardClass::blows_up, BackwardClass::tends_minus},
                            {-1.0, ForwardClass::is_y1, BackwardClass::tends_minus},
                            {0.0, ForwardClass::tends_plus, BackwardClass::tends_minus},
                            {0.5, ForwardClass::tends_plus, BackwardClass::tends_minus},
                            {1.0, ForwardClass::tends_plus, BackwardClass::is_y2},
                            {2.0, ForwardClass::tends_plus, BackwardClass::blows_up}};
    for (const auto& e : cases) {
        const auto c = classify_riccati(kOne, 0.0, e.y0);
        CHECK(c.forward == e.f);
        CHECK(c.backward == e.b);
        CHECK(c.exact_seed == (e.y0 == 1.0 || e.y0 == -1.0));
        if (e.f == ForwardClass::tends_plus) CHECK(std::abs(c.forward_yd - 1.0) <= 0.05);
        if (e.f == ForwardClass::is_y1) CHECK(std::abs(c.forward_yd + 1.0) <= 1e-6);
        if (e.f == ForwardClass::blows_up) CHECK(std::isfinite(c.forward_x_star));
        if (e.b == BackwardClass::tends_minus) CHECK(std::abs(c.backward_yd + 1.0) <= 0.05);
        if (e.b == BackwardClass::blows_up)
            CHECK(std::abs(c.backward_x_star + 0.5 * std::log(3.0)) <= 1e-3);
    }
    CHECK(std::string(to_string(ForwardClass::is_y1)) == "is_y1");
    CHECK(std::string(to_string(BackwardClass::blows_up)) == "blows_up");
}

TEST_CASE("corridor is preserved") {
    const auto prof = extremal_solutions(kStep, -3.0, 3.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double x0 = -2.5;
        const double lo = prof.y1_at(x0);
        const double hi = prof.y2_at(x0);
        const double y0 = lo + (hi - lo) * (0.01 + 0.98 * u(rng));
        const auto t = integrate_riccati(kStep, x0, y0, Direction::forward, 5.0);
        CHECK_FALSE(t.blowup);
        int outside = 0;
        for (std::size_t i = 0; i < t.xs.size(); ++i) {
            if (t.ys[i] <= prof.y1_at(t.xs[i]) - 1e-7 || t.ys[i] >= prof.y2_at(t.xs[i]) + 1e-7) ++outside;
        }
        CHECK(outside == 0);
    }
}

TEST_CASE("evidence agrees with the corridor test") {
    for (double x0 : {3.0, 20.0, 50.0}) {
        for (double y0 : {-1.0, -0.3, 0.0, 0.7, 1.4, 3.0}) {
            const auto c = classify_riccati(kStair, x0, y0);
            if (std::abs(y0 - c.y1_at_x0) <= 1e-3) continue;
            if (c.forward == ForwardClass::tends_plus) CHECK(std::abs(c.forward_yd - 1.0) <= 0.05);
            else CHECK(std::isfinite(c.forward_x_star));
            if (c.backward == BackwardClass::tends_minus) CHECK(std::abs(c.backward_yd + 1.0) <= 0.05);
            else CHECK(std::isfinite(c.backward_x_star));
        }
    }
}

TEST_CASE("general solution from the fundamental system") {
    const auto one = rho_profile(kOne, -3.0, 3.0);
    const Pfss pf = reconstruct_pfss(one, 0.0, -2.0, 2.0);
    CHECK(general_solution_eval(1.0, 1.0, pf, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(general_solution_eval(1.0, 0.0, pf, 0.7) == doctest::Approx(one.y2_at(0.7)).epsilon(1e-12));
    CHECK(general_solution_eval(0.0, 2.0, pf, 0.7) == doctest::Approx(one.y1_at(0.7)).epsilon(1e-12));
    CHECK(general_solution_eval(1.0, 1.0, pf, 1.2) == doctest::Approx(std::tanh(1.2)).epsilon(1e-7));
    CHECK_THROWS_AS(general_solution_eval(1.0, -1.0, pf, 0.0), PoleAt);
    CHECK_THROWS_AS(general_solution_eval(0.0, 0.0, pf, 0.0), InvalidParams);
}

TEST_CASE("general solution matches direct integration") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uc1(0.1, 2.0);
    std::uniform_real_distribution<double> uc2(-2.0, 2.0);
    for (const auto* p : {&kOne, &kStep}) {
        const auto prof = rho_profile(*p, -3.0, 3.0);
        const Pfss pf = reconstruct_pfss(prof, -1.0, -2.0, 2.0);
        for (int k = 0; k < 10; ++k) {
            const double c1 = uc1(rng);
            const double c2 = uc2(rng);
            double y0 = 0.0;
            try {
                y0 = general_solution_eval(c1, c2, pf, -2.0);
            } catch (const PoleAt&) {
                continue;
            }
            const auto t = integrate_riccati(*p, -2.0, y0, Direction::forward, 4.0);
            for (std::size_t i = 0; i < t.xs.size(); ++i) {
                if (std::abs(t.ys[i]) > 1e3) break;
                const double g = general_solution_eval(c1, c2, pf, t.xs[i]);
                CHECK(std::abs(g - t.ys[i]) <= 1e-5 * std::max(1.0, std::abs(g)));
            }
        }
    }
}
