#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otelbaev/error.hpp"
#include "otelbaev/oracle.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/rho.hpp"

using namespace otelbaev;

namespace {

const Potential kOne(PotentialSpec::constant(1.0));
const Potential kFour(PotentialSpec::constant(4.0));
const Potential kStep(PotentialSpec::step(1.0, 4.0, 0.0));
const Potential kStair(PotentialSpec::staircase5());
const Potential kPowCos(PotentialSpec::powcos(2.0, 3.0));

struct Case {
    const Potential* p;
    double a;
    double b;
};

const Case kFamilies[] = {{&kOne, -10.0, 10.0}, {&kStep, -3.0, 3.0}, {&kStair, -40.0, 60.0}, {&kPowCos, 40.0, 80.0}};

}  // namespace

TEST_CASE("constant potentials sit on the fixed points") {
    const auto one = rho_profile(kOne, -2.0, 2.0);
    for (std::size_t i = 0; i < one.grid.size(); ++i) {
        CHECK(std::abs(one.y2[i] - 1.0) <= 1e-8);
        CHECK(std::abs(one.y1[i] + 1.0) <= 1e-8);
        CHECK(std::abs(one.rho[i] - 0.5) <= 1e-8);
        CHECK(std::abs(one.rho_prime[i]) <= 1e-8);
    }
    const auto four = rho_profile(kFour, 0.0, 1.0);
    for (std::size_t i = 0; i < four.grid.size(); ++i) {
        CHECK(std::abs(four.y2[i] - 2.0) <= 1e-8);
        CHECK(std::abs(four.y1[i] + 2.0) <= 1e-8);
        CHECK(std::abs(four.rho[i] - 0.25) <= 1e-8);
    }
    CHECK(four.meta.padding == doctest::Approx(20.0));
    CHECK_FALSE(four.meta.local);
}

TEST_CASE("step potential against the transfer-matrix oracle") {
    const auto q = oracle::PiecewiseQ::step(1.0, 4.0, 0.0);
    const auto prof = rho_profile(kStep, -3.0, 3.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        worst = std::max(worst, std::abs(prof.rho[i] / oracle::rho_exact_piecewise(q, prof.grid[i]) - 1.0));
    }
    CHECK(worst <= 1e-6);
    CHECK(prof.rho_at(0.0) == doctest::Approx(oracle::rho_exact_piecewise(q, 0.0)).epsilon(1e-6));
    // Off-grid evaluation uses the dense output.
    CHECK(prof.rho_at(0.123) == doctest::Approx(oracle::rho_exact_piecewise(q, 0.123)).epsilon(1e-6));
}

TEST_CASE("staircase against the transfer-matrix oracle") {
    const auto q = oracle::PiecewiseQ::staircase(60);
    const auto prof = rho_profile(kStair, -20.0, 30.0);
    for (std::size_t i = 0; i < prof.grid.size(); i += 10) {
        CHECK(prof.rho[i] == doctest::Approx(oracle::rho_exact_piecewise(q, prof.grid[i])).epsilon(1e-6));
    }
}

TEST_CASE("a priori inequalities, sign structure and |rho'| < 1") {
    for (const auto& c : kFamilies) {
        const auto prof = rho_profile(*c.p, c.a, c.b);
        int violations = 0;
        for (std::size_t i = 0; i < prof.grid.size(); ++i) {
            const double d = solve_d(*c.p, prof.grid[i]).d;
            if (!(d / 4 <= prof.rho[i] && prof.rho[i] <= 1.5 * d)) ++violations;
            if (!(prof.y2[i] > 0 && prof.y1[i] < 0)) ++violations;
            if (!(std::abs(prof.rho_prime[i]) < 1.0)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("oscillatory windows switch to per-point pieces") {
    SolverConfig cfg;
    cfg.grid_n = 5;
    const auto prof = rho_profile(kPowCos, 100.0, 200.0, cfg);
    CHECK(prof.meta.local);
    CHECK(prof.pieces().size() == 5);
    CHECK(prof.covers(150.0));
    CHECK_FALSE(prof.covers(120.0));
    CHECK_THROWS_AS(prof.rho_at(120.0), WindowOutOfRange);
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        const double x = prof.grid[i];
        CHECK(std::abs(2 * prof.rho[i] * x - 1.0) < 1e-3);
    }
}

TEST_CASE("padding independence") {
    for (const auto& c : kFamilies) {
        SolverConfig base;
        base.grid_n = 41;
        SolverConfig twice = base;
        twice.padding_factor *= 2;
        const auto r1 = rho_profile(*c.p, c.a, c.b, base);
        const auto r2 = rho_profile(*c.p, c.a, c.b, twice);
        double worst = 0.0;
        for (std::size_t i = 0; i < r1.grid.size(); ++i) worst = std::max(worst, std::abs(r2.rho[i] / r1.rho[i] - 1.0));
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("Riccati residual stays within the reported error budget") {
    for (const auto& c : kFamilies) {
        SolverConfig base;
        base.grid_n = 41;
        SolverConfig fine = base;
        fine.rel_tol /= 100;
        const auto r1 = extremal_solutions(*c.p, c.a, c.b, base);
        const auto r2 = extremal_solutions(*c.p, c.a, c.b, fine);
        double worst = 0.0;
        for (std::size_t i = 0; i < r1.grid.size(); ++i) {
            worst = std::max({worst, std::abs(r1.y1[i] - r2.y1[i]), std::abs(r1.y2[i] - r2.y2[i])});
        }
        CHECK(worst <= 10 * r1.meta.error_budget);
        CHECK(r1.rho.empty());
    }
}

TEST_CASE("reconstructed fundamental system") {
    const auto one = rho_profile(kOne, -2.0, 2.0);
    const Pfss a = reconstruct_pfss(one, 0.0);
    CHECK(a.u_at(0.0) == std::sqrt(one.rho_at(0.0)));
    CHECK(a.v_at(0.0) == std::sqrt(one.rho_at(0.0)));
    CHECK(a.wronskian_residual <= 1e-6);
    for (double x : {-1.9, -0.7, 0.0, 0.4, 1.3, 2.0}) {
        CHECK(std::abs(a.u_at(x) - std::exp(-x) / std::sqrt(2.0)) <= 1e-7);
        CHECK(std::abs(a.v_at(x) - std::exp(x) / std::sqrt(2.0)) <= 1e-7);
    }
    for (std::size_t i = 0; i < a.grid.size(); i += 50) {
        CHECK(std::abs(a.u[i] - std::exp(-a.grid[i]) / std::sqrt(2.0)) <= 1e-7);
    }
    const auto four = rho_profile(kFour, -1.0, 1.0);
    const Pfss b = reconstruct_pfss(four, 0.0);
    for (double x : {-0.9, 0.0, 0.55}) {
        CHECK(std::abs(b.u_at(x) - std::exp(-2 * x) / 2) <= 1e-7);
        CHECK(std::abs(b.v_at(x) - std::exp(2 * x) / 2) <= 1e-7);
    }
    const auto step = rho_profile(kStep, -3.0, 3.0);
    const Pfss c = reconstruct_pfss(step, 0.5);
    CHECK(c.u_at(0.5) == c.v_at(0.5));
    CHECK(c.wronskian_residual <= 1e-6);
    CHECK_THROWS_AS(reconstruct_pfss(step, 0.5, -4.0, 1.0), WindowOutOfRange);
}

TEST_CASE("sup of |rho'|") {
    const auto one = rho_profile(kOne, -5.0, 5.0);
    CHECK(sup_rho_prime(one, 0.0) <= 1e-8);
    const auto step = rho_profile(kStep, -3.0, 3.0);
    const double h = sup_rho_prime(step, 0.0);
    CHECK(h > 0.1);
    CHECK(h < 1.0);
    SolverConfig fine;
    fine.rel_tol /= 100;
    const auto ref = rho_profile(kStep, -3.0, 3.0, fine);
    CHECK(sup_rho_prime(ref, 0.0) == doctest::Approx(h).epsilon(1e-6));
    CHECK_THROWS_AS(sup_rho_prime(step, 2.9), WindowOutOfRange);
}

TEST_CASE("log-ratio identity") {
    for (double c : {0.5, 1.0, 2.0, 3.0}) {
        const Potential p(PotentialSpec::constant(c * c));
        const auto prof = rho_profile(p, -10.0, 10.0);
        const auto id = check_log_ratio_identity(prof, 1.3);
        CHECK(std::abs(id.lhs - 1.0) <= 1e-9);
        CHECK(std::abs(id.rhs - 1.0) <= 1e-9);
    }
    const auto step = rho_profile(kStep, -3.0, 3.0);
    for (double x : {-2.0, -1.5, 1.5, 2.0}) {
        const auto id = check_log_ratio_identity(step, x);
        CHECK(std::abs(id.lhs / id.rhs - 1.0) <= 1e-4);
    }
    // A jump inside [x-d, x+d] is fine too: both sides only see integrals and rho'.
    const auto id0 = check_log_ratio_identity(step, 0.1);
    CHECK(std::abs(id0.lhs / id0.rhs - 1.0) <= 1e-4);

    SolverConfig cfg;
    cfg.grid_n = 3;
    cfg.rel_tol = 1e-11;
    const auto pc = rho_profile(kPowCos, 59.0, 61.0, cfg);
    const auto idp = check_log_ratio_identity(pc, 60.0);
    CHECK(std::abs(idp.lhs / idp.rhs - 1.0) <= 1e-4);
}

TEST_CASE("Cauchy representation") {
    const auto one = rho_profile(kOne, -3.0, 3.0);
    const auto a = check_cauchy_representation(one, 0.0, 1.0);
    CHECK(a.max_abs_deviation <= 1e-7);
    CHECK(a.sign_pattern);
    const auto four = rho_profile(kFour, -3.0, 3.0);
    const auto b = check_cauchy_representation(four, 0.0, 1.0);
    CHECK(b.max_abs_deviation <= 1e-7);
    CHECK(b.sign_pattern);

    const Pfss pf = reconstruct_pfss(one, 0.4, -1.0, 2.0);
    const double y = pf.vp_at(0.4) * pf.u_at(0.4) - pf.up_at(0.4) * pf.v_at(0.4);
    const double yp = pf.vp_at(0.4) * pf.up_at(0.4) - pf.up_at(0.4) * pf.vp_at(0.4);
    CHECK(y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(yp == 0.0);

    SolverConfig cfg;
    cfg.grid_n = 3;
    const auto pc = rho_profile(kPowCos, 59.0, 61.0, cfg);
    const double d = solve_d(kPowCos, 60.0).d;
    const auto c = check_cauchy_representation(pc, 60.0, 2 * d);
    CHECK(c.max_abs_deviation <= 1e-6);
    CHECK(c.sign_pattern);
}

TEST_CASE("configuration checks") {
    SolverConfig bad;
    bad.padding_factor = 0;
    CHECK_THROWS_AS(rho_profile(kOne, 0.0, 1.0, bad), InvalidParams);
    CHECK_THROWS_AS(rho_profile(kOne, 1.0, 1.0), InvalidParams);
    const Potential zero(PotentialSpec::constant(0.0));
    CHECK_THROWS_AS(rho_profile(zero, 0.0, 1.0), BracketFailure);
}
