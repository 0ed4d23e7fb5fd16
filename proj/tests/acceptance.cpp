// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "otelbaev/asymptotics.hpp"
#include "otelbaev/classh.hpp"
#include "otelbaev/error.hpp"
#include "otelbaev/oracle.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/rho.hpp"
#include "otelbaev/riccati.hpp"

using namespace otelbaev;

namespace {

const Potential kStep(PotentialSpec::step(1.0, 4.0, 0.0));
const Potential kStair(PotentialSpec::staircase5());
const Potential kPowCos(PotentialSpec::powcos(2.0, 3.0));
const Potential kOne(PotentialSpec::constant(1.0));
const double kCs[] = {0.5, 1.0, 2.0, 3.0};

struct Family {
    const char* name;
    const Potential* p;
    double a, b;
};
const Family kFamilies[] = {
    {"constant", &kOne, -10.0, 10.0},
    {"step", &kStep, -3.0, 3.0},
    {"staircase", &kStair, -40.0, 60.0},
    {"powcos", &kPowCos, 40.0, 80.0},
};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome constants() {
    Outcome o;
    double worst_d = 0, worst_rho = 0, worst_eps = 0, worst_y = 0;
    for (double c : kCs) {
        const Potential p(PotentialSpec::constant(c * c));
        for (double x : {-7.0, 0.0, 3.5}) worst_d = std::max(worst_d, std::abs(solve_d(p, x).d * c - 1.0));
        const auto prof = rho_profile(p, -10.0, 10.0);
        for (std::size_t i = 0; i < prof.grid.size(); ++i) {
            const double x = prof.grid[i];
            worst_y = std::max({worst_y, std::abs(prof.y2[i] - c), std::abs(prof.y1[i] + c)});
            if (std::abs(x) > 9.0) continue;
            const double d = solve_d(p, x).d;
            worst_rho = std::max(worst_rho, std::abs(prof.rho[i] - 0.5 / c));
            worst_eps = std::max(worst_eps, std::abs(2 * prof.rho[i] / d - 1.0));
        }
    }
    o.require(worst_d <= 1e-10, "d = 1/c");
    o.require(worst_rho <= 1e-6, "rho = 1/(2c)");
    o.require(worst_eps <= 1e-6, "eps = 0");
    o.require(worst_y <= 1e-8, "y2 = c, y1 = -c");
    o.detail << "d rel " << fmt(worst_d) << ", rho " << fmt(worst_rho) << ", eps " << fmt(worst_eps) << ", y "
             << fmt(worst_y);
    return o;
}

Outcome sandwich_and_signs(bool sandwich) {
    Outcome o;
    for (const auto& f : kFamilies) {
        const auto prof = rho_profile(*f.p, f.a, f.b);
        int bad = 0;
        double margin = 1e300;
        for (std::size_t i = 0; i < prof.grid.size(); ++i) {
            if (sandwich) {
                const double d = solve_d(*f.p, prof.grid[i]).d;
                const double m = std::min(prof.rho[i] - d / 4, 1.5 * d - prof.rho[i]) / d;
                margin = std::min(margin, m);
                if (m < 0) ++bad;
            } else {
                const double m = std::min({1.0 - std::abs(prof.rho_prime[i]), prof.y2[i], -prof.y1[i]});
                margin = std::min(margin, m);
                if (!(m > 0)) ++bad;
            }
        }
        o.require(bad == 0, f.name);
        o.detail << f.name << " " << bad << " violations (margin " << fmt(margin) << ")  ";
    }
    return o;
}

Outcome identity() {
    Outcome o;
    double worst_pc = 0, worst_step = 0, worst_const = 0;
    SolverConfig local;
    local.grid_n = 3;
    local.rel_tol = 1e-11;
    for (int i = 0; i < 20; ++i) {
        const double x = 42.0 + i * 156.0 / 19.0;
        const auto prof = rho_profile(kPowCos, x - 1.0, x + 1.0, local);
        const auto id = check_log_ratio_identity(prof, x);
        worst_pc = std::max(worst_pc, std::abs(id.lhs / id.rhs - 1.0));
    }
    const auto step = rho_profile(kStep, -4.0, 4.0);
    for (int i = 0; i < 20; ++i) {
        // [x - d, x + d] stays clear of the jump: d <= 1 on the left, 1/2 on the right.
        const double x = i < 10 ? -3.0 + i * 1.5 / 9.0 : 1.5 + (i - 10) * 1.5 / 9.0;
        const auto id = check_log_ratio_identity(step, x);
        worst_step = std::max(worst_step, std::abs(id.lhs / id.rhs - 1.0));
    }
    for (double c : kCs) {
        const auto prof = rho_profile(Potential(PotentialSpec::constant(c * c)), -10.0, 10.0);
        for (double x : {-2.0, 0.0, 1.3}) {
            const auto id = check_log_ratio_identity(prof, x);
            worst_const = std::max({worst_const, std::abs(id.lhs / id.rhs - 1.0), std::abs(id.lhs - 1.0)});
        }
    }
    o.require(worst_pc <= 1e-4, "powcos");
    o.require(worst_step <= 1e-4, "step");
    o.require(worst_const <= 1e-9, "constants");
    o.detail << "powcos " << fmt(worst_pc) << ", step " << fmt(worst_step) << ", constants " << fmt(worst_const);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto q = oracle::PiecewiseQ::step(1.0, 4.0, 0.0);
    const auto prof = rho_profile(kStep, -3.0, 3.0);
    double worst_rho = 0;
    for (std::size_t i = 0; i < prof.grid.size(); ++i)
        worst_rho = std::max(worst_rho, std::abs(prof.rho[i] / oracle::rho_exact_piecewise(q, prof.grid[i]) - 1.0));
    o.require(worst_rho <= 1e-6, "rho vs transfer matrices");
    std::mt19937_64 rng(2024);
    double worst_d = 0;
    for (const auto& f : kFamilies) {
        std::uniform_real_distribution<double> ux(f.p == &kPowCos ? 2.0 : -50.0, f.p == &kPowCos ? 120.0 : 50.0);
        for (int i = 0; i < 50; ++i) {
            const double x = ux(rng);
            worst_d = std::max(worst_d, std::abs(solve_d(*f.p, x).d / oracle::high_precision_d(*f.p, x) - 1.0));
        }
    }
    o.require(worst_d <= 1e-9, "d vs bisection");
    o.detail << "rho rel " << fmt(worst_rho) << ", d rel " << fmt(worst_d);
    return o;
}

Outcome riccati() {
    Outcome o;
    double worst = 0;
    for (double y0 : {0.0, 2.0, 0.5, -0.5}) {
        const auto t = integrate_riccati(kOne, 0.0, y0, Direction::forward, 5.0);
        o.require(!t.blowup, "no pole forward");
        for (std::size_t i = 0; i < t.xs.size(); ++i)
            worst = std::max(worst, std::abs(t.ys[i] - oracle::riccati_constant_closed_form(1.0, 0.0, y0, t.xs[i]).value));
    }
    o.require(worst <= 1e-6, "closed form");
    const auto pole = integrate_riccati(kOne, 0.0, 2.0, Direction::backward, 2.0);
    const double pole_err = pole.blowup ? std::abs(pole.x_star + 0.5 * std::log(3.0)) : INFINITY;
    o.require(pole_err <= 1e-3, "pole");
    int mismatches = 0;
    for (double y0 : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
        const auto c = classify_riccati(kOne, 0.0, y0);
        const auto fwd = y0 < -1 ? ForwardClass::blows_up : y0 == -1 ? ForwardClass::is_y1 : ForwardClass::tends_plus;
        const auto bwd = y0 > 1 ? BackwardClass::blows_up : y0 == 1 ? BackwardClass::is_y2 : BackwardClass::tends_minus;
        if (c.forward != fwd || c.backward != bwd || c.exact_seed != (std::abs(y0) == 1.0)) ++mismatches;
    }
    o.require(mismatches == 0, "classification");
    o.detail << "trajectory " << fmt(worst) << ", pole " << fmt(pole_err) << ", " << mismatches
             << " classification mismatches";
    return o;
}

Outcome d_asymptotics() {
    Outcome o;
    double worst_ratio = 0;
    for (const auto& r : check_d_asymptotics(kPowCos, {50.0, 100.0, 200.0})) {
        o.require(r.pass, "powcos x=" + fmt(r.x));
        worst_ratio = std::max(worst_ratio, std::abs(r.delta) / r.bound);
    }
    double worst_const = 0, worst_units = 0;
    for (double c : kCs) {
        for (const auto& r : check_d_asymptotics(Potential(PotentialSpec::constant(c * c)), {-20.0, 0.0, 35.0})) {
            // Zero bound, so delta must vanish up to the rounding of the interval ends.
            o.require(r.pass && r.bound == 0.0, "constant c=" + fmt(c));
            worst_const = std::max(worst_const, std::abs(r.delta));
            worst_units = std::max(worst_units, std::abs(r.delta) / rounding_slack(r.x, r.d));
        }
    }
    o.detail << "powcos max |delta|/bound " << fmt(worst_ratio) << ", constants max |delta| " << fmt(worst_const)
             << " (" << fmt(worst_units) << " of the rounding floor)";
    return o;
}

Outcome envelopes() {
    Outcome o;
    const auto r = check_powcos(2.0, 3.0, 50.0, 300.0, 101);
    o.require(r.params.gamma == 1.0 && std::abs(r.params.gamma0 - 2.0 / 7.0) < 1e-15, "exponents");
    double worst_d = 0, worst_e = 0, left = 0, right = 0;
    for (const auto& row : r.rows) {
        worst_d = std::max(worst_d, row.scaled_delta / r.c_delta);
        worst_e = std::max(worst_e, row.scaled_epsilon / r.c_epsilon);
        if (row.x <= 150.0) left = std::max(left, std::abs(row.epsilon));
        if (row.x >= 150.0) right = std::max(right, std::abs(row.epsilon));
    }
    o.require(r.pass, "envelopes");
    o.require(right <= left, "eps decay");
    o.detail << "C_delta " << fmt(r.c_delta) << " (max use " << fmt(worst_d) << "), C_eps " << fmt(r.c_epsilon)
             << " (max use " << fmt(worst_e) << "), max|eps| " << fmt(left) << " -> " << fmt(right);
    return o;
}

Outcome class_h() {
    Outcome o;
    struct Case {
        const char* name;
        const Potential* p;
        KFunction k;
    };
    const Case cases[] = {{"staircase", &kStair, KFunction::sqrt_abs()},
                          {"powcos", &kPowCos, KFunction::powcos_rule(2.0, 7.0)}};
    for (const auto& c : cases) {
        const auto r1 = verify_class_h(*c.p, c.k, 10.0, 500.0, 128);
        const auto r2 = verify_class_h(*c.p, c.k, 10.0, 2000.0, 128);
        o.require(r1.pass() && r2.pass(), c.name);
        const double drift = std::max(r1.c2_hat, r2.c2_hat) / std::min(r1.c2_hat, r2.c2_hat);
        o.require(drift < 2.0, std::string(c.name) + " c2 drift");
        o.detail << c.name << " c2 " << fmt(r1.c2_hat) << " -> " << fmt(r2.c2_hat) << "  ";
    }
    return o;
}

Outcome separation() {
    Outcome o;
    const auto rows = compare_bounds_staircase(5, 40, 1.0);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].n > 10) o.require(rows[i].ratio > rows[i - 1].ratio, "increasing at n=" + std::to_string(rows[i].n));
    const double growth = (rows.back().ratio - 1) / (rows.front().ratio - 1);
    o.require(growth >= 3.0, "growth");
    o.detail << "ratio " << fmt(rows.front().ratio) << " -> " << fmt(rows.back().ratio) << ", excess x"
             << fmt(growth);
    return o;
}

Outcome cauchy() {
    Outcome o;
    double worst = 0;
    for (double c : kCs) {
        const Potential p(PotentialSpec::constant(c * c));
        const auto prof = rho_profile(p, -5.0, 5.0);
        const auto r = check_cauchy_representation(prof, 0.0, 2.0 / c);
        o.require(r.sign_pattern, "sign pattern c=" + fmt(c));
        worst = std::max(worst, r.max_abs_deviation);
    }
    SolverConfig cfg;
    cfg.grid_n = 3;
    const auto prof = rho_profile(kPowCos, 59.0, 61.0, cfg);
    const auto r = check_cauchy_representation(prof, 60.0, 2 * solve_d(kPowCos, 60.0).d);
    o.require(r.sign_pattern, "sign pattern powcos");
    worst = std::max(worst, r.max_abs_deviation);
    o.require(worst <= 1e-6, "deviation");
    o.detail << "max deviation " << fmt(worst);
    return o;
}

Outcome padding() {
    Outcome o;
    for (const auto& f : kFamilies) {
        SolverConfig base;
        base.grid_n = 41;
        SolverConfig twice = base;
        twice.padding_factor *= 2;
        const auto r1 = rho_profile(*f.p, f.a, f.b, base);
        const auto r2 = rho_profile(*f.p, f.a, f.b, twice);
        double worst = 0;
        for (std::size_t i = 0; i < r1.grid.size(); ++i) worst = std::max(worst, std::abs(r2.rho[i] / r1.rho[i] - 1.0));
        o.require(worst < 1e-7, f.name);
        o.detail << f.name << " " << fmt(worst) << "  ";
    }
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"constant potentials", constants},
        {"rho between d/4 and 3d/2", [] { return sandwich_and_signs(true); }},
        {"|rho'| < 1 and y2 > 0 > y1", [] { return sandwich_and_signs(false); }},
        {"log-ratio identity", identity},
        {"oracle equivalence", oracle_equivalence},
        {"Riccati closed forms", riccati},
        {"d against 1/sqrt(q1)", d_asymptotics},
        {"powcos envelopes", envelopes},
        {"class-H verification", class_h},
        {"alpha/beta separation", separation},
        {"Cauchy cross-check", cauchy},
        {"padding independence", padding},
    };
    int failed = 0, idx = 0;
    for (const auto& [name, fn] : criteria) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "error: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", idx - failed, idx);
    return failed ? 1 : 0;
}
