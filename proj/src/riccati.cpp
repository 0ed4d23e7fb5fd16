#include "otelbaev/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otelbaev/error.hpp"
#include "otelbaev/ode.hpp"
#include "otelbaev/otelbaev.hpp"

namespace otelbaev {

const char* to_string(ForwardClass c) {
    switch (c) {
        case ForwardClass::tends_plus: return "tends_plus";
        case ForwardClass::is_y1: return "is_y1";
        case ForwardClass::blows_up: return "blows_up";
    }
    return "?";
}

const char* to_string(BackwardClass c) {
    switch (c) {
        case BackwardClass::tends_minus: return "tends_minus";
        case BackwardClass::is_y2: return "is_y2";
        case BackwardClass::blows_up: return "blows_up";
    }
    return "?";
}

RiccatiTrajectory integrate_riccati(const Potential& p, double x0, double y0, Direction dir, double span,
                                    const RiccatiOptions& opt) {
    if (!(span > 0)) throw InvalidParams("span must be positive");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw NonFiniteInput("x0 and y0 must be finite");
    const double x1 = dir == Direction::forward ? x0 + span : x0 - span;
    const double d0 = solve_d(p, x0).d;

    ode::Options o;
    o.rtol = opt.rel_tol;
    o.atol = opt.rel_tol * 1e-2 / d0;
    o.max_step = opt.max_step_factor * d0;
    o.breakpoints = p.breakpoints(std::min(x0, x1), std::max(x0, x1));
    o.keep_dense = false;
    auto rhs = [&p](double x, const ode::Vec<1>& y) { return ode::Vec<1>{p.eval(x) - y[0] * y[0]}; };
    const double limit = opt.blowup_threshold;
    auto stop = [limit](double, const ode::Vec<1>& y) { return !(std::abs(y[0]) <= limit); };
    const auto res = ode::integrate<1>(rhs, x0, {y0}, x1, o, stop);

    RiccatiTrajectory t;
    t.direction = dir;
    t.error_budget = res.error_budget;
    t.xs = res.xs;
    t.ys.reserve(res.ys.size());
    for (const auto& y : res.ys) t.ys.push_back(y[0]);
    if (res.termination == ode::Termination::stopped) {
        t.blowup = true;
        const double y = res.y_end[0];
        t.sign = y > 0 ? 1 : -1;
        // Near the pole y' ~ -y^2, so z = 1/y is nearly affine with z' = 1 - q z^2.
        const double z = 1.0 / y;
        const double dz = 1.0 - p.eval(res.x_end) * z * z;
        t.x_star = res.x_end - z / dz;
    }
    return t;
}

RiccatiClassification classify_riccati(const Potential& p, double x0, double y0, const SolverConfig& cfg,
                                       double evidence_span) {
    const double d0 = solve_d(p, x0).d;
    SolverConfig c = cfg;
    c.grid_n = std::max(c.grid_n, 3);
    const RhoProfile prof = extremal_solutions(p, x0 - d0, x0 + d0, c);
    RiccatiClassification out;
    out.y1_at_x0 = prof.y1_at(x0);
    out.y2_at_x0 = prof.y2_at(x0);

    auto same = [&](double a, double b) { return std::abs(a - b) <= 10 * cfg.rel_tol * std::max(1.0, std::abs(b)); };
    if (same(y0, out.y1_at_x0)) {
        out.forward = ForwardClass::is_y1;
        out.exact_seed = true;
    } else {
        out.forward = y0 < out.y1_at_x0 ? ForwardClass::blows_up : ForwardClass::tends_plus;
    }
    if (same(y0, out.y2_at_x0)) {
        out.backward = BackwardClass::is_y2;
        out.exact_seed = true;
    } else {
        out.backward = y0 > out.y2_at_x0 ? BackwardClass::blows_up : BackwardClass::tends_minus;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    RiccatiOptions ro;
    ro.rel_tol = std::min(1e-10, cfg.rel_tol);
    auto evidence = [&](Direction dir, double& yd, double& xs) {
        const auto tr = integrate_riccati(p, x0, y0, dir, evidence_span * d0, ro);
        if (tr.blowup) {
            yd = nan;
            xs = tr.x_star;
        } else {
            yd = tr.ys.back() * solve_d(p, tr.xs.back()).d;
            xs = nan;
        }
    };
    evidence(Direction::forward, out.forward_yd, out.forward_x_star);
    evidence(Direction::backward, out.backward_yd, out.backward_x_star);
    return out;
}

double general_solution_eval(double c1, double c2, const Pfss& pfss, double x) {
    if (c1 == 0.0 && c2 == 0.0) throw InvalidParams("c1 and c2 cannot both vanish");
    const double a = c1 * pfss.v_at(x);
    const double b = c2 * pfss.u_at(x);
    const double den = a + b;
    if (std::abs(den) <= 1e-12 * (std::abs(a) + std::abs(b))) throw PoleAt(x);
    return (c1 * pfss.vp_at(x) + c2 * pfss.up_at(x)) / den;
}

}  // namespace otelbaev
