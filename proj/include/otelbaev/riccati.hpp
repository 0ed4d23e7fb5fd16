#pragma once

#include <vector>

#include "otelbaev/potential.hpp"
#include "otelbaev/rho.hpp"

namespace otelbaev {

enum class Direction { forward, backward };

struct RiccatiOptions {
    double rel_tol = 1e-10;
    /// |y| above this counts as a pole.
    double blowup_threshold = 1e8;
    /// Integrator step cap in units of d(x0).
    double max_step_factor = 0.25;
};

struct RiccatiTrajectory {
    Direction direction = Direction::forward;
    std::vector<double> xs;
    std::vector<double> ys;
    bool blowup = false;
    /// Extrapolated pole and the sign of y just before it (only when blowup).
    double x_star = 0.0;
    int sign = 0;
    double error_budget = 0.0;
};

/// Solves y' + y^2 = q from (x0, y0) over `span` in the given direction, stopping at a pole.
RiccatiTrajectory integrate_riccati(const Potential& p, double x0, double y0, Direction dir, double span,
                                    const RiccatiOptions& opt = {});

enum class ForwardClass { tends_plus, is_y1, blows_up };
enum class BackwardClass { tends_minus, is_y2, blows_up };

const char* to_string(ForwardClass c);
const char* to_string(BackwardClass c);

struct RiccatiClassification {
    ForwardClass forward = ForwardClass::tends_plus;
    BackwardClass backward = BackwardClass::tends_minus;
    double y1_at_x0 = 0.0;
    double y2_at_x0 = 0.0;
    /// Terminal y*d of the evidence runs (NaN when that run hit a pole).
    double forward_yd = 0.0;
    double backward_yd = 0.0;
    /// Pole found by the evidence runs (NaN when none within the evidence span).
    double forward_x_star = 0.0;
    double backward_x_star = 0.0;
    /// The seed matched an extremal solution; that branch is unstable to integrate.
    bool exact_seed = false;
};

/// Corridor test against y1(x0), y2(x0), plus evidence runs of `evidence_span` d(x0) each way.
RiccatiClassification classify_riccati(const Potential& p, double x0, double y0, const SolverConfig& cfg = {},
                                       double evidence_span = 25.0);

/// (c1 v' + c2 u') / (c1 v + c2 u); PoleAt when the denominator vanishes.
double general_solution_eval(double c1, double c2, const Pfss& pfss, double x);

}  // namespace otelbaev
