#pragma once

#include <functional>
#include <vector>

#include "otelbaev/potential.hpp"

// Reference implementations used by the test suite. Nothing here calls the main solvers'
// quadrature, root finder or integrator.
namespace otelbaev::oracle {

struct TransferState {
    double x = 0.0;
    double y = 0.0;
    double yp = 0.0;
};

/// Piecewise-constant q: left tail on x < breakpoints.front(), values[i] on
/// [breakpoints[i], breakpoints[i+1]), right tail on x >= breakpoints.back().
struct PiecewiseQ {
    std::vector<double> breakpoints;
    std::vector<double> values;
    double left = 0.0;
    double right = 0.0;

    double eval(double x) const;
    double integral(double a, double b) const;

    static PiecewiseQ constant(double q0);
    static PiecewiseQ step(double left, double right, double at);
    /// Staircase truncated at |x| = (n_max+1)^2 with constant continuation q_{n_max}.
    static PiecewiseQ staircase(int n_max = 60);
};

/// Exact propagation of y'' = q y from `from` to to_x (either direction).
TransferState propagate_piecewise(const PiecewiseQ& q, TransferState from, double to_x);

/// rho = u v for the principal pair built from the decaying tail solutions. Tails must be positive.
double rho_exact_piecewise(const PiecewiseQ& q, double x);

/// Unnormalized principal solutions at x: v grows to the right, u decays to the right.
/// Built from (1, sqrt(q_left)) at the first breakpoint and (1, -sqrt(q_right)) at the last.
struct PfssStates {
    TransferState u;
    TransferState v;
};
PfssStates pfss_exact_piecewise(const PiecewiseQ& q, double x);

double d_exact_constant(double q0);

/// Exact sup over z in [0, z_max] of |integral over [0,z] of q(x+t) - q(x-t)|: the integral is
/// piecewise linear in z, so only the ends and the mirrored breakpoints are evaluated.
double antisymmetric_sup_piecewise(const PiecewiseQ& q, double x, double z_max);

struct RiccatiValue {
    double value = 0.0;
    bool pole = false;
    /// Location of the pole nearest x0 in the direction of x (if any).
    double pole_x = 0.0;
};

/// Solution of y' + y^2 = q0 through (x0, y0), evaluated at x.
RiccatiValue riccati_constant_closed_form(double q0, double x0, double y0, double x);

/// Independent d: plain bisection to relative 1e-13, Gauss-Legendre quadrature at 1e-14.
double high_precision_d(const Potential& p, double x);

/// Independent integral of q over [a,b] (split at the potential's breakpoints).
double integrate_reference(const Potential& p, double a, double b);

/// Adaptive Gauss-Legendre (10 vs 20 nodes), absolute tolerance, bisection depth capped.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 12);

/// Romberg extrapolation on n equal sub-intervals of [a,b].
double romberg(const std::function<double(double)>& f, double a, double b, int n, double tol);

}  // namespace otelbaev::oracle
