#pragma once

#include <optional>

#include "otelbaev/potential.hpp"

namespace otelbaev {

inline constexpr double kDefaultDTol = 1e-10;
inline constexpr double kBracketCap = 1e6;

struct DSample {
    double x = 0.0;
    double d = 0.0;
    /// d * integral of q over [x-d, x+d], minus 2.
    double residual = 0.0;
};

struct DHatSample {
    double x = 0.0;
    double d_hat = 0.0;
    double d_hat_prime = 0.0;
    /// G(d_hat) - 1.
    double residual = 0.0;
};

/// S(eta) = eta * integral of q over [x-eta, x+eta].
double s_of(const Potential& p, double x, double eta, double quad_tol = kDefaultQuadTol);

/// G(eta) = integral over t in [0,eta] of the integral of q over [x-t, x+t].
double g_of(const Potential& p, double x, double eta, double quad_tol = kDefaultQuadTol);

/// Root of S(d) = 2. `seed` overrides the default starting guess for the bracket search.
DSample solve_d(const Potential& p, double x, double tol = kDefaultDTol, std::optional<double> seed = std::nullopt);

/// Root of G(d) = 1 and its derivative in x.
DHatSample solve_d_hat(const Potential& p, double x, double tol = kDefaultDTol,
                       std::optional<double> seed = std::nullopt);

/// Max of d over grid_n uniform points of [a,b]; a lower bound for the supremum of d.
double sup_d(const Potential& p, double a, double b, int grid_n, double tol = kDefaultDTol);

}  // namespace otelbaev
