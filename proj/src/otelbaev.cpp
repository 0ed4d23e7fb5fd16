#include "otelbaev/otelbaev.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "otelbaev/error.hpp"
#include "otelbaev/parallel.hpp"
#include "otelbaev/root_finding.hpp"

namespace otelbaev {

namespace {

void require_finite_x(double x) {
    if (!std::isfinite(x)) throw NonFiniteInput("x must be finite");
}

double default_seed(const Potential& p, double x) {
    const double qx = p.eval(x);
    return qx > 0 ? 1.0 / std::sqrt(qx) : 1.0;
}

// Quadrature tolerance kept well below the root tolerance so residuals stay meaningful.
double quad_tol_for(double tol) { return std::min(kDefaultQuadTol, 1e-2 * tol); }

}  // namespace

double s_of(const Potential& p, double x, double eta, double quad_tol) {
    if (eta == 0.0) return 0.0;
    return eta * p.integrate(x - eta, x + eta, quad_tol);
}

double g_of(const Potential& p, double x, double eta, double quad_tol) {
    if (eta == 0.0) return 0.0;
    // Swapping the order of integration turns the double integral into a tent-weighted one.
    return p.integrate_affine(x - eta, x, 0.0, eta, quad_tol) + p.integrate_affine(x, x + eta, eta, 0.0, quad_tol);
}

DSample solve_d(const Potential& p, double x, double tol, std::optional<double> seed) {
    require_finite_x(x);
    const double qt = quad_tol_for(tol);
    auto f = [&](double d) { return s_of(p, x, d, qt) - 2.0; };
    const RootResult r = solve_increasing(f, seed.value_or(default_seed(p, x)), 0.1 * tol, 0.1 * tol, kBracketCap);
    return {x, r.x, r.fx};
}

DHatSample solve_d_hat(const Potential& p, double x, double tol, std::optional<double> seed) {
    require_finite_x(x);
    const double qt = quad_tol_for(tol);
    auto f = [&](double d) { return g_of(p, x, d, qt) - 1.0; };
    const RootResult r = solve_increasing(f, seed.value_or(default_seed(p, x)), 0.1 * tol, 0.1 * tol, kBracketCap);
    const double dh = r.x;
    const double right = p.integrate(x, x + dh, qt);
    const double left = p.integrate(x - dh, x, qt);
    DHatSample s;
    s.x = x;
    s.d_hat = dh;
    s.residual = r.fx;
    s.d_hat_prime = -(right - left) / (right + left);
    return s;
}

double sup_d(const Potential& p, double a, double b, int grid_n, double tol) {
    if (grid_n < 2) throw InvalidParams("sup_d needs grid_n >= 2");
    std::vector<double> ds(static_cast<std::size_t>(grid_n));
    parallel_for(ds.size(), [&](std::size_t i) {
        const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
        ds[i] = solve_d(p, x, tol).d;
    });
    return *std::max_element(ds.begin(), ds.end());
}

}  // namespace otelbaev
