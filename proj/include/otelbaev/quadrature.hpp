#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace otelbaev::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    /// Same rule applied to |f|; sets the roundoff floor.
    double magnitude = 0.0;
};

namespace detail {

// Kronrod abscissae on [0,1] (descending), Kronrod weights, Gauss weights for the odd nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

/// 15-point Gauss-Kronrod rule on [a,b]; error is |K15 - G7|.
template <class F>
Estimate gk15(const F& f, double a, double b) {
    using namespace detail;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resa = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
        resa += kWgk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
    }
    return {resk * h, std::abs((resk - resg) * h), resa * std::abs(h)};
}

namespace detail {

template <class F>
double adaptive_rec(const F& f, double a, double b, Estimate whole, double abs_tol, int depth,
                    double& err_acc) {
    const double m = a + 0.5 * (b - a);
    // Below ~50 ulp of the absolute integral only roundoff in f is left to resolve.
    const bool noise = whole.error <= 1e-14 * whole.magnitude;
    if (whole.error <= abs_tol || noise || depth <= 0 || !(m > a && m < b)) {
        err_acc += whole.error;
        return whole.value;
    }
    const Estimate left = gk15(f, a, m);
    const Estimate right = gk15(f, m, b);
    return adaptive_rec(f, a, m, left, 0.5 * abs_tol, depth - 1, err_acc) +
           adaptive_rec(f, m, b, right, 0.5 * abs_tol, depth - 1, err_acc);
}

}  // namespace detail

/// Adaptive bisection driven by GK15 with an absolute tolerance target.
template <class F>
Estimate integrate_abs(const F& f, double a, double b, double abs_tol, int max_depth = 40) {
    if (!(b > a)) {
        if (a == b) return {};
        Estimate e = integrate_abs(f, b, a, abs_tol, max_depth);
        return {-e.value, e.error, e.magnitude};
    }
    double err = 0.0;
    const double v = detail::adaptive_rec(f, a, b, gk15(f, a, b), abs_tol, max_depth, err);
    return {v, err};
}

/// Absolute-or-relative target: error <= tol * max(1, |I|).
template <class F>
Estimate integrate(const F& f, double a, double b, double tol, int max_depth = 40) {
    const Estimate rough = gk15(f, std::min(a, b), std::max(a, b));
    const double abs_tol = tol * std::max(1.0, std::abs(rough.value));
    return integrate_abs(f, a, b, abs_tol, max_depth);
}

/// Composite integration over consecutive panels given by sorted `points`
/// (which must start at a and end at b); each panel is refined adaptively.
template <class F>
Estimate integrate_panels(const F& f, std::span<const double> points, double tol, int max_depth = 40) {
    Estimate total;
    if (points.size() < 2) return total;
    const double len = points.back() - points.front();
    if (!(len > 0)) return total;
    // First pass gives the scale for the absolute-or-relative budget.
    std::vector<Estimate> first(points.size() - 1);
    double scale = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] > points[i - 1]) first[i - 1] = gk15(f, points[i - 1], points[i]);
        scale += std::abs(first[i - 1].value);
    }
    const double budget = tol * std::max(1.0, scale);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double a = points[i - 1];
        const double b = points[i];
        if (!(b > a)) continue;
        const double local = budget * (b - a) / len;
        double err = 0.0;
        const double v = detail::adaptive_rec(f, a, b, first[i - 1], local, max_depth, err);
        total.value += v;
        total.error += err;
    }
    return total;
}

}  // namespace otelbaev::quad
