#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "otelbaev/error.hpp"

// Dormand-Prince 5(4) with Hairer's continuous extension, split at caller-given breakpoints.
namespace otelbaev::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
    double x0 = 0.0;
    double h = 0.0;
    std::array<Vec<N>, 5> r{};
};

/// Piecewise quartic-in-theta interpolant over all accepted steps.
template <std::size_t N>
class DenseSolution {
public:
    std::vector<DenseStep<N>> steps;

    bool empty() const { return steps.empty(); }
    double first_x() const { return steps.front().x0; }
    double last_x() const { return steps.back().x0 + steps.back().h; }
    double lo() const { return std::min(first_x(), last_x()); }
    double hi() const { return std::max(first_x(), last_x()); }
    bool covers(double x) const { return !empty() && x >= lo() && x <= hi(); }

    Vec<N> operator()(double x) const {
        if (!covers(x)) {
            std::ostringstream msg;
            msg << "x=" << x << " outside integrated range";
            throw WindowOutOfRange(msg.str());
        }
        const DenseStep<N>& s = locate(x);
        const double th = (x - s.x0) / s.h;
        const double th1 = 1.0 - th;
        Vec<N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = s.r[0][i] + th * (s.r[1][i] + th1 * (s.r[2][i] + th * (s.r[3][i] + th1 * s.r[4][i])));
        }
        return out;
    }

private:
    const DenseStep<N>& locate(double x) const {
        const bool forward = steps.front().h > 0;
        // Steps are ordered along the direction of integration.
        std::size_t lo_i = 0;
        std::size_t hi_i = steps.size();
        while (hi_i - lo_i > 1) {
            const std::size_t mid = (lo_i + hi_i) / 2;
            const bool after = forward ? x >= steps[mid].x0 : x <= steps[mid].x0;
            if (after) lo_i = mid;
            else hi_i = mid;
        }
        return steps[lo_i];
    }
};

struct Options {
    double rtol = 1e-9;
    double atol = 1e-9;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;
    /// Points where the right-hand side may jump; no step straddles one.
    std::vector<double> breakpoints;
    /// StiffnessLimit when |h| drops below this fraction of |x1 - x0|.
    double min_step_fraction = 1e-12;
    bool keep_dense = true;
    /// Only steps meeting [dense_lo, dense_hi] are kept in the dense output.
    double dense_lo = -std::numeric_limits<double>::infinity();
    double dense_hi = std::numeric_limits<double>::infinity();
};

enum class Termination { reached_end, stopped };

template <std::size_t N>
struct Result {
    DenseSolution<N> dense;
    std::vector<double> xs;
    std::vector<Vec<N>> ys;
    double x_end = 0.0;
    Vec<N> y_end{};
    Termination termination = Termination::reached_end;
    int accepted = 0;
    int rejected = 0;
    /// Sum of the absolute local error estimates (max over components) of accepted steps.
    double error_budget = 0.0;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace detail

/// Integrates y' = f(x, y) from x0 to x1 (either direction). `stop(x, y)` is checked after
/// every accepted step; returning true ends the integration with Termination::stopped.
template <std::size_t N, class Rhs, class Stop>
Result<N> integrate(const Rhs& f, double x0, Vec<N> y0, double x1, const Options& opt, const Stop& stop) {
    using namespace detail;
    Result<N> res;
    res.xs.push_back(x0);
    res.ys.push_back(y0);
    res.x_end = x0;
    res.y_end = y0;
    if (x0 == x1) return res;

    const double dir = x1 > x0 ? 1.0 : -1.0;
    const double total = std::abs(x1 - x0);
    std::vector<double> cuts;
    for (double b : opt.breakpoints) {
        if ((b - x0) * dir > 0 && (x1 - b) * dir > 0) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    if (dir < 0) std::reverse(cuts.begin(), cuts.end());
    cuts.push_back(x1);

    double h = opt.initial_step > 0 ? opt.initial_step : std::min(opt.max_step, 1e-2 * total);
    h = std::min(h, opt.max_step);
    double x = x0;
    Vec<N> y = y0;

    for (double seg_end : cuts) {
        // Stage evaluations are kept strictly inside the segment so jumps of f at its ends are never seen.
        const double inner_a = std::nextafter(x, seg_end);
        const double inner_b = std::nextafter(seg_end, x);
        const double seg_lo = std::min(inner_a, inner_b);
        const double seg_hi = std::max(inner_a, inner_b);
        auto rhs = [&](double t, const Vec<N>& v) { return f(std::clamp(t, seg_lo, seg_hi), v); };

        Vec<N> k1 = rhs(x, y);
        bool last = false;
        while (!last) {
            const double remaining = std::abs(seg_end - x);
            if (remaining == 0.0) break;
            double hs = std::min(h, opt.max_step);
            if (hs >= remaining * (1.0 - 1e-12)) {
                hs = remaining;
                last = true;
            }
            if (hs < opt.min_step_fraction * total) {
                std::ostringstream msg;
                msg << "step size collapsed to " << hs << " at x=" << x;
                throw StiffnessLimit(msg.str());
            }
            const double hh = dir * hs;
            Vec<N> yt, k2, k3, k4, k5, k6, k7, y1;
            for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hh * a21 * k1[i];
            k2 = rhs(x + c2 * hh, yt);
            for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hh * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(x + c3 * hh, yt);
            for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hh * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(x + c4 * hh, yt);
            for (std::size_t i = 0; i < N; ++i)
                yt[i] = y[i] + hh * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(x + c5 * hh, yt);
            for (std::size_t i = 0; i < N; ++i)
                yt[i] = y[i] + hh * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            const double xn = last ? seg_end : x + hh;
            k6 = rhs(xn, yt);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y[i] + hh * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = rhs(xn, y1);

            double err2 = 0.0;
            double err_abs = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = hh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
                err2 += (e / sc) * (e / sc);
                err_abs = std::max(err_abs, std::abs(e));
                finite = finite && std::isfinite(y1[i]) && std::isfinite(e);
            }
            const double err = finite ? std::sqrt(err2 / static_cast<double>(N)) : 1e10;
            if (err > 1.0) {
                ++res.rejected;
                last = false;
                h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
                continue;
            }
            if (opt.keep_dense && std::max(x, xn) >= opt.dense_lo && std::min(x, xn) <= opt.dense_hi) {
                DenseStep<N> st;
                st.x0 = x;
                st.h = xn - x;
                for (std::size_t i = 0; i < N; ++i) {
                    const double ydiff = y1[i] - y[i];
                    const double bspl = hh * k1[i] - ydiff;
                    st.r[0][i] = y[i];
                    st.r[1][i] = ydiff;
                    st.r[2][i] = bspl;
                    st.r[3][i] = ydiff - hh * k7[i] - bspl;
                    st.r[4][i] = hh * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                res.dense.steps.push_back(st);
            }
            ++res.accepted;
            res.error_budget += err_abs;
            x = xn;
            y = y1;
            k1 = k7;
            res.xs.push_back(x);
            res.ys.push_back(y);
            h = hs * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            if (stop(x, y)) {
                res.x_end = x;
                res.y_end = y;
                res.termination = Termination::stopped;
                return res;
            }
        }
    }
    res.x_end = x;
    res.y_end = y;
    return res;
}

template <std::size_t N, class Rhs>
Result<N> integrate(const Rhs& f, double x0, Vec<N> y0, double x1, const Options& opt) {
    return integrate<N>(f, x0, y0, x1, opt, [](double, const Vec<N>&) { return false; });
}

}  // namespace otelbaev::ode
