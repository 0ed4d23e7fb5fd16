#include "otelbaev/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "otelbaev/error.hpp"

namespace otelbaev::oracle {

namespace {

template <int N>
struct LegendreRule {
    std::array<double, N> x{};
    std::array<double, N> w{};
    LegendreRule() {
        for (int i = 0; i < N; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = z;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[static_cast<std::size_t>(i)] = z;
            w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
    // Returns the rule applied to f and to |f| (the latter sets the roundoff floor).
    std::pair<double, double> apply(const std::function<double(double)>& f, double a, double b) const {
        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        double s = 0.0;
        double sa = 0.0;
        for (int i = 0; i < N; ++i) {
            const double v = w[static_cast<std::size_t>(i)] * f(c + h * x[static_cast<std::size_t>(i)]);
            s += v;
            sa += std::abs(v);
        }
        return {s * h, sa * std::abs(h)};
    }
};

const LegendreRule<10>& gl10() {
    static const LegendreRule<10> r;
    return r;
}
const LegendreRule<20>& gl20() {
    static const LegendreRule<20> r;
    return r;
}

double gl_rec(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    const double coarse = gl10().apply(f, a, b).first;
    const auto [fine, mag] = gl20().apply(f, a, b);
    const double m = 0.5 * (a + b);
    const double diff = std::abs(fine - coarse);
    // Values of q carry phase roundoff at large |x|; below 1e-13 of the magnitude the rules only see that noise.
    if (diff <= tol || diff <= 1e-13 * mag || depth == 0 || !(m > a && m < b)) return fine;
    return gl_rec(f, a, m, 0.5 * tol, depth - 1) + gl_rec(f, m, b, 0.5 * tol, depth - 1);
}

// Log-derivative y'/y carried across a block of value q and signed length len.
double advance_ratio(double r, double q, double len) {
    if (q == 0.0) return r / (1.0 + r * len);
    const double c = std::sqrt(q);
    const double t = std::tanh(c * len);
    return (r + c * t) / (1.0 + r * t / c);
}

// Walks from s to x through the blocks of q, calling step(value, signed length).
template <class Fn>
void walk(const PiecewiseQ& q, double s, double x, Fn&& step) {
    std::vector<double> cuts;
    for (double b : q.breakpoints) {
        if ((b - s) * (x - s) > 0 && std::abs(b - s) < std::abs(x - s)) cuts.push_back(b);
    }
    if (x > s) std::sort(cuts.begin(), cuts.end());
    else std::sort(cuts.rbegin(), cuts.rend());
    cuts.push_back(x);
    double cur = s;
    for (double c : cuts) {
        if (c != cur) step(q.eval(0.5 * (cur + c)), c - cur);
        cur = c;
    }
}

}  // namespace

double PiecewiseQ::eval(double x) const {
    const auto i = static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                            breakpoints.begin());
    if (i == 0) return left;
    if (i == breakpoints.size()) return right;
    return values[i - 1];
}

double PiecewiseQ::integral(double a, double b) const {
    double acc = 0.0;
    walk(*this, a, b, [&](double v, double len) { acc += v * len; });
    return acc;
}

PiecewiseQ PiecewiseQ::constant(double q0) { return {{0.0}, {}, q0, q0}; }

PiecewiseQ PiecewiseQ::step(double l, double r, double at) { return {{at}, {}, l, r}; }

PiecewiseQ PiecewiseQ::staircase(int n_max) {
    // Breakpoints -(N+1)^2 < ... < -1 < 1 < ... < (N+1)^2; q_n on |x| in [n^2,(n+1)^2), 2 on (-1,1).
    auto level = [](int n) { return std::pow(1.0 + 1.0 / n, n); };
    PiecewiseQ q;
    q.left = q.right = level(n_max);
    for (int n = n_max + 1; n >= 1; --n) q.breakpoints.push_back(-static_cast<double>(n) * n);
    for (int n = 1; n <= n_max + 1; ++n) q.breakpoints.push_back(static_cast<double>(n) * n);
    for (int n = n_max; n >= 1; --n) q.values.push_back(level(n));
    q.values.push_back(2.0);
    for (int n = 1; n <= n_max; ++n) q.values.push_back(level(n));
    return q;
}

TransferState propagate_piecewise(const PiecewiseQ& q, TransferState from, double to_x) {
    TransferState s = from;
    walk(q, from.x, to_x, [&](double v, double len) {
        if (v == 0.0) {
            s.y += s.yp * len;
            return;
        }
        const double c = std::sqrt(v);
        const double ch = std::cosh(c * len);
        const double sh = std::sinh(c * len);
        const double y = s.y * ch + s.yp * sh / c;
        const double yp = s.y * c * sh + s.yp * ch;
        s.y = y;
        s.yp = yp;
    });
    s.x = to_x;
    return s;
}

double rho_exact_piecewise(const PiecewiseQ& q, double x) {
    if (!(q.left > 0 && q.right > 0)) throw InvalidParams("rho_exact_piecewise needs positive tails");
    const double b0 = q.breakpoints.front();
    const double bm = q.breakpoints.back();
    // Each ratio is only carried in its stable direction; on the tails it is exact.
    double rv = std::sqrt(q.left);
    if (x > b0) walk(q, b0, x, [&](double v, double len) { rv = advance_ratio(rv, v, len); });
    double ru = -std::sqrt(q.right);
    if (x < bm) walk(q, bm, x, [&](double v, double len) { ru = advance_ratio(ru, v, len); });
    return 1.0 / (rv - ru);
}

PfssStates pfss_exact_piecewise(const PiecewiseQ& q, double x) {
    const double b0 = q.breakpoints.front();
    const double bm = q.breakpoints.back();
    PfssStates out;
    out.v = propagate_piecewise(q, {b0, 1.0, std::sqrt(q.left)}, x);
    out.u = propagate_piecewise(q, {bm, 1.0, -std::sqrt(q.right)}, x);
    return out;
}

double d_exact_constant(double q0) {
    if (!(q0 > 0)) throw InvalidParams("d_exact_constant needs q0 > 0");
    return 1.0 / std::sqrt(q0);
}

double antisymmetric_sup_piecewise(const PiecewiseQ& q, double x, double z_max) {
    std::vector<double> zs{0.0, z_max};
    for (double b : q.breakpoints) {
        const double z = std::abs(b - x);
        if (z <= z_max) zs.push_back(z);
    }
    double best = 0.0;
    for (double z : zs) best = std::max(best, std::abs(q.integral(x, x + z) - q.integral(x - z, x)));
    return best;
}

RiccatiValue riccati_constant_closed_form(double q0, double x0, double y0, double x) {
    if (!(q0 > 0)) throw InvalidParams("riccati_constant_closed_form needs q0 > 0");
    const double c = std::sqrt(q0);
    RiccatiValue r;
    if (y0 == c || y0 == -c) {
        r.value = y0;
        return r;
    }
    if (std::abs(y0) < c) {
        r.value = c * std::tanh(c * (x - x0) + std::atanh(y0 / c));
        return r;
    }
    // y = c coth(c (x - x*)), pole at x* = x0 - arccoth(y0/c)/c.
    const double s = 0.5 * std::log((y0 / c + 1.0) / (y0 / c - 1.0));
    const double xs = x0 - s / c;
    r.pole_x = xs;
    if ((xs - x0) * (x - x0) > 0 && std::abs(x - x0) >= std::abs(xs - x0)) {
        r.pole = true;
        r.value = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.value = c / std::tanh(c * (x - xs));
    return r;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -gauss_legendre(f, b, a, tol, max_depth);
    return gl_rec(f, a, b, tol, max_depth);
}

double romberg(const std::function<double(double)>& f, double a, double b, int n, double tol) {
    double total = 0.0;
    const double w = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        const double s = a + w * i;
        const double t = i + 1 == n ? b : s + w;
        std::array<double, 20> prev{};
        std::array<double, 20> cur{};
        prev[0] = 0.5 * (t - s) * (f(s) + f(t));
        double best = prev[0];
        for (int k = 1; k < 20; ++k) {
            const double h = (t - s) / std::ldexp(1.0, k);
            double mid = 0.0;
            const long cnt = 1L << (k - 1);
            for (long j = 0; j < cnt; ++j) mid += f(s + (2.0 * j + 1.0) * h);
            cur[0] = 0.5 * prev[0] + h * mid;
            double pow4 = 4.0;
            for (int m = 1; m <= k; ++m) {
                cur[static_cast<std::size_t>(m)] =
                    cur[static_cast<std::size_t>(m - 1)] +
                    (cur[static_cast<std::size_t>(m - 1)] - prev[static_cast<std::size_t>(m - 1)]) / (pow4 - 1.0);
                pow4 *= 4.0;
            }
            const double change = std::abs(cur[static_cast<std::size_t>(k)] - prev[static_cast<std::size_t>(k - 1)]);
            const bool done = change <= std::max(tol / n, 4e-16 * std::abs(cur[static_cast<std::size_t>(k)]));
            best = cur[static_cast<std::size_t>(k)];
            prev = cur;
            if (done && k >= 4) break;
        }
        total += best;
    }
    return total;
}

double integrate_reference(const Potential& p, double a, double b) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_reference(p, b, a);
    std::vector<double> pts{a};
    for (double bp : p.breakpoints(a, b)) pts.push_back(bp);
    pts.push_back(b);
    auto f = [&p](double t) { return p.eval(t); };
    double acc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double s = pts[i - 1];
        const double t = pts[i];
        // Resolution hint only: enough equal pieces that each spans a small part of a period.
        const auto n = static_cast<int>(std::max(1.0, std::ceil(2.0 * p.oscillation_panel_count(s, t))));
        const double w = (t - s) / n;
        const double scale = std::max(1.0, std::abs(p.eval(0.5 * (s + t))) * (t - s));
        for (int k = 0; k < n; ++k) {
            const double lo = s + w * k;
            const double hi = k + 1 == n ? t : lo + w;
            acc += gauss_legendre(f, lo, hi, 1e-14 * scale / n, 4);
        }
    }
    return acc;
}

double high_precision_d(const Potential& p, double x) {
    auto s = [&](double d) { return d * integrate_reference(p, x - d, x + d); };
    const double qx = p.eval(x);
    double hi = qx > 0 ? 1.0 / std::sqrt(qx) : 1.0;
    while (s(hi) < 2.0) {
        hi *= 2.0;
        if (hi > 1e6) throw BracketFailure("high_precision_d: no bracket below 1e6");
    }
    double lo = 0.0;
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (s(mid) < 2.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace otelbaev::oracle
