#include "otelbaev/classh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otelbaev/error.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/parallel.hpp"

namespace otelbaev {

KFunction KFunction::constant2() { return {}; }

KFunction KFunction::sqrt_abs() {
    KFunction k;
    k.kind = Kind::sqrt_abs;
    return k;
}

KFunction KFunction::powcos_rule(double alpha, double m) {
    KFunction k;
    k.kind = Kind::powcos_rule;
    k.alpha = alpha;
    k.m = m;
    k.validate();
    return k;
}

KFunction KFunction::table(std::vector<double> xs, std::vector<double> ks) {
    KFunction k;
    k.kind = Kind::table;
    k.xs = std::move(xs);
    k.ks = std::move(ks);
    k.validate();
    return k;
}

double KFunction::operator()(double x) const {
    const double ax = std::abs(x);
    switch (kind) {
        case Kind::constant2: return 2.0;
        case Kind::sqrt_abs: return ax >= 4.0 ? std::sqrt(ax) : 2.0;
        case Kind::powcos_rule: {
            const double e = (alpha + 2.0) / m;
            return ax <= std::pow(2.0, 1.0 / e) ? 2.0 : std::pow(ax, e);
        }
        case Kind::table: {
            if (x <= xs.front()) return ks.front();
            if (x >= xs.back()) return ks.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs.begin());
            const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ks[i - 1] + w * (ks[i] - ks[i - 1]);
        }
    }
    return 2.0;
}

void KFunction::validate() const {
    if (kind == Kind::powcos_rule) {
        if (!(alpha > -2.0) || !(m > 0) || !std::isfinite(alpha) || !std::isfinite(m))
            throw InvalidParams("powcos_rule needs alpha > -2 and m > 0");
    }
    if (kind != Kind::table) return;
    if (xs.empty() || xs.size() != ks.size()) throw InvalidParams("k table needs matching, nonempty xs and ks");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ks[i])) throw InvalidParams("k table entries must be finite");
        if (ks[i] < 2.0) throw InvalidParams("k table values must be >= 2");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw InvalidParams("k table xs must be strictly increasing");
        if (i > 0 && std::abs(ks[i] - ks[i - 1]) >= 0.1 * std::min(ks[i], ks[i - 1]))
            throw InvalidParams("adjacent k table values differ by 10% or more");
    }
}

const char* to_string(KFunction::Kind kind) {
    switch (kind) {
        case KFunction::Kind::constant2: return "constant2";
        case KFunction::Kind::sqrt_abs: return "sqrt_abs";
        case KFunction::Kind::powcos_rule: return "powcos_rule";
        case KFunction::Kind::table: return "table";
    }
    return "?";
}

namespace {

constexpr int kMaxUniform = 8192;
constexpr int kRefineCells = 4;
constexpr std::size_t kMaxCellPanels = 4096;

double golden_max(const auto& f, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace

double antisymmetric_sup(const Potential& p, double x, double z_max, int samples) {
    if (!(z_max > 0)) return 0.0;
    auto absI = [&](double z) { return std::abs(p.integrate(x, x + z) - p.integrate(x - z, x)); };

    const double panels = p.oscillation_panel_count(x - z_max, x + z_max);
    const int n = std::max(samples, static_cast<int>(std::min<double>(kMaxUniform, panels)));
    std::vector<double> zs;
    zs.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) zs.push_back(z_max * i / n);
    // I is piecewise linear between the mirrored images of the jumps.
    for (double b : p.breakpoints(x - z_max, x + z_max)) {
        const double z = std::abs(b - x);
        if (z > 0 && z <= z_max) zs.push_back(z);
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    std::vector<double> vals(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) vals[i] = absI(zs[i]);
    if (p.is_piecewise_constant()) return *std::max_element(vals.begin(), vals.end());

    // Smooth q: look closer at the best cells, at panel resolution.
    std::vector<std::size_t> order(zs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t top = std::min<std::size_t>(kRefineCells, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                      [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    std::vector<std::pair<double, double>> extra;
    for (std::size_t r = 0; r < top; ++r) {
        const std::size_t i = order[r];
        const double lo = zs[i > 0 ? i - 1 : 0];
        const double hi = zs[std::min(i + 1, zs.size() - 1)];
        std::vector<double> cand;
        if (p.oscillation_panel_count(x + lo, x + hi) + p.oscillation_panel_count(x - hi, x - lo) <= kMaxCellPanels) {
            for (double t : p.panel_points(x + lo, x + hi)) cand.push_back(t - x);
            for (double t : p.panel_points(x - hi, x - lo)) cand.push_back(x - t);
        } else {
            for (std::size_t j = 1; j < kMaxCellPanels; ++j) cand.push_back(lo + (hi - lo) * j / kMaxCellPanels);
        }
        for (double z : cand) {
            if (z > 0 && z <= z_max) extra.emplace_back(z, absI(z));
        }
    }
    for (std::size_t i = 0; i < zs.size(); ++i) extra.emplace_back(zs[i], vals[i]);
    std::sort(extra.begin(), extra.end());
    std::size_t j = 0;
    for (std::size_t i = 1; i < extra.size(); ++i) {
        if (extra[i].second > extra[j].second) j = i;
    }
    const double best = extra[j].second;
    const double lo = extra[j > 0 ? j - 1 : 0].first;
    const double hi = extra[std::min(j + 1, extra.size() - 1)].first;
    if (!(hi > lo)) return best;
    return std::max(best, golden_max(absI, lo, hi));
}

namespace {

double window_value(const Potential& p, double x, double scale_of_k, double d) {
    const double w = scale_of_k * d;
    return w * antisymmetric_sup(p, x, w);
}

}  // namespace

double phi(const Potential& p, const KFunction& k, double x) {
    return window_value(p, x, k(x), solve_d(p, x).d);
}

double f_big(const Potential& p, const KFunction& k, double x) {
    return window_value(p, x, std::sqrt(k(x)), solve_d(p, x).d);
}

SupSample sup_f(const Potential& p, const KFunction& k, double lo, double hi, int n) {
    std::vector<double> ts;
    for (int i = 0; i < n; ++i) ts.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    for (double b : p.breakpoints(lo, hi)) ts.push_back(b);
    SupSample out{-1.0, lo};
    for (double t : ts) {
        const double v = f_big(p, k, t);
        if (v > out.value) out = {v, t};
    }
    return out;
}

double beta(const Potential& p, const KFunction& k, double x, double c_exp) {
    if (!(c_exp > 0)) throw InvalidParams("c_exp must be positive");
    const double d = solve_d(p, x).d;
    return std::exp(-std::sqrt(k(x)) / c_exp) + sup_f(p, k, x - d, x + d, 65).value;
}

AlphaValue alpha(const Potential& p, const KFunction& k, double x, double c_exp, double horizon) {
    if (!(c_exp > 0)) throw InvalidParams("c_exp must be positive");
    const double d = solve_d(p, x).d;
    AlphaValue out;
    out.horizon = horizon > 0 ? horizon : 10.0 * k(x) * d;
    if (!(out.horizon > d)) throw InvalidParams("alpha horizon must exceed d(x)");
    SupSample s = x >= 0 ? sup_f(p, k, x - d, x + out.horizon, 257) : sup_f(p, k, x - out.horizon, x + d, 257);
    // Include beta's own samples so that alpha >= beta holds numerically, not just in the limit.
    const SupSample near = sup_f(p, k, x - d, x + d, 65);
    if (near.value > s.value) s = near;
    out.sup_f = s.value;
    out.argmax = s.argmax;
    out.value = std::exp(-std::sqrt(k(x)) / c_exp) + s.value;
    return out;
}

double eta1_formula(double f, double k, double c3) {
    return 4.0 * (f + std::sqrt(c3) * std::exp(-std::sqrt(k) / (3.0 * c3)));
}

double eta2_formula(double sup_f, double k, double c3, double c1, Eta2Exponent variant) {
    const double c = variant == Eta2Exponent::proof ? c1 : c3;
    return 65.0 * (sup_f + std::sqrt(c3) * std::exp(-std::sqrt(k) / (3.0 * c3 * std::sqrt(c))));
}

double eta1(const Potential& p, const KFunction& k, double x, double c3) {
    if (!(c3 > 0)) throw InvalidParams("c3 must be positive");
    return eta1_formula(f_big(p, k, x), k(x), c3);
}

double eta2(const Potential& p, const KFunction& k, double x, double c3, double c1, Eta2Exponent variant) {
    if (!(c3 > 0) || !(c1 > 0)) throw InvalidParams("c1 and c3 must be positive");
    const double d = solve_d(p, x).d;
    return eta2_formula(sup_f(p, k, x - d, x + d, 65).value, k(x), c3, c1, variant);
}

bool no_growth(const std::vector<double>& grid, const std::vector<double>& v) {
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(grid[a]) < std::abs(grid[b]); });
    const std::size_t half = order.size() / 2;
    double inner = 0.0, outer = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const double a = std::abs(v[order[i]]);
        if (!std::isfinite(a)) return false;
        (i < half ? inner : outer) = std::max(i < half ? inner : outer, a);
    }
    return outer <= 2.0 * inner;
}

ClassHReport verify_class_h(const Potential& p, const KFunction& k, double a, double b, int n) {
    if (n < 8) throw InvalidParams("verify_class_h needs at least 8 grid points");
    if (!(b > a)) throw InvalidParams("empty class-H grid");
    k.validate();
    ClassHReport r;
    const auto un = static_cast<std::size_t>(n);
    r.grid.resize(un);
    for (std::size_t i = 0; i < un; ++i) r.grid[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    r.k.resize(un);
    r.d.resize(un);
    r.phi.resize(un);
    r.f_big.resize(un);
    r.k_ratio.resize(un);
    r.d_ratio.resize(un);
    parallel_for(un, [&](std::size_t i) {
        const double x = r.grid[i];
        const double kx = k(x);
        const double d = solve_d(p, x).d;
        r.k[i] = kx;
        r.d[i] = d;
        r.phi[i] = window_value(p, x, kx, d);
        r.f_big[i] = window_value(p, x, std::sqrt(kx), d);
        double kr = 1.0;
        for (int j = 0; j <= 32; ++j) {
            const double kt = k(x - kx * d + 2.0 * kx * d * j / 32);
            kr = std::max({kr, kt / kx, kx / kt});
        }
        r.k_ratio[i] = kr;
        double dr = 1.0;
        const double w = std::sqrt(kx) * d;
        for (int j = 0; j <= 8; ++j) {
            const double dt = solve_d(p, x - w + 2.0 * w * j / 8).d;
            dr = std::max({dr, dt / d, d / dt});
        }
        r.d_ratio[i] = dr;
    });
    r.c1_hat = *std::max_element(r.k_ratio.begin(), r.k_ratio.end());
    r.c2_hat = *std::max_element(r.phi.begin(), r.phi.end());
    r.c3_hat = *std::max_element(r.d_ratio.begin(), r.d_ratio.end());
    r.pass_k_floor = std::all_of(r.k.begin(), r.k.end(), [](double v) { return v >= 2.0; });
    r.pass_k_slow = std::isfinite(r.c1_hat) && no_growth(r.grid, r.k_ratio);
    r.pass_phi_bounded = std::isfinite(r.c2_hat) && no_growth(r.grid, r.phi);
    return r;
}

Thresholds thresholds(const ClassHReport& report) {
    std::vector<std::size_t> order(report.grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(report.grid[a]) > std::abs(report.grid[b]);
    });
    const double k_min = 64.0 * report.c2_hat * report.c2_hat;
    std::size_t reached = order.size();
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t i = order[r];
        const bool ok = report.k[i] >= k_min && eta1_formula(report.f_big[i], report.k[i], report.c3_hat) <= 1e-3;
        if (!ok) break;
        reached = i;
    }
    if (reached == order.size()) throw NotReached("k >= 64 c2^2 and eta1 <= 1e-3 fail at the outermost grid point");
    Thresholds t;
    t.s0 = std::abs(report.grid[reached]);
    t.sup_d = *std::max_element(report.d.begin(), report.d.end());
    t.s1 = t.s0 + t.sup_d + 1.0;
    return t;
}

}  // namespace otelbaev
