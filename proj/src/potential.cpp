#include "otelbaev/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "otelbaev/error.hpp"
#include "otelbaev/quadrature.hpp"

namespace otelbaev {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidSpec(std::string(what) + " must be finite");
}

// Integral of t^alpha over [a,b] with 0 < a <= b, written to avoid cancellation when b-a << a.
double monomial_integral(double alpha, double a, double b) {
    if (!(b > a)) return 0.0;
    const double r = (b - a) / a;
    const double e = alpha + 1.0;
    if (e == 0.0) return std::log1p(r);
    return std::pow(a, e) * std::expm1(e * std::log1p(r)) / e;
}

// Mean of the affine weight over the sub-interval [s,t] of [a,b].
double affine_mean(double a, double b, double wa, double wb, double s, double t) {
    if (!(b > a)) return wa;
    const double slope = (wb - wa) / (b - a);
    return wa + slope * (0.5 * (s + t) - a);
}

}  // namespace

namespace detail {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x) const = 0;
    virtual double integrate(double a, double b, double tol) const = 0;
    virtual double integrate_affine(double a, double b, double wa, double wb, double tol) const = 0;
    virtual void breakpoints(double a, double b, std::vector<double>& out) const = 0;
    virtual void panel_points(double a, double b, std::vector<double>& out) const = 0;
    virtual double panel_count(double a, double b) const = 0;
    virtual bool even() const = 0;
    virtual bool piecewise_constant() const = 0;
};

namespace {

// Generic affine-weighted integral by panel quadrature over the node's own panel points.
double affine_by_panels(const Node& n, double a, double b, double wa, double wb, double tol) {
    std::vector<double> pts{a};
    n.panel_points(a, b, pts);
    pts.push_back(b);
    std::sort(pts.begin() + 1, pts.end() - 1);
    const double slope = (wb - wa) / (b - a);
    auto f = [&](double t) { return n.eval(t) * (wa + slope * (t - a)); };
    return quad::integrate_panels(f, pts, tol).value;
}

struct ConstantNode final : Node {
    double q0;
    explicit ConstantNode(double v) : q0(v) {}
    double eval(double) const override { return q0; }
    double integrate(double a, double b, double) const override { return q0 * (b - a); }
    double integrate_affine(double a, double b, double wa, double wb, double) const override {
        return q0 * (b - a) * 0.5 * (wa + wb);
    }
    void breakpoints(double, double, std::vector<double>&) const override {}
    void panel_points(double, double, std::vector<double>&) const override {}
    double panel_count(double, double) const override { return 0.0; }
    bool even() const override { return true; }
    bool piecewise_constant() const override { return true; }
};

struct PiecewiseNode final : Node {
    std::vector<double> bp;
    std::vector<double> vals;
    double left;
    double right;

    PiecewiseNode(std::vector<double> b, std::vector<double> v, double l, double r)
        : bp(std::move(b)), vals(std::move(v)), left(l), right(r) {}

    // Index of the interval containing x: 0 = left tail, i = [bp[i-1], bp[i]), bp.size() = right tail.
    std::size_t interval(double x) const {
        return static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), x) - bp.begin());
    }
    double level(std::size_t i) const {
        if (i == 0) return left;
        if (i == bp.size()) return right;
        return vals[i - 1];
    }
    double eval(double x) const override { return level(interval(x)); }

    template <class Fn>
    void for_each_block(double a, double b, Fn&& fn) const {
        std::size_t i = interval(a);
        double s = a;
        while (s < b) {
            const double t = i < bp.size() ? std::min(b, bp[i]) : b;
            if (t > s) fn(s, t, level(i));
            s = t;
            ++i;
        }
    }
    double integrate(double a, double b, double) const override {
        if (b < a) return -integrate(b, a, 0.0);
        double acc = 0.0;
        for_each_block(a, b, [&](double s, double t, double v) { acc += v * (t - s); });
        return acc;
    }
    double integrate_affine(double a, double b, double wa, double wb, double) const override {
        if (!(b > a)) return 0.0;
        double acc = 0.0;
        for_each_block(a, b, [&](double s, double t, double v) {
            acc += v * (t - s) * affine_mean(a, b, wa, wb, s, t);
        });
        return acc;
    }
    void breakpoints(double a, double b, std::vector<double>& out) const override {
        for (std::size_t i = 0; i < bp.size(); ++i) {
            if (bp[i] > a && bp[i] < b && level(i) != level(i + 1)) out.push_back(bp[i]);
        }
    }
    void panel_points(double a, double b, std::vector<double>& out) const override { breakpoints(a, b, out); }
    double panel_count(double, double) const override { return 0.0; }
    bool even() const override {
        if (left != right) return false;
        const std::size_t m = bp.size();
        for (std::size_t i = 0; i < m; ++i) {
            if (bp[i] != -bp[m - 1 - i]) return false;
        }
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (vals[i] != vals[m - 2 - i]) return false;
        }
        return true;
    }
    bool piecewise_constant() const override { return true; }
};

// q = 2 on [0,1), q_n on [n^2,(n+1)^2) for n >= 1, reflected evenly.
struct StaircaseNode final : Node {
    static int block(double ax) {
        if (ax < 1.0) return 0;
        auto n = static_cast<long long>(std::floor(std::sqrt(ax)));
        while (static_cast<double>(n) * static_cast<double>(n) > ax) --n;
        while (static_cast<double>(n + 1) * static_cast<double>(n + 1) <= ax) ++n;
        return static_cast<int>(n);
    }
    static double level_of(int n) { return n == 0 ? 2.0 : staircase_level(n); }
    double eval(double x) const override { return level_of(block(std::abs(x))); }

    // Exact integral over [lo,hi] with 0 <= lo <= hi.
    static double pos_integral(double lo, double hi) {
        double acc = 0.0;
        double s = lo;
        int n = block(s);
        while (s < hi) {
            const double end = static_cast<double>(n + 1) * static_cast<double>(n + 1);
            const double t = std::min(hi, end);
            acc += level_of(n) * (t - s);
            s = t;
            ++n;
        }
        return acc;
    }
    static double pos_affine(double lo, double hi, double a, double b, double wa, double wb) {
        double acc = 0.0;
        double s = lo;
        int n = block(s);
        while (s < hi) {
            const double end = static_cast<double>(n + 1) * static_cast<double>(n + 1);
            const double t = std::min(hi, end);
            acc += level_of(n) * (t - s) * affine_mean(a, b, wa, wb, s, t);
            s = t;
            ++n;
        }
        return acc;
    }
    double integrate(double a, double b, double) const override {
        if (b < a) return -integrate(b, a, 0.0);
        double acc = 0.0;
        if (a < 0.0) acc += pos_integral(std::max(0.0, -b), -a);
        if (b > 0.0) acc += pos_integral(std::max(0.0, a), b);
        return acc;
    }
    double integrate_affine(double a, double b, double wa, double wb, double) const override {
        if (!(b > a)) return 0.0;
        double acc = 0.0;
        if (a < 0.0) {
            // Mirror: t -> -t maps [max(0,-b), -a] onto the negative part; weight evaluated at -t.
            const double lo = std::max(0.0, -b);
            const double hi = -a;
            const double slope = (wb - wa) / (b - a);
            const double w_lo = wa + slope * (-lo - a);
            const double w_hi = wa + slope * (-hi - a);
            acc += pos_affine(lo, hi, lo, hi, w_lo, w_hi);
        }
        if (b > 0.0) {
            const double lo = std::max(0.0, a);
            acc += pos_affine(lo, b, a, b, wa, wb);
        }
        return acc;
    }
    void breakpoints(double a, double b, std::vector<double>& out) const override {
        const auto push_range = [&](double lo, double hi, double sign) {
            // Jumps at n^2 for n >= 2 inside (lo, hi), 0 <= lo.
            int n = std::max(2, block(lo));
            std::vector<double> tmp;
            for (;; ++n) {
                const double z = static_cast<double>(n) * static_cast<double>(n);
                if (z >= hi) break;
                if (z > lo) tmp.push_back(sign * z);
            }
            if (sign < 0) std::reverse(tmp.begin(), tmp.end());
            out.insert(out.end(), tmp.begin(), tmp.end());
        };
        if (a < 0.0) push_range(std::max(0.0, -b), -a, -1.0);
        if (b > 0.0) push_range(std::max(0.0, a), b, 1.0);
    }
    void panel_points(double a, double b, std::vector<double>& out) const override { breakpoints(a, b, out); }
    double panel_count(double, double) const override { return 0.0; }
    bool even() const override { return true; }
    bool piecewise_constant() const override { return true; }
};

// q = 1 on |x| < 1, |x|^alpha (1 + cos|x|^beta) otherwise.
struct PowCosNode final : Node {
    double alpha;
    double beta;
    PowCosNode(double a, double b) : alpha(a), beta(b) {}

    double power(double t) const { return alpha == 0.0 ? 1.0 : std::pow(t, alpha); }
    double phase(double t) const {
        if (beta == 2.0) return t * t;
        if (beta == 3.0) return t * t * t;
        return std::pow(t, beta);
    }
    double root(double u) const {
        if (beta == 2.0) return std::sqrt(u);
        if (beta == 3.0) return std::cbrt(u);
        return std::pow(u, 1.0 / beta);
    }
    double eval(double x) const override {
        const double t = std::abs(x);
        if (t < 1.0) return 1.0;
        return power(t) * (1.0 + std::cos(phase(t)));
    }
    double oscill(double t) const { return power(t) * std::cos(phase(t)); }
    // Relative accuracy reachable near |x| = t: the phase t^beta carries one rounding.
    double noise(double t) const {
        return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, phase(std::abs(t)));
    }

    // Panel ends t_k = (k pi/4)^(1/beta) strictly inside (lo,hi), 1 <= lo.
    void pos_panels(double lo, double hi, std::vector<double>& out) const {
        const double ulo = phase(lo);
        const double uhi = phase(hi);
        const auto k0 = static_cast<long long>(std::floor(ulo / kQuarterPi)) + 1;
        const auto k1 = static_cast<long long>(std::ceil(uhi / kQuarterPi)) - 1;
        for (long long k = k0; k <= k1; ++k) {
            const double t = root(static_cast<double>(k) * kQuarterPi);
            if (t > lo && t < hi) out.push_back(t);
        }
    }
    // Antiderivative of g(u) cos u with g(u) = u^p / beta, p = (alpha+1)/beta - 1, by repeated
    // integration by parts: sum_k (-1)^k [g^(2k) sin u + g^(2k+1) cos u]. Asymptotic in 1/u; returns
    // false when the terms do not fall below roundoff quickly enough.
    bool series_antiderivative(double u, double& out) const {
        const double p = (alpha + 1.0) / beta - 1.0;
        if (u < series_threshold()) return false;
        const double su = std::sin(u);
        const double cu = std::cos(u);
        double term = std::pow(u, p) / beta;  // j-th derivative of g at u
        const double floor = std::abs(term) * 1e-18;
        double acc = 0.0;
        for (int j = 0; j < 40; ++j) {
            switch (j % 4) {
                case 0: acc += term * su; break;
                case 1: acc += term * cu; break;
                case 2: acc -= term * su; break;
                default: acc -= term * cu; break;
            }
            term *= (p - j) / u;
            if (std::abs(term) <= floor) {
                out = acc;
                return true;
            }
        }
        return false;
    }
    double series_threshold() const { return 50.0 * (1.0 + std::abs((alpha + 1.0) / beta - 1.0)); }
    double panel_oscillatory(double lo, double hi, double abs_tol) const {
        if (!(hi > lo)) return 0.0;
        std::vector<double> pts{lo};
        pos_panels(lo, hi, pts);
        pts.push_back(hi);
        auto f = [this](double t) { return oscill(t); };
        const double len = hi - lo;
        double total = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double s = pts[i - 1];
            const double t = pts[i];
            if (!(t > s)) continue;
            double err = 0.0;
            total += quad::detail::adaptive_rec(f, s, t, quad::gk15(f, s, t), abs_tol * (t - s) / len, 40, err);
        }
        return total;
    }
    // Integral of t^alpha cos t^beta over [lo,hi], 1 <= lo.
    double pos_oscillatory(double lo, double hi, double abs_tol) const {
        if (!(hi > lo)) return 0.0;
        double f_hi = 0.0;
        if (!series_antiderivative(phase(hi), f_hi)) return panel_oscillatory(lo, hi, abs_tol);
        double f_lo = 0.0;
        if (series_antiderivative(phase(lo), f_lo)) return f_hi - f_lo;
        const double mid = std::max(lo, root(series_threshold()) * (1.0 + 1e-12));
        double f_mid = 0.0;
        if (!series_antiderivative(phase(mid), f_mid)) return panel_oscillatory(lo, hi, abs_tol);
        return panel_oscillatory(lo, mid, abs_tol) + (f_hi - f_mid);
    }
    // Integral over [lo,hi] with 0 <= lo <= hi.
    double pos_integral(double lo, double hi, double tol) const {
        double acc = 0.0;
        if (lo < 1.0) acc += std::min(hi, 1.0) - lo;
        const double s = std::max(lo, 1.0);
        if (hi > s) {
            const double mono = monomial_integral(alpha, s, hi);
            acc += mono + pos_oscillatory(s, hi, std::max(tol, noise(hi)) * std::max(1.0, std::abs(mono)));
        }
        return acc;
    }
    double integrate(double a, double b, double tol) const override {
        if (b < a) return -integrate(b, a, tol);
        double acc = 0.0;
        if (a < 0.0) acc += pos_integral(std::max(0.0, -b), -a, tol);
        if (b > 0.0) acc += pos_integral(std::max(0.0, a), b, tol);
        return acc;
    }
    double integrate_affine(double a, double b, double wa, double wb, double tol) const override {
        if (!(b > a)) return 0.0;
        return affine_by_panels(*this, a, b, wa, wb, std::max(tol, noise(std::max(-a, b))));
    }
    void breakpoints(double a, double b, std::vector<double>& out) const override {
        if (a < -1.0 && -1.0 < b) out.push_back(-1.0);
        if (a < 1.0 && 1.0 < b) out.push_back(1.0);
    }
    void panel_points(double a, double b, std::vector<double>& out) const override {
        if (a < -1.0) {
            std::vector<double> tmp;
            pos_panels(std::max(1.0, -b), -a, tmp);
            for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) out.push_back(-*it);
        }
        breakpoints(a, b, out);
        if (b > 1.0) pos_panels(std::max(1.0, a), b, out);
    }
    double pos_count(double lo, double hi) const {
        if (!(hi > lo)) return 0.0;
        return (phase(hi) - phase(lo)) / kQuarterPi;
    }
    double panel_count(double a, double b) const override {
        double c = 0.0;
        if (a < -1.0) c += pos_count(std::max(1.0, -b), -a);
        if (b > 1.0) c += pos_count(std::max(1.0, a), b);
        return c;
    }
    bool even() const override { return true; }
    bool piecewise_constant() const override { return false; }
};

struct SumNode final : Node {
    std::shared_ptr<const Node> x;
    std::shared_ptr<const Node> y;
    SumNode(std::shared_ptr<const Node> a, std::shared_ptr<const Node> b) : x(std::move(a)), y(std::move(b)) {}
    double eval(double t) const override { return x->eval(t) + y->eval(t); }
    double integrate(double a, double b, double tol) const override {
        return x->integrate(a, b, tol) + y->integrate(a, b, tol);
    }
    double integrate_affine(double a, double b, double wa, double wb, double tol) const override {
        return x->integrate_affine(a, b, wa, wb, tol) + y->integrate_affine(a, b, wa, wb, tol);
    }
    void breakpoints(double a, double b, std::vector<double>& out) const override {
        x->breakpoints(a, b, out);
        y->breakpoints(a, b, out);
    }
    void panel_points(double a, double b, std::vector<double>& out) const override {
        x->panel_points(a, b, out);
        y->panel_points(a, b, out);
    }
    double panel_count(double a, double b) const override { return x->panel_count(a, b) + y->panel_count(a, b); }
    bool even() const override { return x->even() && y->even(); }
    bool piecewise_constant() const override { return x->piecewise_constant() && y->piecewise_constant(); }
};

struct ScaledNode final : Node {
    double factor;
    std::shared_ptr<const Node> c;
    ScaledNode(double f, std::shared_ptr<const Node> child) : factor(f), c(std::move(child)) {}
    double eval(double t) const override { return factor * c->eval(t); }
    double integrate(double a, double b, double tol) const override { return factor * c->integrate(a, b, tol); }
    double integrate_affine(double a, double b, double wa, double wb, double tol) const override {
        return factor * c->integrate_affine(a, b, wa, wb, tol);
    }
    void breakpoints(double a, double b, std::vector<double>& out) const override { c->breakpoints(a, b, out); }
    void panel_points(double a, double b, std::vector<double>& out) const override { c->panel_points(a, b, out); }
    double panel_count(double a, double b) const override { return c->panel_count(a, b); }
    bool even() const override { return c->even(); }
    bool piecewise_constant() const override { return c->piecewise_constant(); }
};

std::shared_ptr<const Node> build(const PotentialSpec& s) {
    switch (s.kind) {
        case PotentialKind::constant:
            return std::make_shared<ConstantNode>(s.q0);
        case PotentialKind::step:
            return std::make_shared<PiecewiseNode>(std::vector<double>{s.at}, std::vector<double>{}, s.left, s.right);
        case PotentialKind::piecewise_constant:
            return std::make_shared<PiecewiseNode>(s.breakpoints, s.values, s.left, s.right);
        case PotentialKind::staircase5:
            return std::make_shared<StaircaseNode>();
        case PotentialKind::powcos:
            return std::make_shared<PowCosNode>(s.alpha, s.beta);
        case PotentialKind::sum:
            return std::make_shared<SumNode>(build(s.children[0]), build(s.children[1]));
        case PotentialKind::scaled:
            return std::make_shared<ScaledNode>(s.factor, build(s.children[0]));
    }
    throw InvalidSpec("unknown potential kind");
}

}  // namespace
}  // namespace detail

std::string_view to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::constant: return "constant";
        case PotentialKind::step: return "step";
        case PotentialKind::piecewise_constant: return "piecewise_constant";
        case PotentialKind::staircase5: return "staircase5";
        case PotentialKind::powcos: return "powcos";
        case PotentialKind::sum: return "sum";
        case PotentialKind::scaled: return "scaled";
    }
    return "unknown";
}

std::optional<PotentialKind> potential_kind_from_string(std::string_view name) {
    for (auto k : {PotentialKind::constant, PotentialKind::step, PotentialKind::piecewise_constant,
                   PotentialKind::staircase5, PotentialKind::powcos, PotentialKind::sum, PotentialKind::scaled}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

PotentialSpec PotentialSpec::constant(double q0) {
    PotentialSpec s;
    s.kind = PotentialKind::constant;
    s.q0 = q0;
    return s;
}

PotentialSpec PotentialSpec::step(double left, double right, double at) {
    PotentialSpec s;
    s.kind = PotentialKind::step;
    s.left = left;
    s.right = right;
    s.at = at;
    return s;
}

PotentialSpec PotentialSpec::piecewise_constant(std::vector<double> breakpoints, std::vector<double> values,
                                                double left, double right) {
    PotentialSpec s;
    s.kind = PotentialKind::piecewise_constant;
    s.breakpoints = std::move(breakpoints);
    s.values = std::move(values);
    s.left = left;
    s.right = right;
    return s;
}

PotentialSpec PotentialSpec::staircase5() {
    PotentialSpec s;
    s.kind = PotentialKind::staircase5;
    return s;
}

PotentialSpec PotentialSpec::powcos(double alpha, double beta) {
    PotentialSpec s;
    s.kind = PotentialKind::powcos;
    s.alpha = alpha;
    s.beta = beta;
    return s;
}

PotentialSpec PotentialSpec::sum(PotentialSpec a, PotentialSpec b) {
    PotentialSpec s;
    s.kind = PotentialKind::sum;
    s.children = {std::move(a), std::move(b)};
    return s;
}

PotentialSpec PotentialSpec::scaled(PotentialSpec child, double factor) {
    PotentialSpec s;
    s.kind = PotentialKind::scaled;
    s.factor = factor;
    s.children = {std::move(child)};
    return s;
}

bool PotentialSpec::operator==(const PotentialSpec& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case PotentialKind::constant: return q0 == o.q0;
        case PotentialKind::step: return left == o.left && right == o.right && at == o.at;
        case PotentialKind::piecewise_constant:
            return breakpoints == o.breakpoints && values == o.values && left == o.left && right == o.right;
        case PotentialKind::staircase5: return true;
        case PotentialKind::powcos: return alpha == o.alpha && beta == o.beta;
        case PotentialKind::sum: return children == o.children;
        case PotentialKind::scaled: return factor == o.factor && children == o.children;
    }
    return false;
}

void validate(const PotentialSpec& s) {
    switch (s.kind) {
        case PotentialKind::constant:
            require_finite(s.q0, "q0");
            if (s.q0 < 0) throw InvalidSpec("constant potential must have q0 >= 0");
            return;
        case PotentialKind::step:
            require_finite(s.left, "left");
            require_finite(s.right, "right");
            require_finite(s.at, "at");
            if (s.left < 0 || s.right < 0) throw InvalidSpec("step values must be >= 0");
            return;
        case PotentialKind::piecewise_constant: {
            if (s.breakpoints.empty()) throw InvalidSpec("piecewise_constant needs at least one breakpoint");
            if (s.values.size() + 1 != s.breakpoints.size()) {
                std::ostringstream msg;
                msg << "piecewise_constant needs " << s.breakpoints.size() - 1 << " interior values, got "
                    << s.values.size();
                throw InvalidSpec(msg.str());
            }
            for (double b : s.breakpoints) require_finite(b, "breakpoint");
            for (std::size_t i = 1; i < s.breakpoints.size(); ++i) {
                if (!(s.breakpoints[i] > s.breakpoints[i - 1]))
                    throw InvalidSpec("piecewise_constant breakpoints must be strictly increasing");
            }
            for (double v : s.values) {
                require_finite(v, "value");
                if (v < 0) throw InvalidSpec("piecewise_constant values must be >= 0");
            }
            require_finite(s.left, "left");
            require_finite(s.right, "right");
            if (s.left < 0 || s.right < 0) throw InvalidSpec("tail values must be >= 0");
            return;
        }
        case PotentialKind::staircase5:
            return;
        case PotentialKind::powcos:
            require_finite(s.alpha, "alpha");
            require_finite(s.beta, "beta");
            return;
        case PotentialKind::sum:
            if (s.children.size() != 2) throw InvalidSpec("sum needs exactly two terms");
            validate(s.children[0]);
            validate(s.children[1]);
            return;
        case PotentialKind::scaled:
            if (s.children.size() != 1) throw InvalidSpec("scaled needs exactly one child");
            require_finite(s.factor, "factor");
            if (!(s.factor > 0)) throw InvalidSpec("scaled factor must be > 0");
            validate(s.children[0]);
            return;
    }
    throw InvalidSpec("unknown potential kind");
}

double staircase_level(int n) {
    const double dn = static_cast<double>(n);
    return std::exp(dn * std::log1p(1.0 / dn));
}

Potential::Potential(PotentialSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    root_ = detail::build(spec_);
}

Parity Potential::parity() const { return root_->even() ? Parity::even : Parity::unknown; }

AntiderivativeKind Potential::antiderivative_kind() const {
    return root_->piecewise_constant() ? AntiderivativeKind::closed_form : AntiderivativeKind::quadrature;
}

bool Potential::is_piecewise_constant() const { return root_->piecewise_constant(); }

double Potential::eval(double x) const { return root_->eval(x); }

double Potential::integrate(double a, double b, double tol) const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw NonFiniteInput("integration limits must be finite");
    if (a == b) return 0.0;
    return root_->integrate(a, b, tol);
}

double Potential::integrate_affine(double a, double b, double wa, double wb, double tol) const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw NonFiniteInput("integration limits must be finite");
    if (a == b) return 0.0;
    if (b < a) return -root_->integrate_affine(b, a, wb, wa, tol);
    return root_->integrate_affine(a, b, wa, wb, tol);
}

namespace {
void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace

std::vector<double> Potential::breakpoints(double a, double b) const {
    std::vector<double> out;
    root_->breakpoints(a, b, out);
    sort_unique(out);
    return out;
}

std::vector<double> Potential::panel_points(double a, double b) const {
    std::vector<double> out;
    root_->panel_points(a, b, out);
    sort_unique(out);
    return out;
}

double Potential::oscillation_panel_count(double a, double b) const { return root_->panel_count(a, b); }

std::optional<Decomposition> Potential::decompose() const {
    if (spec_.kind == PotentialKind::constant) {
        const double q0 = spec_.q0;
        Decomposition d;
        d.q1 = [q0](double) { return q0; };
        d.dq1 = [](double) { return 0.0; };
        d.d2q1 = [](double) { return 0.0; };
        d.q2 = [](double) { return 0.0; };
        d.integrate_q2 = [](double, double, double) { return 0.0; };
        return d;
    }
    if (spec_.kind == PotentialKind::powcos) {
        auto node = std::make_shared<detail::PowCosNode>(spec_.alpha, spec_.beta);
        const double al = spec_.alpha;
        Decomposition d;
        d.q1 = [node](double x) {
            const double t = std::abs(x);
            return t < 1.0 ? 1.0 : node->power(t);
        };
        d.dq1 = [al](double x) {
            const double t = std::abs(x);
            if (t < 1.0) return 0.0;
            return std::copysign(al * std::pow(t, al - 1.0), x);
        };
        d.d2q1 = [al](double x) {
            const double t = std::abs(x);
            if (t < 1.0) return 0.0;
            return al * (al - 1.0) * std::pow(t, al - 2.0);
        };
        d.q2 = [node](double x) {
            const double t = std::abs(x);
            return t < 1.0 ? 0.0 : node->oscill(t);
        };
        d.integrate_q2 = [node](double a, double b, double tol) {
            if (!std::isfinite(a) || !std::isfinite(b)) throw NonFiniteInput("integration limits must be finite");
            double sign = 1.0;
            if (b < a) {
                std::swap(a, b);
                sign = -1.0;
            }
            double acc = 0.0;
            if (a < -1.0) acc += node->pos_oscillatory(std::max(1.0, -b), -a, tol);
            if (b > 1.0) acc += node->pos_oscillatory(std::max(1.0, a), b, tol);
            return sign * acc;
        };
        return d;
    }
    return std::nullopt;
}

double eval_q(const Potential& p, double x) { return p.eval(x); }

double integrate_q(const Potential& p, double a, double b, double tol) { return p.integrate(a, b, tol); }

std::optional<Decomposition> decompose(const Potential& p) { return p.decompose(); }

}  // namespace otelbaev
