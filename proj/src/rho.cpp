#include "otelbaev/rho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "otelbaev/error.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/parallel.hpp"
#include "otelbaev/quadrature.hpp"

namespace otelbaev {

namespace {

constexpr double kBlowUp = 1e8;

std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    if (n > 1) g.back() = b;
    return g;
}

double min_d_on(const Potential& p, double lo, double hi, int n) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::min(m, solve_d(p, lo + (hi - lo) * i / (n - 1)).d);
    return m;
}

ode::Result<1> riccati_sweep(const Potential& p, double from, double seed, double to, const ode::Options& opt) {
    auto rhs = [&p](double x, const ode::Vec<1>& w) { return ode::Vec<1>{p.eval(x) - w[0] * w[0]}; };
    auto stop = [](double, const ode::Vec<1>& w) { return !(std::abs(w[0]) < kBlowUp); };
    auto res = ode::integrate<1>(rhs, from, {seed}, to, opt, stop);
    if (res.termination == ode::Termination::stopped) {
        std::ostringstream msg;
        msg << "extremal sweep from x=" << from << " diverged at x=" << res.x_end;
        throw BlowUp(msg.str(), res.x_end);
    }
    return res;
}

// Sweeps onto [lo, hi] from padded ends; the pad is refined once with d at the first pad ends.
RhoPiece sweep_window(const Potential& p, double lo, double hi, const SolverConfig& cfg, RhoMeta& meta) {
    const double d_lo = solve_d(p, lo).d;
    const double d_hi = solve_d(p, hi).d;
    const double pad0 = cfg.padding_factor * std::max(d_lo, d_hi);
    const double pad = cfg.padding_factor *
                       std::max({d_lo, d_hi, solve_d(p, lo - pad0).d, solve_d(p, hi + pad0).d});
    const double xl = lo - pad;
    const double xr = hi + pad;
    const double dl = solve_d(p, xl).d;
    const double dr = solve_d(p, xr).d;

    ode::Options opt;
    opt.rtol = cfg.rel_tol;
    opt.atol = 1e-3 * cfg.rel_tol * std::min(1.0 / dl, 1.0 / dr);
    opt.max_step = cfg.max_step_factor * std::min({dl, dr, min_d_on(p, xl, xr, 33)});
    opt.breakpoints = p.breakpoints(xl, xr);
    opt.dense_lo = lo;
    opt.dense_hi = hi;

    RhoPiece piece;
    piece.lo = lo;
    piece.hi = hi;
    piece.padding = pad;
    parallel_for(2, [&](std::size_t which) {
        if (which == 0) {
            auto r = riccati_sweep(p, xl, 1.0 / dl, hi, opt);
            piece.y2 = std::move(r.dense);
            piece.error_budget_y2 = r.error_budget;
        } else {
            auto r = riccati_sweep(p, xr, -1.0 / dr, lo, opt);
            piece.y1 = std::move(r.dense);
            piece.error_budget_y1 = r.error_budget;
        }
    });
    meta.padding = std::max(meta.padding, pad);
    meta.error_budget = std::max({meta.error_budget, piece.error_budget_y1, piece.error_budget_y2});
    meta.seed_left_x = xl;
    meta.seed_left = 1.0 / dl;
    meta.seed_right_x = xr;
    meta.seed_right = -1.0 / dr;
    return piece;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(padding_factor > 0 && rel_tol > 0 && max_step_factor > 0 && local_panel_limit > 0 &&
          local_half_width > 0 && grid_n >= 2))
        throw InvalidParams("solver configuration values must be positive (grid_n >= 2)");
}

RhoProfile::RhoProfile(Potential p, double a_, double b_, std::vector<RhoPiece> pieces)
    : a(a_), b(b_), p_(std::move(p)), pieces_(std::make_shared<const std::vector<RhoPiece>>(std::move(pieces))) {}

bool RhoProfile::covers(double x) const {
    return std::any_of(pieces_->begin(), pieces_->end(), [x](const RhoPiece& s) { return x >= s.lo && x <= s.hi; });
}

const RhoPiece& RhoProfile::piece_at(double x) const {
    const RhoPiece* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& s : *pieces_) {
        if (x < s.lo || x > s.hi) continue;
        const double dist = std::abs(x - 0.5 * (s.lo + s.hi));
        if (dist < best_dist) {
            best = &s;
            best_dist = dist;
        }
    }
    if (!best) {
        std::ostringstream msg;
        msg << "x=" << x << " is not covered by the rho profile";
        throw WindowOutOfRange(msg.str());
    }
    return *best;
}

double RhoProfile::y1_at(double x) const { return piece_at(x).y1(x)[0]; }
double RhoProfile::y2_at(double x) const { return piece_at(x).y2(x)[0]; }

double RhoProfile::rho_at(double x) const {
    const RhoPiece& s = piece_at(x);
    return 1.0 / (s.y2(x)[0] - s.y1(x)[0]);
}

double RhoProfile::rho_prime_at(double x) const {
    const RhoPiece& s = piece_at(x);
    const double w1 = s.y1(x)[0];
    const double w2 = s.y2(x)[0];
    return (w1 + w2) / (w2 - w1);
}

RhoProfile extremal_solutions(const Potential& p, double a, double b, const SolverConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(a) || !std::isfinite(b)) throw NonFiniteInput("window ends must be finite");
    if (!(b > a)) throw InvalidParams("window must satisfy a < b");
    RhoMeta meta;
    meta.rel_tol = cfg.rel_tol;
    const std::vector<double> grid = uniform_grid(a, b, cfg.grid_n);

    // Rough pad just for the size decision.
    const double pad_guess = cfg.padding_factor * std::max(solve_d(p, a).d, solve_d(p, b).d);
    const bool local = p.oscillation_panel_count(a - pad_guess, b + pad_guess) > cfg.local_panel_limit;
    std::vector<RhoPiece> pieces;
    if (!local) {
        pieces.push_back(sweep_window(p, a, b, cfg, meta));
    } else {
        meta.local = true;
        pieces.resize(grid.size());
        std::vector<RhoMeta> metas(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            const double half = cfg.local_half_width * solve_d(p, grid[i]).d;
            metas[i].rel_tol = cfg.rel_tol;
            pieces[i] = sweep_window(p, grid[i] - half, grid[i] + half, cfg, metas[i]);
        });
        // Seeds of the first piece are reported.
        meta.seed_left_x = metas.front().seed_left_x;
        meta.seed_left = metas.front().seed_left;
        meta.seed_right_x = metas.front().seed_right_x;
        meta.seed_right = metas.front().seed_right;
        for (const auto& m : metas) {
            meta.padding = std::max(meta.padding, m.padding);
            meta.error_budget = std::max(meta.error_budget, m.error_budget);
        }
    }
    RhoProfile prof(p, a, b, std::move(pieces));
    prof.meta = meta;
    prof.grid = grid;
    prof.y1.reserve(grid.size());
    prof.y2.reserve(grid.size());
    for (double x : grid) {
        const RhoPiece& s = prof.piece_at(x);
        prof.y1.push_back(s.y1(x)[0]);
        prof.y2.push_back(s.y2(x)[0]);
    }
    return prof;
}

RhoProfile rho_profile(const Potential& p, double a, double b, const SolverConfig& cfg) {
    RhoProfile prof = extremal_solutions(p, a, b, cfg);
    prof.rho.resize(prof.grid.size());
    prof.rho_prime.resize(prof.grid.size());
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        prof.rho[i] = 1.0 / (prof.y2[i] - prof.y1[i]);
        prof.rho_prime[i] = (prof.y2[i] + prof.y1[i]) * prof.rho[i];
    }
    return prof;
}

double Pfss::half_integral(double x) const {
    if (x < lo || x > hi) {
        std::ostringstream msg;
        msg << "x=" << x << " outside the reconstructed range";
        throw WindowOutOfRange(msg.str());
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    const std::size_t k = std::min(i, grid.size() - 2);
    auto inv = [this](double t) { return 1.0 / profile_->rho_at(t); };
    return 0.5 * (cum_[k] + quad::gk15(inv, grid[k], x).value);
}

double Pfss::u_at(double x) const {
    if (x == x0) return std::sqrt(profile_->rho_at(x));
    return std::sqrt(profile_->rho_at(x)) * std::exp(-half_integral(x));
}
double Pfss::v_at(double x) const {
    if (x == x0) return std::sqrt(profile_->rho_at(x));
    return std::sqrt(profile_->rho_at(x)) * std::exp(half_integral(x));
}
double Pfss::up_at(double x) const { return profile_->y1_at(x) * u_at(x); }
double Pfss::vp_at(double x) const { return profile_->y2_at(x) * v_at(x); }

Pfss reconstruct_pfss(const RhoProfile& profile, double x0, double lo, double hi) {
    if (!(lo <= x0 && x0 <= hi) || !(hi > lo)) throw InvalidParams("reconstruct_pfss needs lo <= x0 <= hi, lo < hi");
    const RhoPiece& piece = profile.piece_at(x0);
    if (lo < piece.lo || hi > piece.hi) throw WindowOutOfRange("reconstruction range leaves the profile piece");
    auto shared = std::make_shared<const RhoProfile>(profile);
    auto inv = [&shared](double t) { return 1.0 / shared->rho_at(t); };

    constexpr double kWronskianTol = 1e-6;
    constexpr int kMaxLevels = 14;
    int n = 257;
    Pfss out;
    out.x0 = x0;
    out.lo = lo;
    out.hi = hi;
    out.profile_ = shared;
    for (int level = 0; level < kMaxLevels; ++level, n = 2 * n - 1) {
        const std::vector<double> g = uniform_grid(lo, hi, n);
        std::vector<double> cum(g.size(), 0.0);
        for (std::size_t i = 1; i < g.size(); ++i) cum[i] = cum[i - 1] + quad::gk15(inv, g[i - 1], g[i]).value;
        const auto k0 = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(g.begin(), g.end(), x0) - g.begin() - 1,
                                     static_cast<std::ptrdiff_t>(g.size()) - 2));
        const double at_x0 = cum[k0] + quad::gk15(inv, g[k0], x0).value;
        for (double& c : cum) c -= at_x0;

        out.grid = g;
        out.cum_ = cum;
        out.u.resize(g.size());
        out.v.resize(g.size());
        out.up.resize(g.size());
        out.vp.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = shared->rho_at(g[i]);
            const double s = std::sqrt(r);
            out.u[i] = s * std::exp(-0.5 * cum[i]);
            out.v[i] = s * std::exp(0.5 * cum[i]);
            out.up[i] = shared->y1_at(g[i]) * out.u[i];
            out.vp[i] = shared->y2_at(g[i]) * out.v[i];
        }
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            const double du = (out.u[i + 1] - out.u[i - 1]) / (g[i + 1] - g[i - 1]);
            const double dv = (out.v[i + 1] - out.v[i - 1]) / (g[i + 1] - g[i - 1]);
            worst = std::max(worst, std::abs(dv * out.u[i] - du * out.v[i] - 1.0));
        }
        out.wronskian_residual = worst;
        if (worst <= kWronskianTol) return out;
    }
    std::ostringstream msg;
    msg << "Wronskian residual " << out.wronskian_residual << " after " << out.grid.size() << " grid points";
    throw GridTooCoarse(msg.str());
}

Pfss reconstruct_pfss(const RhoProfile& profile, double x0) {
    const RhoPiece& piece = profile.piece_at(x0);
    return reconstruct_pfss(profile, x0, piece.lo, piece.hi);
}

double sup_rho_prime(const RhoProfile& profile, double x) {
    const double d = solve_d(profile.potential(), x).d;
    const double lo = x - d;
    const double hi = x + d;
    const RhoPiece& piece = profile.piece_at(x);
    if (lo < piece.lo || hi > piece.hi) throw WindowOutOfRange("[x-d, x+d] leaves the rho profile");
    std::vector<double> s = uniform_grid(lo, hi, 65);
    for (double g : profile.grid) {
        if (g > lo && g < hi) s.push_back(g);
    }
    std::sort(s.begin(), s.end());
    auto f = [&](double t) { return std::abs(profile.rho_prime_at(t)); };
    std::size_t k = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = f(s[i]);
        if (v > best) {
            best = v;
            k = i;
        }
    }
    // Golden-section polish between the neighbours of the best sample.
    double l = s[k == 0 ? 0 : k - 1];
    double r = s[std::min(k + 1, s.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = r - g * (r - l);
    double e = l + g * (r - l);
    double fc = f(c);
    double fe = f(e);
    for (int it = 0; it < 60 && r - l > 1e-14 * std::max(1.0, std::abs(x)); ++it) {
        if (fc > fe) {
            r = e;
            e = c;
            fe = fc;
            c = r - g * (r - l);
            fc = f(c);
        } else {
            l = c;
            c = e;
            fc = fe;
            e = l + g * (r - l);
            fe = f(e);
        }
    }
    return std::max({best, fc, fe});
}

LogRatioIdentity check_log_ratio_identity(const RhoProfile& profile, double x) {
    const Potential& p = profile.potential();
    const double d = solve_d(p, x).d;
    const double lo = x - d;
    const double hi = x + d;
    const RhoPiece& piece = profile.piece_at(x);
    if (lo < piece.lo || hi > piece.hi) throw WindowOutOfRange("[x-d, x+d] leaves the rho profile");
    const double rp_hi = profile.rho_prime_at(hi);
    const double rp_lo = profile.rho_prime_at(lo);
    LogRatioIdentity out;
    out.lhs = (1.0 + rp_hi) / (1.0 - rp_hi) * (1.0 - rp_lo) / (1.0 + rp_lo);

    std::vector<double> pts{lo};
    for (double t : p.panel_points(lo, hi)) pts.push_back(t);
    pts.push_back(hi);
    auto weighted = [&](double t) {
        const double rp = profile.rho_prime_at(t);
        return p.eval(t) * profile.rho_at(t) / (1.0 - rp * rp);
    };
    auto inv = [&](double t) { return 1.0 / profile.rho_at(t); };
    // The dense interpolant is only good to about rel_tol, so asking for more just subdivides noise.
    const double tol = std::max(1e-9, profile.meta.rel_tol);
    const double i1 = quad::integrate_panels(weighted, pts, tol, 12).value;
    const double i2 = quad::integrate_panels(inv, pts, tol, 12).value;
    out.rhs = std::exp(4.0 * i1 - i2);
    return out;
}

CauchyCheck check_cauchy_representation(const RhoProfile& profile, double x, double span) {
    if (!(span > 0)) throw InvalidParams("span must be positive");
    const Potential& p = profile.potential();
    const Pfss pf = reconstruct_pfss(profile, x, x - span, x + span);
    const double vpx = pf.vp_at(x);
    const double upx = pf.up_at(x);

    ode::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.breakpoints = p.breakpoints(x - span, x + span);
    opt.max_step = 0.25 * span;
    auto rhs = [&p](double t, const ode::Vec<2>& y) { return ode::Vec<2>{y[1], p.eval(t) * y[0]}; };
    const auto fwd = ode::integrate<2>(rhs, x, {1.0, 0.0}, x + span, opt);
    const auto bwd = ode::integrate<2>(rhs, x, {1.0, 0.0}, x - span, opt);

    constexpr int kSide = 100;
    CauchyCheck out;
    out.sign_pattern = true;
    double dev = 0.0;
    double slope_scale = 0.0;
    std::vector<std::pair<double, double>> slopes;
    for (int side = -1; side <= 1; side += 2) {
        const auto& ref = side > 0 ? fwd.dense : bwd.dense;
        for (int i = 0; i <= kSide; ++i) {
            const double t = x + side * span * i / kSide;
            const double y = vpx * pf.u_at(t) - upx * pf.v_at(t);
            const double yp = vpx * pf.up_at(t) - upx * pf.vp_at(t);
            dev = std::max(dev, std::abs(y - ref(t)[0]));
            slope_scale = std::max(slope_scale, std::abs(yp));
            slopes.emplace_back(t - x, yp);
            ++out.samples;
        }
    }
    const double slack = 1e-9 * std::max(1.0, slope_scale);
    for (const auto& [off, yp] : slopes) {
        if (off < 0 && yp > slack) out.sign_pattern = false;
        if (off > 0 && yp < -slack) out.sign_pattern = false;
    }
    out.max_abs_deviation = dev;
    return out;
}

}  // namespace otelbaev
