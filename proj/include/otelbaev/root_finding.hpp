#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otelbaev/error.hpp"

namespace otelbaev {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
};

/// Root of a nondecreasing f on (0, cap] with f(0+) < 0, starting from `seed`.
///
/// The bracket is found by doubling (or halving) the seed; refinement is Illinois
/// regula falsi with a bisection fallback and never leaves the bracket. Stops when
/// |f| <= ftol or the bracket width is <= xtol * x.
template <class F>
RootResult solve_increasing(const F& f, double seed, double xtol, double ftol, double cap = 1e6) {
    RootResult r;
    auto call = [&](double x) {
        ++r.evaluations;
        return f(x);
    };
    if (!(seed > 0) || !std::isfinite(seed)) seed = 1.0;
    seed = std::min(seed, cap);
    double lo = seed;
    double hi = seed;
    double flo = call(lo);
    double fhi = flo;
    if (flo == 0.0) return {lo, 0.0, r.evaluations};
    if (flo < 0.0) {
        for (;;) {
            if (hi >= cap) {
                std::ostringstream msg;
                msg << "no sign change below the cap " << cap << " (f(cap)=" << fhi << ")";
                throw BracketFailure(msg.str());
            }
            lo = hi;
            flo = fhi;
            hi = std::min(2.0 * hi, cap);
            fhi = call(hi);
            if (fhi >= 0.0) break;
        }
    } else {
        for (;;) {
            hi = lo;
            fhi = flo;
            lo = 0.5 * lo;
            if (lo < 1e-300) throw BracketFailure("no sign change above zero");
            flo = call(lo);
            if (flo <= 0.0) break;
        }
    }
    if (flo == 0.0) return {lo, 0.0, r.evaluations};
    if (fhi == 0.0) return {hi, 0.0, r.evaluations};

    int side = 0;
    double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
    double fbest = std::abs(flo) < std::abs(fhi) ? flo : fhi;
    for (int it = 0; it < 300; ++it) {
        const double width = hi - lo;
        if (std::abs(fbest) <= ftol || width <= xtol * best) break;
        double x = lo - flo * width / (fhi - flo);
        // Every third step, or when regula falsi stalls at an end, bisect.
        if (!(x > lo && x < hi) || it % 3 == 2) x = lo + 0.5 * width;
        const double fx = call(x);
        if (std::abs(fx) < std::abs(fbest)) {
            best = x;
            fbest = fx;
        }
        if (fx == 0.0) break;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
    }
    r.x = best;
    r.fx = fbest;
    return r;
}

}  // namespace otelbaev
