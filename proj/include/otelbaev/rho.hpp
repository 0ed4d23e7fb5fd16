#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "otelbaev/ode.hpp"
#include "otelbaev/potential.hpp"

namespace otelbaev {

struct SolverConfig {
    /// Pad length on each side of a window, in units of the local d.
    double padding_factor = 40.0;
    double rel_tol = 1e-9;
    /// Integrator step cap, in units of the smallest d seen on the padded window.
    double max_step_factor = 0.25;
    int grid_n = 201;
    /// Above this many oscillation panels on the padded window the sweeps are run per grid point.
    double local_panel_limit = 1e5;
    /// Half-width of a per-point piece, in units of d at the point.
    double local_half_width = 3.0;

    void validate() const;
};

struct RhoMeta {
    double padding = 0.0;
    double rel_tol = 0.0;
    double seed_left_x = 0.0;
    double seed_left = 0.0;
    double seed_right_x = 0.0;
    double seed_right = 0.0;
    /// Largest error budget reported by any sweep.
    double error_budget = 0.0;
    bool local = false;
};

/// Dense extremal solutions on [lo, hi]; y2 from the forward sweep, y1 from the backward one.
struct RhoPiece {
    double lo = 0.0;
    double hi = 0.0;
    ode::DenseSolution<1> y2;
    ode::DenseSolution<1> y1;
    double padding = 0.0;
    double error_budget_y2 = 0.0;
    double error_budget_y1 = 0.0;
};

class RhoProfile {
public:
    RhoProfile(Potential p, double a, double b, std::vector<RhoPiece> pieces);

    double a = 0.0;
    double b = 0.0;
    std::vector<double> grid;
    std::vector<double> y1;
    std::vector<double> y2;
    /// Empty until filled by rho_profile.
    std::vector<double> rho;
    std::vector<double> rho_prime;
    RhoMeta meta;

    const Potential& potential() const { return p_; }
    const std::vector<RhoPiece>& pieces() const { return *pieces_; }

    bool covers(double x) const;
    /// The piece holding x (nearest centre when pieces overlap); WindowOutOfRange if none.
    const RhoPiece& piece_at(double x) const;

    double y1_at(double x) const;
    double y2_at(double x) const;
    double rho_at(double x) const;
    double rho_prime_at(double x) const;

private:
    Potential p_;
    std::shared_ptr<const std::vector<RhoPiece>> pieces_;
};

/// y1 = u'/u and y2 = v'/v on [a,b] by seeded Riccati sweeps from padded ends.
RhoProfile extremal_solutions(const Potential& p, double a, double b, const SolverConfig& cfg = {});

/// extremal_solutions plus rho = 1/(y2-y1) and rho' = (y1+y2) rho on the grid.
RhoProfile rho_profile(const Potential& p, double a, double b, const SolverConfig& cfg = {});

/// u, v rebuilt from rho alone, normalized so u(x0) = v(x0) = sqrt(rho(x0)).
class Pfss {
public:
    double x0 = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> grid;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> up;
    std::vector<double> vp;
    /// max |v'u - u'v - 1| with central differences on the final grid.
    double wronskian_residual = 0.0;

    double u_at(double x) const;
    double v_at(double x) const;
    double up_at(double x) const;
    double vp_at(double x) const;

private:
    friend Pfss reconstruct_pfss(const RhoProfile&, double, double, double);
    std::shared_ptr<const RhoProfile> profile_;
    /// Integral of 1/rho from x0 to each grid point.
    std::vector<double> cum_;
    double half_integral(double x) const;
};

/// Reconstruction on [lo, hi] (default: the whole piece holding x0). The grid is doubled until the
/// finite-difference Wronskian is within 1e-6 of 1, else GridTooCoarse.
Pfss reconstruct_pfss(const RhoProfile& profile, double x0, double lo, double hi);
Pfss reconstruct_pfss(const RhoProfile& profile, double x0);

/// sup of |rho'| over [x-d(x), x+d(x)].
double sup_rho_prime(const RhoProfile& profile, double x);

struct LogRatioIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the identity relating rho' at the ends of [x-d, x+d] to integrals of
/// q rho/(1-rho'^2) and 1/rho over that interval.
LogRatioIdentity check_log_ratio_identity(const RhoProfile& profile, double x);

struct CauchyCheck {
    double max_abs_deviation = 0.0;
    /// y' <= 0 left of x and y' >= 0 right of x.
    bool sign_pattern = false;
    int samples = 0;
};

/// Compares y(t) = v'(x)u(t) - u'(x)v(t) with a direct solve of y'' = q y, y(x)=1, y'(x)=0.
CauchyCheck check_cauchy_representation(const RhoProfile& profile, double x, double span);

}  // namespace otelbaev
