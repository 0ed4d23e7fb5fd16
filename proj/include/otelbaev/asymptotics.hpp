#pragma once

#include <optional>
#include <vector>

#include "otelbaev/classh.hpp"
#include "otelbaev/potential.hpp"
#include "otelbaev/rho.hpp"

namespace otelbaev {

struct EpsilonOptions {
    SolverConfig rho;
    /// When set, beta and eta2 bounds are attached using constants measured on the same grid.
    std::optional<KFunction> k;
    double c_exp = 1.0;
    Eta2Exponent eta2_variant = Eta2Exponent::proof;
};

struct AsymptoticsReport {
    std::vector<double> grid;
    std::vector<double> d;
    std::vector<double> rho;
    std::vector<double> rho_prime;
    /// 2 rho / d - 1.
    std::vector<double> epsilon;
    std::vector<double> bound_beta;
    std::vector<double> bound_eta2;
    /// Smallest c with |eps| <= c beta on the grid (NaN without a k function).
    double fitted_c = 0.0;
    /// max of beta sqrt(k) on the grid; the bound predicts it stays O(1).
    double beta_sqrt_k = 0.0;
    double c1_hat = 0.0;
    double c3_hat = 0.0;
    /// First grid point with |rho'| <= 1e-3, NaN when none.
    double first_small_rho_prime = 0.0;
    /// max |eps| over the outer half of the grid <= max over the inner half.
    bool pass_decay = false;
    /// fitted_c finite and |eps|/beta shows no growth (only meaningful with a k function).
    bool pass_beta_bound = false;
    bool pass_beta_shape = false;
};

AsymptoticsReport epsilon_profile(const Potential& p, double a, double b, const EpsilonOptions& opt = {});

struct EtaBoundRow {
    double x = 0.0;
    double abs_rho_prime = 0.0;
    double eta1 = 0.0;
    double abs_epsilon = 0.0;
    double eta2 = 0.0;
    bool pass = false;
};

struct EtaBoundReport {
    Thresholds thresholds;
    std::vector<EtaBoundRow> rows;
    Eta2Exponent eta2_variant = Eta2Exponent::proof;
    bool pass = false;
};

/// Pointwise |rho'| <= eta1 and |eps| <= eta2 beyond s1, with the constants of `constants`.
/// Throws NotReached when the thresholds do not exist on that grid, WindowOutOfRange when
/// [a,b] reaches inside |x| < s1.
EtaBoundReport check_eta_bounds(const Potential& p, const KFunction& k, double a, double b,
                                const ClassHReport& constants, const SolverConfig& cfg = {},
                                Eta2Exponent variant = Eta2Exponent::proof);

/// q1^(-3/2) sup over t in [0, 2 q1^(-1/2)] of |q1'(x+t) - q1'(x-t)|.
double kappa1(const Decomposition& dec, double x);
/// q1^(-1/2) sup over the same t of |integral of q2 over [x-t, x+t]|.
double kappa2(const Potential& p, double x);
double kappa1(const Potential& p, double x);

struct DAsymptoticsRow {
    double x = 0.0;
    double d = 0.0;
    /// 1/sqrt(q1(x)).
    double predicted = 0.0;
    /// d sqrt(q1) - 1.
    double delta = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    /// 2 (kappa1 + kappa2).
    double bound = 0.0;
    bool pass = false;
};

/// Rounding floor on |delta| at x: 8 eps (1 + |x|/d).
double rounding_slack(double x, double d);

/// Compares d with 1/sqrt(q1) at each x (d solved to 1e-14). Throws Unavailable without a
/// decomposition.
std::vector<DAsymptoticsRow> check_d_asymptotics(const Potential& p, const std::vector<double>& xs);

struct PowCosParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int m0 = 7;
    double gamma0 = 0.0;
};

/// Throws InvalidParams unless alpha > -2 and beta > 1 + alpha/2.
PowCosParams powcos_params(double alpha, double beta);

struct PowCosRow {
    double x = 0.0;
    double d = 0.0;
    double rho = 0.0;
    /// d x^(alpha/2) - 1 and 2 rho x^(alpha/2) - 1.
    double delta = 0.0;
    double epsilon = 0.0;
    double scaled_delta = 0.0;
    double scaled_epsilon = 0.0;
    bool pass_delta = false;
    bool pass_epsilon = false;
};

struct PowCosReport {
    PowCosParams params;
    std::vector<PowCosRow> rows;
    /// Envelope constants: 1.5 x the largest scaled value over the first 5% of the window.
    double c_delta = 0.0;
    double c_epsilon = 0.0;
    std::size_t calibration_rows = 0;
    bool pass = false;
};

/// Envelope check of |delta| <= C/x^gamma and |eps| <= C/x^gamma0 on n points of [a,b] (a > 0).
/// The constants are calibrated on the leftmost 5% of the window: densely sampled for delta,
/// on the rho grid rows there (at least one) for eps.
PowCosReport check_powcos(double alpha, double beta, double a, double b, int n, const SolverConfig& cfg = {});

struct SeparationRow {
    int n = 0;
    double x_n = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double ratio = 0.0;
};

/// alpha(x_n)/beta(x_n) for the staircase with k = sqrt|x|, x_n = n^2 + n + 1/2; the alpha
/// horizon reaches one unit past the next block boundary (n+1)^2.
std::vector<SeparationRow> compare_bounds_staircase(int n_lo, int n_hi, double c_exp = 1.0);

}  // namespace otelbaev
