#pragma once

#include <vector>

#include "otelbaev/potential.hpp"

namespace otelbaev {

/// The slowly growing weight k(x) >= 2 of the class-H conditions.
struct KFunction {
    enum class Kind { constant2, sqrt_abs, powcos_rule, table };
    Kind kind = Kind::constant2;
    /// powcos_rule parameters: k = 2 for |x| <= 2^(m/(alpha+2)), |x|^((alpha+2)/m) beyond.
    double alpha = 2.0;
    double m = 7.0;
    /// table kind: strictly increasing xs, linear interpolation, clamped outside.
    std::vector<double> xs;
    std::vector<double> ks;

    static KFunction constant2();
    /// sqrt|x| for |x| >= 4, else 2.
    static KFunction sqrt_abs();
    static KFunction powcos_rule(double alpha, double m);
    static KFunction table(std::vector<double> xs, std::vector<double> ks);

    double operator()(double x) const;
    /// Throws InvalidParams on a malformed table or parameters giving k < 2.
    void validate() const;
};

const char* to_string(KFunction::Kind kind);

/// sup over z in [0, z_max] of |I(z)|, I(z) = integral over [0,z] of q(x+t) - q(x-t).
/// Kinks from breakpoints are enumerated exactly; smooth parts are sampled on at least
/// `samples` uniform points, refined at oscillation panels in the best cells and polished.
double antisymmetric_sup(const Potential& p, double x, double z_max, int samples = 256);

double phi(const Potential& p, const KFunction& k, double x);
double f_big(const Potential& p, const KFunction& k, double x);

/// Max of F over [lo, hi] sampled at n uniform points plus the breakpoints of q there.
struct SupSample {
    double value = 0.0;
    double argmax = 0.0;
};
SupSample sup_f(const Potential& p, const KFunction& k, double lo, double hi, int n);

/// exp(-sqrt(k(x))/c_exp) + sup of F over [x - d(x), x + d(x)].
double beta(const Potential& p, const KFunction& k, double x, double c_exp = 1.0);

struct AlphaValue {
    double value = 0.0;
    /// The one-sided sup over t >= x - d (t <= x + d for x < 0) stops this far from x.
    double horizon = 0.0;
    double sup_f = 0.0;
    double argmax = 0.0;
};
/// Truncated form of the one-sided bound; horizon <= 0 selects 10 k(x) d(x).
AlphaValue alpha(const Potential& p, const KFunction& k, double x, double c_exp = 1.0, double horizon = 0.0);

/// Which constant multiplies c3 in the exponent of eta2. The theorem statement uses
/// c3 sqrt(c3); the end of its proof arrives at c3 sqrt(c1).
enum class Eta2Exponent { proof, statement };

double eta1_formula(double f, double k, double c3);
double eta2_formula(double sup_f, double k, double c3, double c1, Eta2Exponent variant = Eta2Exponent::proof);

double eta1(const Potential& p, const KFunction& k, double x, double c3);
double eta2(const Potential& p, const KFunction& k, double x, double c3, double c1,
            Eta2Exponent variant = Eta2Exponent::proof);

struct ClassHReport {
    std::vector<double> grid;
    std::vector<double> k;
    std::vector<double> d;
    std::vector<double> phi;
    std::vector<double> f_big;
    /// Per-point k ratio over [x - kd, x + kd] and d ratio over [x - sqrt(k) d, x + sqrt(k) d].
    std::vector<double> k_ratio;
    std::vector<double> d_ratio;
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    double c3_hat = 0.0;
    bool pass_k_floor = false;
    bool pass_k_slow = false;
    bool pass_phi_bounded = false;
    bool pass() const { return pass_k_floor && pass_k_slow && pass_phi_bounded; }
};

/// Samples the class-H quantities on n uniform points of [a,b] (n >= 8).
ClassHReport verify_class_h(const Potential& p, const KFunction& k, double a, double b, int n);

/// No growth trend: max over the outer half of `v` (by |x|) is at most 2x the inner-half max.
bool no_growth(const std::vector<double>& grid, const std::vector<double>& v);

struct Thresholds {
    double s0 = 0.0;
    double s1 = 0.0;
    double sup_d = 0.0;
};
/// Smallest |x| on the report grid beyond which k >= 64 c2^2 and eta1 <= 1e-3 both hold.
/// Throws NotReached when even the outermost grid point fails.
Thresholds thresholds(const ClassHReport& report);

}  // namespace otelbaev
