#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace otelbaev {

/// Default absolute-or-relative tolerance for integrals of q.
inline constexpr double kDefaultQuadTol = 1e-12;

enum class PotentialKind { constant, step, piecewise_constant, staircase5, powcos, sum, scaled };

std::string_view to_string(PotentialKind kind);
std::optional<PotentialKind> potential_kind_from_string(std::string_view name);

/// Serializable description of a potential q(x) >= 0.
///
/// Only the fields of the selected kind are meaningful:
///  - constant:            q0
///  - step:                left (x < at), right (x >= at), at
///  - piecewise_constant:  breakpoints b_0 < ... < b_m, values[i] on [b_i, b_{i+1}),
///                         left tail on x < b_0, right tail on x >= b_m
///  - staircase5:          no parameters; q = (1+1/n)^n on [n^2,(n+1)^2), 2 on [0,1), even
///  - powcos:              alpha, beta; q = 1 on |x| < 1, |x|^alpha (1 + cos|x|^beta) otherwise
///  - sum:                 children[0] + children[1]
///  - scaled:              factor * children[0]
struct PotentialSpec {
    PotentialKind kind = PotentialKind::constant;
    double q0 = 0.0;
    double left = 0.0;
    double right = 0.0;
    double at = 0.0;
    std::vector<double> breakpoints;
    std::vector<double> values;
    double alpha = 0.0;
    double beta = 0.0;
    double factor = 1.0;
    std::vector<PotentialSpec> children;

    static PotentialSpec constant(double q0);
    static PotentialSpec step(double left, double right, double at);
    static PotentialSpec piecewise_constant(std::vector<double> breakpoints, std::vector<double> values,
                                            double left, double right);
    static PotentialSpec staircase5();
    static PotentialSpec powcos(double alpha, double beta);
    static PotentialSpec sum(PotentialSpec a, PotentialSpec b);
    static PotentialSpec scaled(PotentialSpec child, double factor);

    bool operator==(const PotentialSpec& other) const;
};

/// Throws InvalidSpec when parameters are malformed or would make q negative.
void validate(const PotentialSpec& spec);

enum class Parity { even, unknown };
enum class AntiderivativeKind { closed_form, quadrature };

/// Smooth/rough split q = q1 + q2 used by the large-|x| asymptotics of d.
struct Decomposition {
    std::function<double(double)> q1;
    std::function<double(double)> dq1;
    std::function<double(double)> d2q1;
    std::function<double(double)> q2;
    /// Integral of q2 over [a,b] at the given absolute-or-relative tolerance.
    std::function<double(double, double, double)> integrate_q2;
};

namespace detail {
struct Node;
}

/// Evaluable, immutable form of a PotentialSpec. Cheap to copy; safe to share across threads.
class Potential {
public:
    explicit Potential(PotentialSpec spec);

    const PotentialSpec& spec() const { return spec_; }
    Parity parity() const;
    AntiderivativeKind antiderivative_kind() const;
    bool is_piecewise_constant() const;

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// Integral of q over [a,b]; throws NonFiniteInput for non-finite limits.
    double integrate(double a, double b, double tol = kDefaultQuadTol) const;

    /// Integral of q(t) w(t) over [a,b] where w is affine with w(a)=wa, w(b)=wb.
    double integrate_affine(double a, double b, double wa, double wb, double tol = kDefaultQuadTol) const;

    /// Jump discontinuities of q inside [a,b], sorted.
    std::vector<double> breakpoints(double a, double b) const;

    /// Breakpoints plus the ends of the oscillation panels (each at most 1/8 of the local
    /// period of the cosine factor) inside [a,b], sorted and unique.
    std::vector<double> panel_points(double a, double b) const;

    /// Number of oscillation panels in [a,b] without materializing them.
    double oscillation_panel_count(double a, double b) const;

    std::optional<Decomposition> decompose() const;

private:
    PotentialSpec spec_;
    std::shared_ptr<const detail::Node> root_;
};

double eval_q(const Potential& p, double x);
double integrate_q(const Potential& p, double a, double b, double tol = kDefaultQuadTol);
std::optional<Decomposition> decompose(const Potential& p);

/// q_n = (1 + 1/n)^n, the staircase level on [n^2, (n+1)^2).
double staircase_level(int n);

}  // namespace otelbaev
