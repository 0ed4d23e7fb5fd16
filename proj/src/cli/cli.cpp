#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "otelbaev/asymptotics.hpp"
#include "otelbaev/classh.hpp"
#include "otelbaev/cli.hpp"
#include "otelbaev/error.hpp"
#include "otelbaev/otelbaev.hpp"
#include "otelbaev/parallel.hpp"
#include "otelbaev/potential_json.hpp"
#include "otelbaev/rho.hpp"
#include "otelbaev/riccati.hpp"

namespace otelbaev::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Bad flags, files or values: exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// "@path", a bare path, or inline JSON.
json json_argument(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ConfigError("empty JSON argument");
    std::string body;
    if (text[first] == '@') {
        body = read_file(text.substr(first + 1));
    } else if (text[first] == '{' || text[first] == '[' || text[first] == '"') {
        body = text;
    } else {
        body = read_file(text);
    }
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void RunConfig::validate() const {
    if (window && !(window->first < window->second)) throw InvalidParams("window must satisfy a < b");
    if (grid_n < 2) throw InvalidParams("grid_n must be at least 2");
    if (!(d_tol > 0) || !(rel_tol > 0) || !(padding_factor > 0)) throw InvalidParams("tolerances must be positive");
    if (!(c_exp > 0)) throw InvalidParams("c_exp must be positive");
    if (!(horizon >= 0)) throw InvalidParams("horizon must be nonnegative");
    if (format != "csv" && format != "json") throw InvalidParams("format must be csv or json");
}

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        if (j.contains("potential")) c.potential = spec_from_json(j.at("potential"));
        if (j.contains("window")) {
            const auto w = j.at("window").get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("window needs two numbers");
            c.window = std::pair{w[0], w[1]};
        }
        if (j.contains("grid_n")) c.grid_n = j.at("grid_n").get<int>();
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            if (t.contains("d")) c.d_tol = t.at("d").get<double>();
            if (t.contains("rel")) c.rel_tol = t.at("rel").get<double>();
            if (t.contains("padding")) c.padding_factor = t.at("padding").get<double>();
        }
        if (j.contains("k")) c.k = j.at("k");
        if (j.contains("c_exp")) c.c_exp = j.at("c_exp").get<double>();
        if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
        if (j.contains("output")) {
            const auto& o = j.at("output");
            if (o.contains("path")) c.output = o.at("path").get<std::string>();
            if (o.contains("format")) c.format = o.at("format").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    if (c.potential) j["potential"] = spec_to_json(*c.potential);
    if (c.window) j["window"] = {c.window->first, c.window->second};
    j["grid_n"] = c.grid_n;
    j["tolerances"] = {{"d", c.d_tol}, {"rel", c.rel_tol}, {"padding", c.padding_factor}};
    if (c.k) j["k"] = *c.k;
    j["c_exp"] = c.c_exp;
    j["horizon"] = c.horizon;
    j["output"] = {{"path", c.output}, {"format", c.format}};
    return j;
}

KFunction k_function_from_json(const json& j) {
    KFunction k;
    try {
        const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
        if (kind == "constant2") {
            k = KFunction::constant2();
        } else if (kind == "sqrt_abs") {
            k = KFunction::sqrt_abs();
        } else if (kind == "powcos_rule") {
            k = KFunction::powcos_rule(j.value("alpha", 2.0), j.value("m", 7.0));
        } else if (kind == "table") {
            k = KFunction::table(j.at("xs").get<std::vector<double>>(), j.at("ks").get<std::vector<double>>());
        } else {
            throw ConfigError("unknown k function: " + kind);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad k function: ") + e.what());
    }
    k.validate();
    return k;
}

std::optional<KFunction> default_k_function(const PotentialSpec& spec) {
    switch (spec.kind) {
        case PotentialKind::constant:
            return KFunction::constant2();
        case PotentialKind::staircase5:
            return KFunction::sqrt_abs();
        case PotentialKind::powcos:
            return KFunction::powcos_rule(spec.alpha, powcos_params(spec.alpha, spec.beta).m0);
        default:
            return std::nullopt;
    }
}

namespace {

struct Result {
    Table table;
    json verdict = json::object();
    bool pass = true;
    /// The verdict is the whole output (report).
    bool verdict_only = false;
};

struct Context {
    RunConfig cfg;
    std::string verdict_path;
    std::string plot_path;

    const PotentialSpec& spec() const {
        if (!cfg.potential) throw ConfigError("--potential is required");
        return *cfg.potential;
    }
    std::pair<double, double> window() const {
        if (!cfg.window) throw ConfigError("--window is required");
        return *cfg.window;
    }
    SolverConfig solver() const {
        SolverConfig s;
        s.grid_n = cfg.grid_n;
        s.rel_tol = cfg.rel_tol;
        s.padding_factor = cfg.padding_factor;
        return s;
    }
    KFunction k() const {
        if (cfg.k) return k_function_from_json(*cfg.k);
        if (auto k = default_k_function(spec())) return *k;
        throw ConfigError("no default k function for this potential; pass --k");
    }
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
    return g;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Result cmd_d(const Context& ctx, std::vector<double> xs, bool with_hat) {
    const Potential p(ctx.spec());
    if (xs.empty()) {
        const auto [a, b] = ctx.window();
        xs = linspace(a, b, ctx.cfg.grid_n);
    }
    Result r;
    r.table.header = {"x", "d", "residual"};
    if (with_hat) r.table.header.insert(r.table.header.end(), {"d_hat", "d_hat_prime"});
    r.table.rows.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const auto s = solve_d(p, xs[i], ctx.cfg.d_tol);
        std::vector<json> row{s.x, s.d, s.residual};
        if (with_hat) {
            const auto h = solve_d_hat(p, xs[i], ctx.cfg.d_tol);
            row.push_back(h.d_hat);
            row.push_back(h.d_hat_prime);
        }
        r.table.rows[i] = std::move(row);
    });
    r.verdict["points"] = xs.size();
    return r;
}

Result cmd_dhat(const Context& ctx, std::vector<double> xs) {
    const Potential p(ctx.spec());
    if (xs.empty()) {
        const auto [a, b] = ctx.window();
        xs = linspace(a, b, ctx.cfg.grid_n);
    }
    Result r;
    r.table.header = {"x", "d_hat", "d_hat_prime", "residual"};
    r.table.rows.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const auto h = solve_d_hat(p, xs[i], ctx.cfg.d_tol);
        r.table.rows[i] = {h.x, h.d_hat, h.d_hat_prime, h.residual};
    });
    r.verdict["points"] = xs.size();
    return r;
}

Result cmd_rho(const Context& ctx) {
    const Potential p(ctx.spec());
    const auto [a, b] = ctx.window();
    const auto prof = rho_profile(p, a, b, ctx.solver());
    const std::size_t n = prof.grid.size();
    std::vector<double> d(n);
    parallel_for(n, [&](std::size_t i) { d[i] = solve_d(p, prof.grid[i], ctx.cfg.d_tol).d; });
    Result r;
    r.table.header = {"x", "y1", "y2", "rho", "rho_prime", "d", "epsilon"};
    int violations = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r.table.rows.push_back({prof.grid[i], prof.y1[i], prof.y2[i], prof.rho[i], prof.rho_prime[i], d[i],
                                2.0 * prof.rho[i] / d[i] - 1.0});
        if (!(d[i] / 4 <= prof.rho[i] && prof.rho[i] <= 1.5 * d[i])) ++violations;
    }
    r.verdict["sandwich_violations"] = violations;
    r.verdict["local_pieces"] = prof.meta.local;
    r.verdict["padding"] = prof.meta.padding;
    r.verdict["error_budget"] = prof.meta.error_budget;
    r.pass = violations == 0;
    return r;
}

Result cmd_classh(const Context& ctx) {
    const Potential p(ctx.spec());
    const KFunction k = ctx.k();
    const auto [a, b] = ctx.window();
    const auto rep = verify_class_h(p, k, a, b, std::max(8, ctx.cfg.grid_n));
    const std::size_t n = rep.grid.size();
    std::vector<double> bet(n), alp(n), hor(n);
    parallel_for(n, [&](std::size_t i) {
        bet[i] = beta(p, k, rep.grid[i], ctx.cfg.c_exp);
        const auto av = alpha(p, k, rep.grid[i], ctx.cfg.c_exp, ctx.cfg.horizon);
        alp[i] = av.value;
        hor[i] = av.horizon;
    });
    Result r;
    r.table.header = {"x", "k", "d", "phi", "f_big", "beta", "alpha", "horizon"};
    for (std::size_t i = 0; i < n; ++i)
        r.table.rows.push_back({rep.grid[i], rep.k[i], rep.d[i], rep.phi[i], rep.f_big[i], bet[i], alp[i], hor[i]});
    r.verdict["k"] = to_string(k.kind);
    r.verdict["c1_hat"] = rep.c1_hat;
    r.verdict["c2_hat"] = rep.c2_hat;
    r.verdict["c3_hat"] = rep.c3_hat;
    r.verdict["pass_k_floor"] = rep.pass_k_floor;
    r.verdict["pass_k_slow"] = rep.pass_k_slow;
    r.verdict["pass_phi_bounded"] = rep.pass_phi_bounded;
    try {
        const auto t = thresholds(rep);
        r.verdict["thresholds"] = {{"s0", t.s0}, {"s1", t.s1}, {"sup_d", t.sup_d}};
    } catch (const NotReached& e) {
        r.verdict["thresholds"] = e.what();
    }
    r.pass = rep.pass();
    return r;
}

Result cmd_riccati(const Context& ctx, double x0, double y0, double span, const std::string& direction) {
    const Potential p(ctx.spec());
    std::vector<Direction> dirs;
    if (direction == "fwd" || direction == "both") dirs.push_back(Direction::forward);
    if (direction == "bwd" || direction == "both") dirs.push_back(Direction::backward);
    Result r;
    r.table.header = {"direction", "x", "y"};
    json trajectories = json::array();
    for (Direction dir : dirs) {
        const auto t = integrate_riccati(p, x0, y0, dir, span);
        const char* name = dir == Direction::forward ? "fwd" : "bwd";
        for (std::size_t i = 0; i < t.xs.size(); ++i) r.table.rows.push_back({name, t.xs[i], t.ys[i]});
        json tj{{"direction", name}, {"blowup", t.blowup}, {"error_budget", t.error_budget}};
        tj["x_star"] = t.blowup ? json(t.x_star) : json(nullptr);
        tj["sign"] = t.sign;
        tj["x_end"] = t.xs.empty() ? json(nullptr) : json(t.xs.back());
        tj["y_end"] = t.ys.empty() ? json(nullptr) : json(t.ys.back());
        trajectories.push_back(std::move(tj));
    }
    r.verdict["trajectories"] = std::move(trajectories);
    const auto c = classify_riccati(p, x0, y0, ctx.solver());
    r.verdict["classification"] = {{"forward", to_string(c.forward)},
                                   {"backward", to_string(c.backward)},
                                   {"y1_at_x0", c.y1_at_x0},
                                   {"y2_at_x0", c.y2_at_x0},
                                   {"forward_yd", number_or_null(c.forward_yd)},
                                   {"backward_yd", number_or_null(c.backward_yd)},
                                   {"forward_x_star", number_or_null(c.forward_x_star)},
                                   {"backward_x_star", number_or_null(c.backward_x_star)},
                                   {"exact_seed", c.exact_seed}};
    return r;
}

Result cmd_asym(const Context& ctx, Eta2Exponent variant, std::optional<std::pair<double, double>> hwin, int hn) {
    const Potential p(ctx.spec());
    const auto [a, b] = ctx.window();
    EpsilonOptions opt;
    opt.rho = ctx.solver();
    opt.c_exp = ctx.cfg.c_exp;
    opt.eta2_variant = variant;
    if (ctx.cfg.k || default_k_function(ctx.spec())) opt.k = ctx.k();
    const auto rep = epsilon_profile(p, a, b, opt);
    Result r;
    r.table.header = {"x", "d", "rho", "rho_prime", "epsilon"};
    if (opt.k) r.table.header.insert(r.table.header.end(), {"beta_bound", "eta2_bound"});
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        std::vector<json> row{rep.grid[i], rep.d[i], rep.rho[i], rep.rho_prime[i], rep.epsilon[i]};
        if (opt.k) {
            row.push_back(rep.bound_beta[i]);
            row.push_back(rep.bound_eta2[i]);
        }
        r.table.rows.push_back(std::move(row));
    }
    r.verdict["max_abs_epsilon"] = max_abs(rep.epsilon);
    r.verdict["pass_decay"] = rep.pass_decay;
    r.verdict["first_small_rho_prime"] = number_or_null(rep.first_small_rho_prime);
    r.pass = rep.pass_decay;
    if (opt.k) {
        r.verdict["k"] = to_string(opt.k->kind);
        r.verdict["fitted_c"] = number_or_null(rep.fitted_c);
        r.verdict["beta_sqrt_k"] = number_or_null(rep.beta_sqrt_k);
        r.verdict["c1_hat"] = rep.c1_hat;
        r.verdict["c3_hat"] = rep.c3_hat;
        r.verdict["pass_beta_bound"] = rep.pass_beta_bound;
        r.verdict["pass_beta_shape"] = rep.pass_beta_shape;
    }
    if (hwin) {
        // Pointwise eta bounds, with thresholds measured on a separate (usually much wider) grid.
        const KFunction k = ctx.k();
        const auto constants = verify_class_h(p, k, hwin->first, hwin->second, hn);
        json e;
        try {
            const auto eb = check_eta_bounds(p, k, a, b, constants, ctx.solver(), variant);
            double worst1 = 0.0, worst2 = 0.0;
            for (const auto& row : eb.rows) {
                worst1 = std::max(worst1, row.abs_rho_prime / row.eta1);
                worst2 = std::max(worst2, row.abs_epsilon / row.eta2);
            }
            e = {{"s0", eb.thresholds.s0}, {"s1", eb.thresholds.s1}, {"max_rho_prime_over_eta1", worst1},
                 {"max_epsilon_over_eta2", worst2}, {"pass", eb.pass}};
            r.pass = r.pass && eb.pass;
        } catch (const NotReached& ex) {
            e = {{"pass", false}, {"reason", ex.what()}};
            r.pass = false;
        }
        e["variant"] = variant == Eta2Exponent::proof ? "proof" : "statement";
        r.verdict["eta_bounds"] = std::move(e);
    }
    return r;
}

Result cmd_asym_powcos(const Context& ctx, std::optional<double> al, std::optional<double> be, double split) {
    double alpha_v = 2.0, beta_v = 3.0;
    if (ctx.cfg.potential && ctx.cfg.potential->kind == PotentialKind::powcos) {
        alpha_v = ctx.cfg.potential->alpha;
        beta_v = ctx.cfg.potential->beta;
    } else if (ctx.cfg.potential) {
        throw ConfigError("asym-powcos needs a powcos potential");
    }
    if (al) alpha_v = *al;
    if (be) beta_v = *be;
    const auto [a, b] = ctx.cfg.window.value_or(std::pair{50.0, 300.0});
    const auto rep = check_powcos(alpha_v, beta_v, a, b, ctx.cfg.grid_n, ctx.solver());
    Result r;
    r.table.header = {"x", "d", "rho", "delta", "epsilon", "scaled_delta", "scaled_epsilon"};
    double inner = 0.0, outer = 0.0;
    if (std::isnan(split)) split = 0.5 * (a + b);
    for (const auto& row : rep.rows) {
        r.table.rows.push_back(
            {row.x, row.d, row.rho, row.delta, row.epsilon, row.scaled_delta, row.scaled_epsilon});
        (row.x < split ? inner : outer) = std::max(row.x < split ? inner : outer, std::abs(row.epsilon));
    }
    r.verdict["gamma"] = rep.params.gamma;
    r.verdict["gamma0"] = rep.params.gamma0;
    r.verdict["m0"] = rep.params.m0;
    r.verdict["c_delta"] = rep.c_delta;
    r.verdict["c_epsilon"] = rep.c_epsilon;
    r.verdict["calibration_rows"] = rep.calibration_rows;
    r.verdict["pass_envelopes"] = rep.pass;
    r.verdict["split"] = split;
    r.verdict["max_abs_epsilon_left"] = inner;
    r.verdict["max_abs_epsilon_right"] = outer;
    r.verdict["pass_decay"] = outer <= inner;
    r.pass = rep.pass && outer <= inner;
    return r;
}

Result cmd_thm71(const Context& ctx, std::vector<double> xs) {
    const Potential p(ctx.spec());
    if (xs.empty()) {
        if (ctx.cfg.window) {
            xs = linspace(ctx.cfg.window->first, ctx.cfg.window->second, ctx.cfg.grid_n);
        } else {
            xs = {50.0, 100.0, 200.0};
        }
    }
    const auto rows = check_d_asymptotics(p, xs);
    Result r;
    r.table.header = {"x", "d", "predicted", "delta", "kappa1", "kappa2", "bound", "pass"};
    double worst = 0.0;
    for (const auto& row : rows) {
        r.table.rows.push_back(
            {row.x, row.d, row.predicted, row.delta, row.kappa1, row.kappa2, row.bound, row.pass});
        r.pass = r.pass && row.pass;
        if (row.bound > 0) worst = std::max(worst, std::abs(row.delta) / row.bound);
    }
    r.verdict["max_delta_over_bound"] = worst;
    return r;
}

std::pair<int, int> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    auto num = [&](std::string_view t) {
        int v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError("bad range: " + s);
        return v;
    };
    if (dots == std::string::npos) {
        const int v = num(s);
        return {v, v};
    }
    const std::string_view sv(s);
    return {num(sv.substr(0, dots)), num(sv.substr(dots + 2))};
}

Result cmd_compare(const Context& ctx, const std::string& range) {
    if (ctx.cfg.potential && ctx.cfg.potential->kind != PotentialKind::staircase5)
        throw ConfigError("compare-bounds is defined for the staircase potential only");
    const auto [lo, hi] = parse_range(range);
    const auto rows = compare_bounds_staircase(lo, hi, ctx.cfg.c_exp);
    Result r;
    r.table.header = {"n", "x_n", "alpha", "beta", "ratio"};
    bool increasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        r.table.rows.push_back({row.n, row.x_n, row.alpha, row.beta, row.ratio});
        if (i > 0 && row.n > 10 && !(row.ratio > rows[i - 1].ratio)) increasing = false;
    }
    r.verdict["increasing_from_10"] = increasing;
    r.verdict["excess_growth"] = (rows.back().ratio - 1) / (rows.front().ratio - 1);
    r.pass = increasing;
    return r;
}

/// One entry of the report battery: margin > 0 means the check holds with room to spare.
struct Check {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    json detail = json::object();
};

json to_json(const Check& c) {
    json j{{"name", c.name}, {"pass", c.pass}, {"margin", number_or_null(c.margin)}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

Result cmd_report(const Context& ctx) {
    const Potential p(ctx.spec());
    const auto [a, b] = ctx.window();
    const SolverConfig cfg = ctx.solver();
    std::vector<Check> checks;
    json skipped = json::array();
    auto attempt = [&](const std::string& name, const std::function<Check()>& fn) {
        try {
            checks.push_back(fn());
        } catch (const Error& e) {
            Check c;
            c.name = name;
            c.margin = kNaN;
            c.detail = {{"error", e.what()}};
            checks.push_back(std::move(c));
        }
    };

    const auto prof = rho_profile(p, a, b, cfg);
    const std::size_t n = prof.grid.size();
    std::vector<double> d(n);
    parallel_for(n, [&](std::size_t i) { d[i] = solve_d(p, prof.grid[i], ctx.cfg.d_tol).d; });

    attempt("sandwich", [&] {
        Check c{"sandwich"};
        c.margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            c.margin = std::min(c.margin, std::min(prof.rho[i] - d[i] / 4, 1.5 * d[i] - prof.rho[i]) / d[i]);
        c.pass = c.margin >= 0;
        return c;
    });
    attempt("corridor_sign", [&] {
        Check c{"corridor_sign"};
        c.margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) c.margin = std::min({c.margin, prof.y2[i], -prof.y1[i]});
        c.pass = c.margin > 0;
        return c;
    });
    attempt("rho_prime_below_one", [&] {
        Check c{"rho_prime_below_one"};
        c.margin = 1.0 - max_abs(prof.rho_prime);
        c.pass = c.margin > 0;
        return c;
    });
    attempt("padding_independence", [&] {
        SolverConfig twice = cfg;
        twice.padding_factor *= 2;
        const auto other = rho_profile(p, a, b, twice);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(other.rho[i] / prof.rho[i] - 1.0));
        Check c{"padding_independence"};
        c.margin = 1e-7 - worst;
        c.pass = c.margin > 0;
        c.detail = {{"max_relative_change", worst}};
        return c;
    });
    attempt("log_ratio_identity", [&] {
        std::vector<std::size_t> interior;
        for (std::size_t i = 0; i < n; ++i)
            if (prof.grid[i] - 1.5 * d[i] >= a && prof.grid[i] + 1.5 * d[i] <= b) interior.push_back(i);
        if (interior.empty()) throw WindowOutOfRange("window too short for the identity");
        double worst = 0.0;
        json xs = json::array();
        const std::size_t picks = std::min<std::size_t>(5, interior.size());
        for (std::size_t j = 0; j < picks; ++j) {
            const std::size_t i = interior[picks == 1 ? interior.size() / 2 : j * (interior.size() - 1) / (picks - 1)];
            const auto id = check_log_ratio_identity(prof, prof.grid[i]);
            worst = std::max(worst, std::abs(id.lhs / id.rhs - 1.0));
            xs.push_back(prof.grid[i]);
        }
        Check c{"log_ratio_identity"};
        c.margin = 1e-4 - worst;
        c.pass = c.margin >= 0;
        c.detail = {{"points", xs}, {"max_relative_deviation", worst}};
        return c;
    });
    attempt("cauchy_representation", [&] {
        const std::size_t i = n / 2;
        const auto cc = check_cauchy_representation(prof, prof.grid[i], 2 * d[i]);
        Check c{"cauchy_representation"};
        c.margin = 1e-6 - cc.max_abs_deviation;
        c.pass = c.margin >= 0 && cc.sign_pattern;
        c.detail = {{"x", prof.grid[i]}, {"max_abs_deviation", cc.max_abs_deviation}, {"sign_pattern", cc.sign_pattern}};
        return c;
    });

    const bool constant = ctx.spec().kind == PotentialKind::constant;
    const double inner_abs = a > 0 ? a : (b < 0 ? -b : 0.0);
    if (constant) {
        attempt("epsilon_zero", [&] {
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(2 * prof.rho[i] / d[i] - 1.0));
            Check c{"epsilon_zero"};
            c.margin = 1e-6 - worst;
            c.pass = c.margin >= 0;
            return c;
        });
    } else if (inner_abs >= 20) {
        attempt("epsilon_decay", [&] {
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return std::abs(prof.grid[x]) < std::abs(prof.grid[y]);
            });
            double in = 0.0, out = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double e = std::abs(2 * prof.rho[order[j]] / d[order[j]] - 1.0);
                (j < n / 2 ? in : out) = std::max(j < n / 2 ? in : out, e);
            }
            Check c{"epsilon_decay"};
            c.margin = in - out;
            c.pass = std::isfinite(c.margin) && c.margin >= 0;
            c.detail = {{"inner_max", in}, {"outer_max", out}};
            return c;
        });
    } else {
        skipped.push_back({{"name", "epsilon_decay"}, {"reason", "window reaches inside |x| < 20"}});
    }

    if (ctx.cfg.k || default_k_function(ctx.spec())) {
        attempt("class_h", [&] {
            const auto rep = verify_class_h(p, ctx.k(), a, b, std::clamp(ctx.cfg.grid_n, 8, 64));
            Check c{"class_h"};
            c.pass = rep.pass();
            c.margin = kNaN;
            c.detail = {{"c1_hat", rep.c1_hat},           {"c2_hat", rep.c2_hat},
                        {"c3_hat", rep.c3_hat},           {"pass_k_floor", rep.pass_k_floor},
                        {"pass_k_slow", rep.pass_k_slow}, {"pass_phi_bounded", rep.pass_phi_bounded}};
            return c;
        });
    } else {
        skipped.push_back({{"name", "class_h"}, {"reason", "no k function for this potential"}});
    }

    if (p.decompose() && (constant || inner_abs >= 20)) {
        attempt("d_asymptotics", [&] {
            const auto rows = check_d_asymptotics(p, {a, 0.5 * (a + b), b});
            Check c{"d_asymptotics"};
            c.pass = true;
            c.margin = std::numeric_limits<double>::infinity();
            for (const auto& row : rows) {
                c.pass = c.pass && row.pass;
                c.margin = std::min(c.margin, row.bound - std::abs(row.delta));
            }
            return c;
        });
    } else {
        skipped.push_back({{"name", "d_asymptotics"},
                           {"reason", p.decompose() ? "window reaches inside |x| < 20" : "no smooth/rough split"}});
    }

    Result r;
    r.verdict_only = true;
    json arr = json::array();
    for (const auto& c : checks) {
        arr.push_back(to_json(c));
        r.pass = r.pass && c.pass;
    }
    r.verdict["potential"] = spec_to_json(ctx.spec());
    r.verdict["window"] = {a, b};
    r.verdict["grid_n"] = ctx.cfg.grid_n;
    r.verdict["checks"] = std::move(arr);
    r.verdict["skipped"] = std::move(skipped);
    return r;
}

void write_to(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    fn(f);
}

void emit(const Context& ctx, Result& r, std::ostream& out, std::ostream& err) {
    r.verdict["pass"] = r.pass;
    if (r.verdict_only) {
        write_to(ctx.cfg.output, out, [&](std::ostream& os) { os << r.verdict.dump(2) << '\n'; });
    } else if (ctx.cfg.format == "json") {
        const json doc{{"rows", r.table.to_json()}, {"verdict", r.verdict}};
        write_to(ctx.cfg.output, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    } else {
        write_to(ctx.cfg.output, out, [&](std::ostream& os) { r.table.write_csv(os); });
        write_to(ctx.verdict_path, err, [&](std::ostream& os) { os << r.verdict.dump(2) << '\n'; });
    }
    if (!ctx.plot_path.empty() && !r.verdict_only)
        write_to(ctx.plot_path, out, [&](std::ostream& os) { r.table.write_plot_csv(os); });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Otelbaev function, extremal Riccati solutions and their asymptotics"};
    app.require_subcommand(1);

    // Shared flags, registered on every subcommand so they may follow its name.
    std::string potential_arg, config_arg, k_arg, format_arg, output_arg, verdict_arg, plot_arg;
    std::vector<double> window_arg;
    int grid_n_arg = 0;
    double d_tol_arg = 0, rel_tol_arg = 0, padding_arg = 0, c_exp_arg = 0, horizon_arg = 0;
    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--potential", potential_arg, "potential JSON, inline or @file");
        sub->add_option("--config", config_arg, "JSON run config; explicit flags override it");
        sub->add_option("--window", window_arg, "window a b")->expected(2);
        sub->add_option("--grid-n", grid_n_arg, "grid points on the window");
        sub->add_option("--d-tol", d_tol_arg, "relative tolerance on d");
        sub->add_option("--rel-tol", rel_tol_arg, "integrator relative tolerance");
        sub->add_option("--padding", padding_arg, "rho padding in units of d");
        sub->add_option("--k", k_arg, "k function: name or JSON");
        sub->add_option("--c-exp", c_exp_arg, "constant in exp(-sqrt(k)/c)");
        sub->add_option("--horizon", horizon_arg, "alpha truncation (0: 10 k d)");
        sub->add_option("--format", format_arg, "csv or json");
        sub->add_option("--output", output_arg, "output path (default stdout)");
        sub->add_option("--verdict", verdict_arg, "verdict JSON path in csv mode (default stderr)");
        sub->add_option("--emit-plot-data", plot_arg, "tidy long CSV for plotting");
    };

    std::vector<double> xs;
    bool with_hat = false;
    double x0 = 0, y0 = 0, span = 5;
    std::string direction = "both", range = "5..40", eta2_variant = "proof";
    std::optional<double> pc_alpha, pc_beta;
    double split = kNaN;
    std::vector<double> threshold_window;
    int threshold_n = 64;

    auto* c_d = app.add_subcommand("d", "d(x) and the residual of its defining equation");
    c_d->add_option("--x", xs, "points (default: the window grid)");
    c_d->add_flag("--with-dhat", with_hat, "append d_hat and d_hat'");
    auto* c_dhat = app.add_subcommand("dhat", "d_hat(x) and its derivative");
    c_dhat->add_option("--x", xs, "points (default: the window grid)");
    auto* c_rho = app.add_subcommand("rho", "extremal Riccati solutions and rho on a window");
    auto* c_classh = app.add_subcommand("classh", "class-H diagnostics and the bound functions");
    auto* c_ric = app.add_subcommand("riccati", "one Riccati trajectory and its classification");
    c_ric->add_option("--x0", x0)->required();
    c_ric->add_option("--y0", y0)->required();
    c_ric->add_option("--span", span)->check(CLI::PositiveNumber);
    c_ric->add_option("--direction", direction)->check(CLI::IsMember({"fwd", "bwd", "both"}));
    auto* c_asym = app.add_subcommand("asym", "epsilon profile with the beta and eta2 bounds");
    c_asym->add_option("--eta2", eta2_variant, "exponent variant of eta2")
        ->check(CLI::IsMember({"proof", "statement"}));
    c_asym->add_option("--threshold-window", threshold_window, "class-H grid for the eta thresholds")->expected(2);
    c_asym->add_option("--threshold-n", threshold_n, "points on that grid")->check(CLI::Range(8, 1 << 20));
    auto* c_pc = app.add_subcommand("asym-powcos", "delta and epsilon envelopes for powcos");
    c_pc->add_option("--alpha", pc_alpha);
    c_pc->add_option("--beta", pc_beta);
    c_pc->add_option("--split", split, "left/right split for the decay check (default: midpoint)");
    auto* c_71 = app.add_subcommand("asym-thm71", "d against 1/sqrt(q1) with the kappa bound");
    c_71->add_option("--x", xs, "points (default: 50 100 200, or the window grid)");
    auto* c_cmp = app.add_subcommand("compare-bounds", "alpha/beta on the staircase");
    c_cmp->add_option("--n", range, "block range lo..hi");
    auto* c_rep = app.add_subcommand("report", "verification battery for one potential");
    for (auto* sub : {c_d, c_dhat, c_rho, c_classh, c_ric, c_asym, c_pc, c_71, c_cmp, c_rep}) add_shared(sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    auto* sub = app.get_subcommands().front();

    Context ctx;
    try {
        auto given = [&](const char* flag) { return sub->get_option(flag)->count() > 0; };
        if (given("--config")) ctx.cfg = run_config_from_json(json_argument(config_arg));
        if (given("--potential")) ctx.cfg.potential = spec_from_json(json_argument(potential_arg));
        if (given("--window")) ctx.cfg.window = std::pair{window_arg[0], window_arg[1]};
        if (given("--grid-n")) ctx.cfg.grid_n = grid_n_arg;
        if (given("--d-tol")) ctx.cfg.d_tol = d_tol_arg;
        if (given("--rel-tol")) ctx.cfg.rel_tol = rel_tol_arg;
        if (given("--padding")) ctx.cfg.padding_factor = padding_arg;
        if (given("--k")) {
            const auto first = k_arg.find_first_not_of(' ');
            ctx.cfg.k = first != std::string::npos && (k_arg[first] == '{' || k_arg[first] == '@')
                            ? json_argument(k_arg)
                            : json(k_arg);
        }
        if (given("--c-exp")) ctx.cfg.c_exp = c_exp_arg;
        if (given("--horizon")) ctx.cfg.horizon = horizon_arg;
        if (given("--format")) ctx.cfg.format = format_arg;
        if (given("--output")) ctx.cfg.output = output_arg;
        if (given("--verdict")) ctx.verdict_path = verdict_arg;
        if (given("--emit-plot-data")) ctx.plot_path = plot_arg;
        ctx.cfg.validate();
        if (ctx.cfg.k) k_function_from_json(*ctx.cfg.k);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidSpec& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        Result r;
        const std::string name = sub->get_name();
        if (name == "d") {
            r = cmd_d(ctx, xs, with_hat);
        } else if (name == "dhat") {
            r = cmd_dhat(ctx, xs);
        } else if (name == "rho") {
            r = cmd_rho(ctx);
        } else if (name == "classh") {
            r = cmd_classh(ctx);
        } else if (name == "riccati") {
            r = cmd_riccati(ctx, x0, y0, span, direction);
        } else if (name == "asym") {
            std::optional<std::pair<double, double>> hw;
            if (!threshold_window.empty()) hw = std::pair{threshold_window[0], threshold_window[1]};
            r = cmd_asym(ctx, eta2_variant == "proof" ? Eta2Exponent::proof : Eta2Exponent::statement, hw,
                         threshold_n);
        } else if (name == "asym-powcos") {
            r = cmd_asym_powcos(ctx, pc_alpha, pc_beta, split);
        } else if (name == "asym-thm71") {
            r = cmd_thm71(ctx, xs);
        } else if (name == "compare-bounds") {
            r = cmd_compare(ctx, range);
        } else {
            r = cmd_report(ctx);
        }
        emit(ctx, r, out, err);
        if (!r.pass) err << "check failed\n";
        return r.pass ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidSpec& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Unavailable& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "solver error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace otelbaev::cli
