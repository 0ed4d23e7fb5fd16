#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otelbaev/classh.hpp"
#include "otelbaev/potential.hpp"

namespace otelbaev::cli {

/// Shortest round-trip is not wanted here: 15 significant digits, '.' separator, no locale.
std::string format_number(double v);

/// Rows of scalar cells; rendered as CSV with a header row or as an array of JSON objects.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<nlohmann::json>> rows;

    void write_csv(std::ostream& os) const;
    nlohmann::json to_json() const;
    /// Long form (series, x, value): every numeric column against the first one.
    void write_plot_csv(std::ostream& os) const;
};

/// Everything a subcommand needs besides its own flags. Also the schema of --config files:
/// {"potential": {...}, "window": [a, b], "grid_n": 201,
///  "tolerances": {"d": 1e-10, "rel": 1e-9, "padding": 40},
///  "k": "sqrt_abs", "c_exp": 1, "horizon": 0, "output": {"path": "", "format": "csv"}}
struct RunConfig {
    std::optional<PotentialSpec> potential;
    std::optional<std::pair<double, double>> window;
    int grid_n = 201;
    double d_tol = 1e-10;
    double rel_tol = 1e-9;
    double padding_factor = 40.0;
    /// "constant2", "sqrt_abs", {"kind": "powcos_rule", "alpha": a, "m": m} or
    /// {"kind": "table", "xs": [...], "ks": [...]}.
    std::optional<nlohmann::json> k;
    double c_exp = 1.0;
    /// Truncation of the sup in alpha; 0 picks the default of 10 k d.
    double horizon = 0.0;
    std::string output;
    std::string format = "csv";

    /// Throws InvalidParams on an empty window, grid_n < 2 or an unknown format.
    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

KFunction k_function_from_json(const nlohmann::json& j);
/// sqrt|x| for the staircase, the powcos rule with the smallest admissible m, 2 for constants.
std::optional<KFunction> default_k_function(const PotentialSpec& spec);

/// Entry point behind the `otelbaev` executable. args excludes the program name.
/// Returns 0 when all checks pass, 1 on a failed check or solver error, 2 on bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otelbaev::cli
