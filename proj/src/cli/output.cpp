#include <charconv>
#include <cmath>
#include <ostream>

#include "otelbaev/cli.hpp"

namespace otelbaev::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

namespace {

std::string cell(const nlohmann::json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "nan";
    return v.dump();
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
        os << '\n';
    }
}

nlohmann::json Table::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) obj[header[i]] = row[i];
        arr.push_back(std::move(obj));
    }
    return arr;
}

void Table::write_plot_csv(std::ostream& os) const {
    os << "series," << (header.empty() ? "x" : header[0]) << ",value\n";
    for (std::size_t c = 1; c < header.size(); ++c) {
        for (const auto& row : rows) {
            if (!row[c].is_number() || !row[0].is_number()) continue;
            os << header[c] << ',' << cell(row[0]) << ',' << cell(row[c]) << '\n';
        }
    }
}

}  // namespace otelbaev::cli
