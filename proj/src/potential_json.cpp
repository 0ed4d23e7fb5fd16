#include "otelbaev/potential_json.hpp"

#include "otelbaev/error.hpp"

namespace otelbaev {

using nlohmann::json;

json spec_to_json(const PotentialSpec& s) {
    json j;
    j["kind"] = std::string(to_string(s.kind));
    switch (s.kind) {
        case PotentialKind::constant:
            j["q0"] = s.q0;
            break;
        case PotentialKind::step:
            j["left"] = s.left;
            j["right"] = s.right;
            j["at"] = s.at;
            break;
        case PotentialKind::piecewise_constant:
            j["breakpoints"] = s.breakpoints;
            j["values"] = s.values;
            j["left"] = s.left;
            j["right"] = s.right;
            break;
        case PotentialKind::staircase5:
            break;
        case PotentialKind::powcos:
            j["alpha"] = s.alpha;
            j["beta"] = s.beta;
            break;
        case PotentialKind::sum:
            j["terms"] = json::array({spec_to_json(s.children.at(0)), spec_to_json(s.children.at(1))});
            break;
        case PotentialKind::scaled:
            j["factor"] = s.factor;
            j["child"] = spec_to_json(s.children.at(0));
            break;
    }
    return j;
}

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw InvalidSpec(std::string("missing field '") + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) throw InvalidSpec(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw InvalidSpec(std::string("field '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw InvalidSpec(std::string("field '") + key + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

PotentialSpec parse(const json& j) {
    if (!j.is_object()) throw InvalidSpec("potential must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw InvalidSpec("potential needs a string 'kind'");
    const auto name = j.at("kind").get<std::string>();
    const auto kind = potential_kind_from_string(name);
    if (!kind) throw InvalidSpec("unknown potential kind '" + name + "'");
    switch (*kind) {
        case PotentialKind::constant:
            return PotentialSpec::constant(number(j, "q0"));
        case PotentialKind::step:
            return PotentialSpec::step(number(j, "left"), number(j, "right"), number(j, "at"));
        case PotentialKind::piecewise_constant:
            return PotentialSpec::piecewise_constant(numbers(j, "breakpoints"), numbers(j, "values"),
                                                     number(j, "left"), number(j, "right"));
        case PotentialKind::staircase5:
            return PotentialSpec::staircase5();
        case PotentialKind::powcos:
            return PotentialSpec::powcos(number(j, "alpha"), number(j, "beta"));
        case PotentialKind::sum: {
            if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").size() != 2)
                throw InvalidSpec("sum needs 'terms' with exactly two potentials");
            return PotentialSpec::sum(parse(j.at("terms")[0]), parse(j.at("terms")[1]));
        }
        case PotentialKind::scaled:
            if (!j.contains("child")) throw InvalidSpec("scaled needs 'child'");
            return PotentialSpec::scaled(parse(j.at("child")), number(j, "factor"));
    }
    throw InvalidSpec("unknown potential kind '" + name + "'");
}

}  // namespace

PotentialSpec spec_from_json(const json& j) {
    PotentialSpec s = parse(j);
    validate(s);
    return s;
}

PotentialSpec spec_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidSpec(std::string("potential is not valid JSON: ") + e.what());
    }
    return spec_from_json(j);
}

}  // namespace otelbaev
