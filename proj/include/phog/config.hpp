#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "embedded.hpp"
#include "json.hpp"

namespace phog {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const json& config_schema() {
    static const json s = json::parse(embedded::schema);
    return s;
}

inline const json& platform_presets() {
    static const json p = json::parse(embedded::presets);
    return p;
}

namespace detail {

inline bool type_matches(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number() && std::isfinite(v.get<double>());
    throw std::logic_error("schema uses unsupported type " + type);
}

// The subset of JSON Schema the shipped schema uses.
inline void check(const json& v, const json& s, const std::string& path) {
    auto where = path.empty() ? std::string("config") : path;
    if (s.contains("type") && !type_matches(v, s["type"].get<std::string>()))
        throw ConfigError(where + ": expected " + s["type"].get<std::string>());
    if (s.contains("enum")) {
        bool ok = false;
        for (const auto& e : s["enum"]) ok = ok || e == v;
        if (!ok) throw ConfigError(where + ": value " + v.dump() + " not allowed");
    }
    if (v.is_number()) {
        double x = v.get<double>();
        if (s.contains("minimum") && x < s["minimum"].get<double>())
            throw ConfigError(where + ": below minimum " + s["minimum"].dump());
        if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
            throw ConfigError(where + ": must exceed " + s["exclusiveMinimum"].dump());
    }
    if (v.is_object()) {
        for (const auto& r : s.value("required", json::array()))
            if (!v.contains(r.get<std::string>())) throw ConfigError(where + ": missing key " + r.get<std::string>());
        const json props = s.value("properties", json::object());
        for (const auto& [k, sub] : v.items()) {
            auto child = path.empty() ? k : path + "." + k;
            if (props.contains(k))
                check(sub, props[k], child);
            else if (s.value("additionalProperties", true) == false)
                throw ConfigError("unknown key " + child);
        }
    }
    if (v.is_array() && s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "." + std::to_string(i));
}

}  // namespace detail

inline void validate_config(const json& cfg) { detail::check(cfg, config_schema(), ""); }

// "a.b.0.c=value"; the value is read as JSON when it parses, otherwise as a string.
inline void apply_override(json& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &cfg;
    std::size_t pos = 0;
    for (;;) {
        auto dot = key.find('.', pos);
        std::string seg = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (seg.empty()) throw ConfigError("empty segment in override key " + key);
        bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(seg);
            } catch (const std::exception&) {
                throw ConfigError("array index expected in override key " + key);
            }
            if (idx >= node->size()) throw ConfigError("array index out of range in override key " + key);
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError("override key " + key + " descends into a scalar");
            node = &(*node)[seg];
        }
        if (last) break;
        pos = dot + 1;
    }
    *node = value;
}

}  // namespace phog
