// config_io.hpp
// Text format for SchemeConfig, version "qcm-config/1":
//
//   # comment
//   format = qcm-config/1        (optional; must match when present)
//   scheme = A                   (A or B)
//   g_s1s2 = 0.95
//   ...
//
// One "key = value" per line; blank lines and '#' comments are ignored.
// Required keys: scheme, g_s1s2, g_s2aR, theta, dt, beta_aR, n_collisions,
// plus g_s1aL and beta_aL for scheme B. Frequencies default to 1 and the
// scheme-A left-ancilla fields to their neutral values (omega_aL = 1,
// g_s1aL = 0, beta_aL = 1). allow_unused_left_fields takes true/false.
// Unknown or repeated keys are errors.

#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qcm/error.hpp"
#include "qcm/model.hpp"

namespace qcm {

inline constexpr std::string_view kConfigFormat = "qcm-config/1";

// 17 significant digits: reads back to the identical double.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// Whole-token parse; nullopt on trailing garbage.
inline std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> required_fields(Scheme s) {
    std::vector<std::string> r{"scheme", "g_s1s2", "g_s2aR", "theta", "dt", "beta_aR", "n_collisions"};
    if (s == Scheme::B) {
        r.emplace_back("g_s1aL");
        r.emplace_back("beta_aL");
    }
    return r;
}

}  // namespace detail

inline SchemeConfig parse_config(std::string_view text) {
    SchemeConfig config;
    std::map<std::string, int> seen;  // key -> line
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const auto hash = raw.find('#');
        const std::string_view line = raw.substr(0, hash);
        if (detail::trim(line).empty()) continue;

        const auto eq = line.find('=');
        const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value'", {}, line_no, key_col);
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        const int value_col = static_cast<int>(eq + 1 + line.substr(eq + 1).find_first_not_of(" \t")) + 1;
        if (key.empty()) throw ConfigError("missing key before '='", {}, line_no, key_col);
        if (value.empty()) throw ConfigError("missing value", key, line_no, static_cast<int>(eq) + 2);
        if (seen.count(key)) {
            throw ConfigError("repeated key (first set on line " + std::to_string(seen[key]) + ")", key, line_no,
                              key_col);
        }
        seen[key] = line_no;

        if (key == "format") {
            if (value != kConfigFormat) {
                throw ConfigError("unsupported format '" + std::string(value) + "', expected " +
                                      std::string(kConfigFormat),
                                  key, line_no, value_col);
            }
        } else if (key == "scheme") {
            const auto s = parse_scheme(value);
            if (!s) throw ConfigError("must be A or B", key, line_no, value_col);
            config.scheme = *s;
        } else if (key == "allow_unused_left_fields") {
            if (value == "true") {
                config.allow_unused_left_fields = true;
            } else if (value == "false") {
                config.allow_unused_left_fields = false;
            } else {
                throw ConfigError("must be true or false", key, line_no, value_col);
            }
        } else if (is_numeric_field(key)) {
            const auto v = parse_number(value);
            if (!v) throw ConfigError("not a number: '" + std::string(value) + "'", key, line_no, value_col);
            try {
                set_numeric_field(config, key, *v);
            } catch (const ConfigError&) {
                throw ConfigError("must be an integer", key, line_no, value_col);
            }
        } else {
            throw ConfigError("unknown key", key, line_no, key_col);
        }
    }

    std::vector<std::string> missing;
    for (const auto& f : detail::required_fields(config.scheme)) {
        if (!seen.count(f)) missing.push_back(f);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
        throw ConfigError("missing required fields: " + list);
    }

    try {
        config.validate();
    } catch (const ConfigError& e) {
        const auto it = seen.find(e.field());
        const int line = it == seen.end() ? 0 : it->second;
        throw ConfigError(e.message(), e.field(), line, line ? 1 : 0);
    }
    return config;
}

inline SchemeConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Inverse of parse_config; every field is written with round-trip precision.
inline std::string format_config(const SchemeConfig& c) {
    std::ostringstream out;
    out << "format = " << kConfigFormat << "\n";
    out << "scheme = " << to_string(c.scheme) << "\n";
    for (auto name : kNumericFields) {
        if (name == "n_collisions") {
            out << name << " = " << c.n_collisions << "\n";
        } else {
            out << name << " = " << format_number(get_numeric_field(c, name)) << "\n";
        }
    }
    if (c.allow_unused_left_fields) out << "allow_unused_left_fields = true\n";
    return out.str();
}

}  // namespace qcm
