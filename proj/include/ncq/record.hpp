#pragma once

/// @file record.hpp
/// Flat key/value output records with JSON and CSV writers.
///
/// Every number is written with 17 significant digits ("%.17g"), identically
/// in both formats.  Non-finite numbers and absent values become JSON null
/// and an empty CSV field.

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ncq {

class OutputRecord {
public:
    using Value = std::variant<std::monostate, double, std::int64_t, bool, std::string, std::vector<double>,
                               std::vector<std::int64_t>>;

    OutputRecord& add(std::string key, Value value) {
        fields_.emplace_back(std::move(key), std::move(value));
        return *this;
    }

    OutputRecord& add_optional(std::string key, std::optional<double> value) {
        return value ? add(std::move(key), Value(*value)) : add(std::move(key), Value(std::monostate{}));
    }

    const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }

    std::string to_json() const {
        std::string out = "{";
        bool first = true;
        for (const auto& [key, value] : fields_) {
            if (!first) {
                out += ",";
            }
            first = false;
            out += nlohmann::json(key).dump() + ":" + json_value(value);
        }
        out += "}";
        return out;
    }

    /// Header line followed by one data line.  List values are joined with ';'.
    std::string to_csv() const {
        std::string header;
        std::string row;
        bool first = true;
        for (const auto& [key, value] : fields_) {
            if (!first) {
                header += ",";
                row += ",";
            }
            first = false;
            header += csv_escape(key);
            row += csv_value(value);
        }
        return header + "\n" + row;
    }

    static std::string number(double v) {
        if (!std::isfinite(v)) {
            return {};
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    static std::string json_number(double v) {
        const std::string s = number(v);
        return s.empty() ? "null" : s;
    }

    static std::string json_value(const Value& value) {
        return std::visit(
            [](const auto& v) -> std::string {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::monostate>) {
                    return "null";
                } else if constexpr (std::is_same_v<V, double>) {
                    return json_number(v);
                } else if constexpr (std::is_same_v<V, std::int64_t>) {
                    return std::to_string(v);
                } else if constexpr (std::is_same_v<V, bool>) {
                    return v ? "true" : "false";
                } else if constexpr (std::is_same_v<V, std::string>) {
                    return nlohmann::json(v).dump();
                } else {
                    std::string out = "[";
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        if (i) {
                            out += ",";
                        }
                        if constexpr (std::is_same_v<V, std::vector<double>>) {
                            out += json_number(v[i]);
                        } else {
                            out += std::to_string(v[i]);
                        }
                    }
                    return out + "]";
                }
            },
            value);
    }

    static std::string csv_value(const Value& value) {
        return std::visit(
            [](const auto& v) -> std::string {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::monostate>) {
                    return {};
                } else if constexpr (std::is_same_v<V, double>) {
                    return number(v);
                } else if constexpr (std::is_same_v<V, std::int64_t>) {
                    return std::to_string(v);
                } else if constexpr (std::is_same_v<V, bool>) {
                    return v ? "true" : "false";
                } else if constexpr (std::is_same_v<V, std::string>) {
                    return csv_escape(v);
                } else {
                    std::string out;
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        if (i) {
                            out += ";";
                        }
                        if constexpr (std::is_same_v<V, std::vector<double>>) {
                            out += number(v[i]);
                        } else {
                            out += std::to_string(v[i]);
                        }
                    }
                    return out;
                }
            },
            value);
    }

    static std::string csv_escape(const std::string& s) {
        if (s.find_first_of(",\"\n;") == std::string::npos) {
            return s;
        }
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') {
                out += '"';
            }
            out += c;
        }
        return out + "\"";
    }

    std::vector<std::pair<std::string, Value>> fields_;
};

} // namespace ncq
