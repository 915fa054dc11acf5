#pragma once

#include <string>
#include <variant>
#include <vector>

#include "geosolve/errors.hpp"

namespace geosolve {

// Runtime value of the solution language: a number or a list of numbers.
using Value = std::variant<double, std::vector<double>>;

inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }
inline bool is_list(const Value& v) { return std::holds_alternative<std::vector<double>>(v); }

inline double as_number(const Value& v, std::string_view what = "value") {
    if (!is_number(v))
        throw EvalError(ErrorClass::Other, std::string(what) + " must be a number, got a list");
    return std::get<double>(v);
}

inline const std::vector<double>& as_list(const Value& v, std::string_view what = "value") {
    if (!is_list(v))
        throw EvalError(ErrorClass::Other, std::string(what) + " must be a list, got a number");
    return std::get<std::vector<double>>(v);
}

}  // namespace geosolve
