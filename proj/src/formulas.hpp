#pragma once

#include <span>
#include <string_view>

#include "geosolve/math_context.hpp"
#include "geosolve/value.hpp"

namespace geosolve::detail {

using FormulaFn = double (*)(std::span<const Value>, const MathContext&);

bool formula_exists(std::string_view formula_id);

// Looks up the implementation behind a manifest formula_id. Throws LoadError
// if the id is unknown (manifest validation calls formula_exists first).
FormulaFn formula_for(std::string_view formula_id);

}  // namespace geosolve::detail
