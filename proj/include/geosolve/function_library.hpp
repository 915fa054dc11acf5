#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geosolve/math_context.hpp"
#include "geosolve/value.hpp"

namespace geosolve {

enum class ParamKind { Length, AngleDeg, Area, Perimeter, ArcLength, Number, NumberList };

ParamKind param_kind_from_string(std::string_view s);
std::string_view to_string(ParamKind kind);

struct ParamSpec {
    std::string name;
    ParamKind kind;
};

// One library function as declared by the manifest: its signature, a prose
// description, the explanation template (one {param} slot per parameter plus
// a {result} slot), and the id of the formula that backs it.
struct FunctionSpec {
    std::string name;
    std::vector<ParamSpec> params;
    std::string description;
    std::string template_text;
    std::string formula_id;

    // "name(a, b, c)"
    std::string signature() const;
};

// The record a library call leaves behind: which function ran, with which
// argument values, what it returned, and the filled explanation sentence.
struct ExplanationStep {
    std::string function;
    std::vector<std::pair<std::string, Value>> args;
    double result = 0.0;
    std::string text;
};

// a*x + b*y = c. Solution-language programs spell one as a 3-element list.
struct LinearEquation {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    // Validates shape (exactly 3 numbers) and (a, b) != (0, 0).
    static LinearEquation from_value(const Value& v);
};

// Immutable set of library functions. Built once from a manifest, then only
// read; safe to share across threads.
class FunctionRegistry {
  public:
    static FunctionRegistry from_manifest_text(std::string_view json_text);
    static FunctionRegistry from_manifest_file(const std::string& path);

    // The 47-function registry built from the manifest compiled into the
    // binary (data/function_library.json is the source of truth).
    static const FunctionRegistry& bundled();

    bool contains(std::string_view name) const;
    const FunctionSpec* find(std::string_view name) const;
    const std::vector<FunctionSpec>& specs() const { return specs_; }
    std::size_t size() const { return specs_.size(); }

    // Dispatches `name` over the formula catalog: validates arity and
    // argument shape, applies the formula under `ctx` (trig values rounded
    // first when the context says so), rounds the result per the context's
    // policy, and fills the explanation template.
    // Throws UnknownFunctionError, DomainError, ZeroDivisionError, or
    // EvalError(Other) for arity/shape problems.
    std::pair<double, ExplanationStep> eval(std::string_view name, std::span<const Value> args,
                                            const MathContext& ctx) const;

  private:
    std::vector<FunctionSpec> specs_;
    std::unordered_map<std::string, std::size_t> index_;
};

// JSON text of the bundled default manifest (generated at build time from
// data/function_library.json).
const char* bundled_manifest_json();

}  // namespace geosolve
