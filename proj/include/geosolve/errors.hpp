#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geosolve {

// The five-way failure taxonomy used by the executor and the eval harness.
enum class ErrorClass { MathDomain, NameError, SyntaxError, ZeroDivision, Other };

std::string_view to_string(ErrorClass klass);

// Base for every failure the runtime can classify. `klass` decides which
// taxonomy bucket the failure lands in.
struct EvalError : std::runtime_error {
    ErrorClass klass;
    EvalError(ErrorClass klass, const std::string& message)
        : std::runtime_error(message), klass(klass) {}
};

struct UnknownFunctionError : EvalError {
    explicit UnknownFunctionError(const std::string& name)
        : EvalError(ErrorClass::NameError, "unknown function '" + name + "'") {}
};

struct UnboundVariableError : EvalError {
    explicit UnboundVariableError(const std::string& name)
        : EvalError(ErrorClass::NameError, "unbound variable '" + name + "'") {}
};

struct DomainError : EvalError {
    explicit DomainError(const std::string& message)
        : EvalError(ErrorClass::MathDomain, message) {}
};

struct ZeroDivisionError : EvalError {
    explicit ZeroDivisionError(const std::string& message)
        : EvalError(ErrorClass::ZeroDivision, message) {}
};

struct ParseError : EvalError {
    int line;
    int column;
    ParseError(int line, int column, const std::string& message)
        : EvalError(ErrorClass::SyntaxError,
                    "line " + std::to_string(line) + ", column " + std::to_string(column) +
                        ": " + message),
          line(line),
          column(column) {}
};

// Manifest/dataset loading problems. Not part of the execution taxonomy.
struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace geosolve
