#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "geosolve/dsl.hpp"
#include "geosolve/errors.hpp"
#include "geosolve/function_library.hpp"
#include "geosolve/math_context.hpp"

namespace geosolve {

struct ExecutionSuccess {
    double answer = 0.0;
    std::string answer_text;  // answer rendered under the execution context
    std::vector<ExplanationStep> trace;
    std::set<std::string> used_functions;
};

struct ExecutionFailure {
    ErrorClass klass = ErrorClass::Other;
    std::string message;
};

struct ExecutionOutcome {
    std::variant<ExecutionSuccess, ExecutionFailure> result;

    bool ok() const { return std::holds_alternative<ExecutionSuccess>(result); }
    const ExecutionSuccess& success() const { return std::get<ExecutionSuccess>(result); }
    const ExecutionFailure& failure() const { return std::get<ExecutionFailure>(result); }
};

struct ExecutionLimits {
    // Evaluated AST nodes before the run is cut off (Other class).
    std::size_t max_steps = 10000;
};

// Evaluates a parsed program against the registry under `ctx`. Statements run
// in order over a variable environment; under a FixedDecimal context every
// assigned (and the returned) value is rounded before binding, which is what
// makes multi-step chains land on the corpus' printed intermediates. Never
// throws for program-level problems: failures come back classified
// (MathDomain, NameError, ZeroDivision, SyntaxError, Other).
ExecutionOutcome execute(const dsl::SolutionProgram& program, const FunctionRegistry& registry,
                         const MathContext& ctx, const ExecutionLimits& limits = {});

// Candidate program sources in generation order.
struct CandidateSet {
    std::vector<std::string> programs;
};

struct CandidateResult {
    std::optional<std::size_t> chosen_index;
    ExecutionOutcome outcome;
};

// Parses and executes candidates in order and returns the first Success with
// its index. When every candidate fails, returns no index and the first
// candidate's failure.
CandidateResult run_first_executing(const CandidateSet& candidates,
                                    const FunctionRegistry& registry, const MathContext& ctx,
                                    const ExecutionLimits& limits = {});

// One line per explanation step in execution order, then
// "Therefore the final answer is <answer>.". Throws std::logic_error on a
// failed outcome.
std::string render_trace(const ExecutionOutcome& outcome);

}  // namespace geosolve
