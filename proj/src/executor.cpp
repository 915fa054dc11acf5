#include "geosolve/executor.hpp"

#include <cmath>
#include <unordered_map>

namespace geosolve {
namespace {

struct StepBudgetExceeded {};

class Interpreter {
  public:
    Interpreter(const FunctionRegistry& registry, const MathContext& ctx,
                const ExecutionLimits& limits)
        : registry_(registry), ctx_(ctx), limits_(limits) {}

    ExecutionSuccess run(const dsl::SolutionProgram& program) {
        ExecutionSuccess out;
        for (const auto& stmt : program.body) {
            charge();
            Value value = eval(*stmt.expr, out);
            if (stmt.kind == dsl::Statement::Kind::Assign) {
                env_[stmt.target] = rounded(std::move(value));
            } else {
                Value final_value = rounded(std::move(value));
                out.answer = as_number(final_value, "the returned value");
                out.answer_text = render_number(out.answer, ctx_);
                return out;
            }
        }
        // The parser guarantees a trailing return.
        throw EvalError(ErrorClass::Other, "program ended without returning");
    }

  private:
    void charge() {
        if (++steps_ > limits_.max_steps) throw StepBudgetExceeded{};
    }

    Value rounded(Value v) const {
        if (is_number(v)) return round_value(std::get<double>(v), ctx_);
        auto list = std::get<std::vector<double>>(std::move(v));
        for (double& x : list) x = round_value(x, ctx_);
        return list;
    }

    double require_finite(double x) const {
        if (!std::isfinite(x))
            throw EvalError(ErrorClass::Other, "non-finite intermediate value");
        return x;
    }

    Value eval(const dsl::Expr& expr, ExecutionSuccess& out) {
        charge();
        return std::visit(
            [&](const auto& node) -> Value {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, dsl::NumberLit>) {
                    return node.value;
                } else if constexpr (std::is_same_v<T, dsl::VarRef>) {
                    auto it = env_.find(node.name);
                    if (it == env_.end()) throw UnboundVariableError(node.name);
                    return it->second;
                } else if constexpr (std::is_same_v<T, dsl::Negate>) {
                    return -as_number(eval(*node.operand, out), "operand of unary minus");
                } else if constexpr (std::is_same_v<T, dsl::Binary>) {
                    double lhs = as_number(eval(*node.lhs, out), "left operand");
                    double rhs = as_number(eval(*node.rhs, out), "right operand");
                    switch (node.op) {
                        case dsl::BinaryOp::Add: return require_finite(lhs + rhs);
                        case dsl::BinaryOp::Sub: return require_finite(lhs - rhs);
                        case dsl::BinaryOp::Mul: return require_finite(lhs * rhs);
                        case dsl::BinaryOp::Div:
                            if (rhs == 0.0) throw ZeroDivisionError("division by zero");
                            return require_finite(lhs / rhs);
                    }
                    throw EvalError(ErrorClass::Other, "unreachable operator");
                } else if constexpr (std::is_same_v<T, dsl::Call>) {
                    std::vector<Value> args;
                    args.reserve(node.args.size());
                    for (const auto& arg : node.args) args.push_back(eval(*arg, out));
                    auto [value, step] = registry_.eval(node.callee, args, ctx_);
                    require_finite(value);
                    out.used_functions.insert(node.callee);
                    out.trace.push_back(std::move(step));
                    return value;
                } else if constexpr (std::is_same_v<T, dsl::ListLit>) {
                    std::vector<double> list;
                    list.reserve(node.elements.size());
                    for (const auto& el : node.elements)
                        list.push_back(as_number(eval(*el, out), "list element"));
                    return list;
                }
            },
            expr.node);
    }

    const FunctionRegistry& registry_;
    const MathContext& ctx_;
    const ExecutionLimits& limits_;
    std::unordered_map<std::string, Value> env_;
    std::size_t steps_ = 0;
};

}  // namespace

ExecutionOutcome execute(const dsl::SolutionProgram& program, const FunctionRegistry& registry,
                         const MathContext& ctx, const ExecutionLimits& limits) {
    try {
        Interpreter interp(registry, ctx, limits);
        return ExecutionOutcome{interp.run(program)};
    } catch (const StepBudgetExceeded&) {
        return ExecutionOutcome{ExecutionFailure{ErrorClass::Other, "step budget exceeded"}};
    } catch (const EvalError& e) {
        return ExecutionOutcome{ExecutionFailure{e.klass, e.what()}};
    } catch (const std::exception& e) {
        return ExecutionOutcome{ExecutionFailure{ErrorClass::Other, e.what()}};
    }
}

CandidateResult run_first_executing(const CandidateSet& candidates,
                                    const FunctionRegistry& registry, const MathContext& ctx,
                                    const ExecutionLimits& limits) {
    if (candidates.programs.empty())
        throw std::invalid_argument("candidate set must not be empty");
    std::optional<ExecutionOutcome> first_failure;
    for (std::size_t i = 0; i < candidates.programs.size(); ++i) {
        ExecutionOutcome outcome;
        try {
            dsl::SolutionProgram program = dsl::parse(candidates.programs[i]);
            outcome = execute(program, registry, ctx, limits);
        } catch (const EvalError& e) {
            outcome = ExecutionOutcome{ExecutionFailure{e.klass, e.what()}};
        }
        if (outcome.ok()) return CandidateResult{i, std::move(outcome)};
        if (!first_failure) first_failure = std::move(outcome);
    }
    return CandidateResult{std::nullopt, std::move(*first_failure)};
}

std::string render_trace(const ExecutionOutcome& outcome) {
    if (!outcome.ok())
        throw std::logic_error("render_trace requires a successful outcome");
    const auto& success = outcome.success();
    std::string out;
    for (const auto& step : success.trace) {
        out += step.text;
        out += '\n';
    }
    out += "Therefore the final answer is " + success.answer_text + ".\n";
    return out;
}

}  // namespace geosolve
