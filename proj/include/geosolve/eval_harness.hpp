#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "geosolve/dataset.hpp"
#include "geosolve/executor.hpp"

namespace geosolve {

// True iff the prediction lies within 3% of the label; a zero label gets an
// absolute 1e-6 band instead (a relative band around zero is empty).
// Throws std::invalid_argument on non-finite input.
bool relaxed_match(double prediction, double label);

// Aggregated outcomes for one slice of the dataset. The partition invariant
// correct + wrong_output + errors == total holds per bucket.
struct EvalBucket {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t wrong_output = 0;
    std::size_t errors = 0;
    std::array<std::size_t, 5> error_classes{};  // indexed by ErrorClass
    std::size_t successes = 0;                   // correct + wrong_output
    std::size_t successes_using_functions = 0;

    double relaxed_accuracy() const {
        return total ? static_cast<double>(correct) / total : 0.0;
    }
    // Share of successfully answered problems whose chosen program called at
    // least one library function.
    double function_usage() const {
        return successes ? static_cast<double>(successes_using_functions) / successes : 0.0;
    }
};

struct EvalReport {
    EvalBucket overall;
    std::map<int, EvalBucket> by_depth;  // keyed 1..3; depthless problems count only overall
};

// Runs first-executing candidate selection for every problem and classifies
// each as correct (relaxed match), wrong output, or error (five-way class).
// Requires exactly one prediction per problem. Problems are independent; the
// report is an order-independent fold of per-problem results.
EvalReport evaluate(const std::vector<ProblemRecord>& dataset,
                    const std::vector<PredictionRecord>& predictions,
                    const FunctionRegistry& registry, const MathContext& ctx,
                    const ExecutionLimits& limits = {});

// Aligned text table with one row per depth plus an overall row.
std::string format_report_table(const EvalReport& report);

// Structured form of the report, written by the eval CLI.
std::string report_to_json(const EvalReport& report);

}  // namespace geosolve
