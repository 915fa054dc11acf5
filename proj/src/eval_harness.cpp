#include "geosolve/eval_harness.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace geosolve {

bool relaxed_match(double prediction, double label) {
    if (!std::isfinite(prediction) || !std::isfinite(label))
        throw std::invalid_argument("relaxed_match requires finite inputs");
    if (label == 0.0) return std::abs(prediction) <= 1e-6;
    return std::abs(prediction - label) <= 0.03 * std::abs(label);
}

namespace {

void tally(EvalBucket& bucket, const ExecutionOutcome& outcome, bool matched) {
    ++bucket.total;
    if (outcome.ok()) {
        ++bucket.successes;
        if (!outcome.success().used_functions.empty()) ++bucket.successes_using_functions;
        if (matched)
            ++bucket.correct;
        else
            ++bucket.wrong_output;
    } else {
        ++bucket.errors;
        ++bucket.error_classes[static_cast<std::size_t>(outcome.failure().klass)];
    }
}

}  // namespace

EvalReport evaluate(const std::vector<ProblemRecord>& dataset,
                    const std::vector<PredictionRecord>& predictions,
                    const FunctionRegistry& registry, const MathContext& ctx,
                    const ExecutionLimits& limits) {
    std::unordered_map<std::string, const PredictionRecord*> by_id;
    for (const auto& pred : predictions) {
        if (!by_id.emplace(pred.id, &pred).second)
            throw std::invalid_argument("duplicate prediction for problem '" + pred.id + "'");
    }
    std::unordered_map<std::string, bool> known;
    for (const auto& problem : dataset) known.emplace(problem.id, true);
    for (const auto& pred : predictions)
        if (!known.count(pred.id))
            throw std::invalid_argument("prediction for unknown problem '" + pred.id + "'");

    EvalReport report;
    for (const auto& problem : dataset) {
        auto it = by_id.find(problem.id);
        if (it == by_id.end())
            throw std::invalid_argument("no prediction for problem '" + problem.id + "'");

        CandidateResult result = run_first_executing(it->second->candidates, registry, ctx, limits);
        bool matched =
            result.outcome.ok() && relaxed_match(result.outcome.success().answer, problem.label);
        tally(report.overall, result.outcome, matched);
        if (problem.depth) tally(report.by_depth[*problem.depth], result.outcome, matched);
    }
    return report;
}

namespace {

void table_row(std::string& out, const std::string& name, const EvalBucket& b) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%-8s %8zu %8zu %8zu %8zu %12zu %6zu %8zu %10zu %7zu %8.1f%% %8.1f%%\n",
                  name.c_str(), b.total, b.correct, b.wrong_output, b.errors,
                  b.error_classes[0], b.error_classes[1], b.error_classes[2], b.error_classes[3],
                  b.error_classes[4], 100.0 * b.function_usage(), 100.0 * b.relaxed_accuracy());
    out += buf;
}

nlohmann::ordered_json bucket_json(const EvalBucket& b) {
    nlohmann::ordered_json j;
    j["total"] = b.total;
    j["correct"] = b.correct;
    j["wrong_output"] = b.wrong_output;
    j["errors"] = b.errors;
    j["math_domain_errors"] = b.error_classes[0];
    j["name_errors"] = b.error_classes[1];
    j["syntax_errors"] = b.error_classes[2];
    j["zero_division_errors"] = b.error_classes[3];
    j["other_errors"] = b.error_classes[4];
    j["function_usage"] = b.function_usage();
    j["relaxed_accuracy"] = b.relaxed_accuracy();
    return j;
}

}  // namespace

std::string format_report_table(const EvalReport& report) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-8s %8s %8s %8s %8s %12s %6s %8s %10s %7s %9s %9s\n", "",
                  "Total", "Correct", "Wrong", "Errors", "Math-domain", "Name", "Syntax",
                  "Zero Div.", "Other", "FuncUse", "RelAcc");
    out += buf;
    for (const auto& [depth, bucket] : report.by_depth)
        table_row(out, "Depth " + std::to_string(depth), bucket);
    table_row(out, "Overall", report.overall);
    return out;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["overall"] = bucket_json(report.overall);
    nlohmann::ordered_json depths = nlohmann::ordered_json::object();
    for (const auto& [depth, bucket] : report.by_depth)
        depths[std::to_string(depth)] = bucket_json(bucket);
    j["by_depth"] = std::move(depths);
    return j.dump(2);
}

}  // namespace geosolve
