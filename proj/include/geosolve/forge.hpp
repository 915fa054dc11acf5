#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geosolve/chat_client.hpp"
#include "geosolve/dataset.hpp"
#include "geosolve/eval_harness.hpp"

namespace geosolve {

// One few-shot exemplar: a worked problem with its figure text, reasoning,
// and gold program.
struct Shot {
    std::string question;
    std::optional<std::string> tikz;
    std::string cot;
    std::string program;
};

// Loads exemplars from a JSON file {"shots": [...]}.
std::vector<Shot> load_shots(const std::string& path);

// Numbered one-line-per-function catalog rendering used inside prompts.
std::string render_library_listing(const FunctionRegistry& registry);

// Deterministic teacher prompt: instructions, the full library listing, the
// exemplar blocks, then the target question (with its TikZ figure when
// present). Throws std::invalid_argument when no shots are supplied.
std::string build_prompt(const ProblemRecord& target, std::span<const Shot> shots,
                         const FunctionRegistry& registry);

// Pulls the solution program out of a raw completion: code fences are
// stripped and everything from "def solution():" through its indented block
// is kept. Returns the trimmed completion when no definition is found (it
// will then fail to parse and be tallied as a syntax rejection).
std::string extract_program(const std::string& completion);

// A validated question -> code training pair.
struct TuningRecord {
    std::string id;
    std::string question;
    std::optional<std::string> image_ref;
    std::string code;
    double validated_answer = 0.0;
};

void save_tuning_records(const std::vector<TuningRecord>& records, const std::string& path);

// Loads records and re-validates each: the code must parse and its execution
// under `ctx` must relaxed-match the stored answer. Invalid records raise.
std::vector<TuningRecord> load_tuning_records(const std::string& path,
                                              const FunctionRegistry& registry,
                                              const MathContext& ctx);

struct ForgeConfig {
    std::string model = "teacher";
    std::size_t samples_per_problem = 5;
    double temperature = 0.7;
    std::size_t max_in_flight = 4;
    std::size_t expected_shots = 6;
};

struct ForgeStats {
    std::size_t problems = 0;
    std::size_t skipped = 0;  // already present in the resume journal
    std::size_t samples = 0;
    std::size_t kept = 0;
    std::size_t duplicates = 0;
    std::size_t wrong_output = 0;
    std::size_t transport_failures = 0;
    std::map<std::string, std::size_t> rejected_by_class;
    std::vector<std::pair<std::string, std::size_t>> yield_per_problem;
    double temperature = 0.0;
};

struct ForgeResult {
    std::vector<TuningRecord> records;
    ForgeStats stats;
};

// Requests samples_per_problem completions per problem, validates each by
// parsing and executing against the problem label, drops exact-duplicate
// programs per problem, and returns the surviving records in dataset order.
// Transport failures are retried by the client, then recorded per problem;
// they never abort the batch. Problems run concurrently up to max_in_flight.
ForgeResult forge(const std::vector<ProblemRecord>& dataset, std::span<const Shot> shots,
                  const FunctionRegistry& registry, const MathContext& ctx,
                  ChatCompletionClient& client, const ForgeConfig& config,
                  const std::set<std::string>* skip_ids = nullptr);

// File-based runner: writes records.jsonl, stats.json, and a journal.jsonl
// progress journal under out_dir. With resume=true, problems already in the
// journal are skipped and new records are appended, so reruns never emit
// duplicates.
ForgeStats forge_to_dir(const std::vector<ProblemRecord>& dataset, std::span<const Shot> shots,
                        const FunctionRegistry& registry, const MathContext& ctx,
                        ChatCompletionClient& client, const ForgeConfig& config,
                        const std::string& out_dir, bool resume);

}  // namespace geosolve
