#include "geosolve/forge.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "geosolve/dsl.hpp"
#include "geosolve/errors.hpp"

namespace geosolve {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<Shot> load_shots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open shots file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed shots file: ") + e.what());
    }
    std::vector<Shot> shots;
    try {
        for (const auto& j : doc.at("shots")) {
            Shot s;
            s.question = j.at("question").get<std::string>();
            s.cot = j.at("cot").get<std::string>();
            s.program = j.at("program").get<std::string>();
            if (j.contains("tikz") && !j["tikz"].is_null())
                s.tikz = j["tikz"].get<std::string>();
            shots.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed shots file: ") + e.what());
    }
    return shots;
}

std::string render_library_listing(const FunctionRegistry& registry) {
    std::string out;
    std::size_t i = 0;
    for (const auto& spec : registry.specs()) {
        out += std::to_string(++i) + ". " + spec.signature() + " - " + spec.description + "\n";
    }
    return out;
}

std::string build_prompt(const ProblemRecord& target, std::span<const Shot> shots,
                         const FunctionRegistry& registry) {
    if (shots.empty()) throw std::invalid_argument("prompt needs at least one exemplar shot");

    std::string prompt =
        "You are given a plane-geometry problem. Write a short Python function named "
        "solution() that solves it using the geometry function library below. Assign "
        "intermediate values to variables, call a library function wherever a formula is "
        "needed, and return the final numeric answer.\n\nFunction library:\n";
    prompt += render_library_listing(registry);
    prompt += "\n";

    std::size_t i = 0;
    for (const auto& shot : shots) {
        prompt += "Example " + std::to_string(++i) + "\n";
        prompt += "Question: " + shot.question + "\n";
        if (shot.tikz) prompt += "Figure (TikZ):\n" + *shot.tikz + "\n";
        prompt += "Reasoning: " + shot.cot + "\n";
        prompt += "Code:\n" + shot.program;
        if (prompt.back() != '\n') prompt += '\n';
        prompt += "\n";
    }

    prompt += "Now solve this problem.\n";
    prompt += "Question: " + target.question + "\n";
    if (target.tikz) prompt += "Figure (TikZ):\n" + *target.tikz + "\n";
    prompt += "Code:\n";
    return prompt;
}

std::string extract_program(const std::string& completion) {
    auto start = completion.find("def solution():");
    if (start == std::string::npos) {
        // Leave it to the parser; the rejection lands in the syntax bucket.
        return completion;
    }
    std::string out;
    std::istringstream in(completion.substr(start));
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            out += line + "\n";
            first = false;
            continue;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("```", 0) == 0) break;
        if (line[0] != ' ' && line[0] != '\t') break;
        out += line + "\n";
    }
    return out;
}

void save_tuning_records(const std::vector<TuningRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write tuning records '" + path + "'");
    for (const auto& rec : records) {
        ordered_json j;
        j["id"] = rec.id;
        j["question"] = rec.question;
        if (rec.image_ref) j["image_ref"] = *rec.image_ref;
        j["code"] = rec.code;
        j["validated_answer"] = rec.validated_answer;
        out << j.dump() << '\n';
    }
}

std::vector<TuningRecord> load_tuning_records(const std::string& path,
                                              const FunctionRegistry& registry,
                                              const MathContext& ctx) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open tuning records '" + path + "'");
    std::vector<TuningRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw LoadError(where + ": " + e.what());
        }
        TuningRecord rec;
        try {
            rec.id = j.at("id").get<std::string>();
            rec.question = j.at("question").get<std::string>();
            rec.code = j.at("code").get<std::string>();
            rec.validated_answer = j.at("validated_answer").get<double>();
            if (j.contains("image_ref") && !j["image_ref"].is_null())
                rec.image_ref = j["image_ref"].get<std::string>();
        } catch (const json::exception& e) {
            throw LoadError(where + ": " + e.what());
        }
        // Idempotent re-check: the stored code must still execute to the
        // stored answer.
        ExecutionOutcome outcome;
        try {
            outcome = execute(dsl::parse(rec.code), registry, ctx);
        } catch (const EvalError& e) {
            throw LoadError(where + ": record no longer parses: " + e.what());
        }
        if (!outcome.ok())
            throw LoadError(where + ": record no longer executes: " + outcome.failure().message);
        if (!relaxed_match(outcome.success().answer, rec.validated_answer))
            throw LoadError(where + ": record no longer reproduces its validated answer");
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

struct ProblemOutcome {
    bool skipped = false;
    bool transport_failed = false;
    std::vector<TuningRecord> records;
    std::size_t samples = 0;
    std::size_t duplicates = 0;
    std::size_t wrong_output = 0;
    std::map<std::string, std::size_t> rejected_by_class;
};

ProblemOutcome process_problem(const ProblemRecord& problem, const std::string& prompt,
                               const FunctionRegistry& registry, const MathContext& ctx,
                               ChatCompletionClient& client, const ForgeConfig& config) {
    ProblemOutcome out;
    ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.n = static_cast<int>(config.samples_per_problem);
    request.messages = {{"user", prompt}};

    std::vector<std::string> completions;
    try {
        completions = client.complete(request);
    } catch (const ChatTransportError&) {
        out.transport_failed = true;
        return out;
    }

    std::set<std::string> seen_code;
    for (const auto& completion : completions) {
        ++out.samples;
        std::string code = extract_program(completion);
        ExecutionOutcome outcome;
        try {
            outcome = execute(dsl::parse(code), registry, ctx);
        } catch (const EvalError& e) {
            ++out.rejected_by_class[std::string(to_string(e.klass))];
            continue;
        }
        if (!outcome.ok()) {
            ++out.rejected_by_class[std::string(to_string(outcome.failure().klass))];
            continue;
        }
        if (!relaxed_match(outcome.success().answer, problem.label)) {
            ++out.wrong_output;
            continue;
        }
        if (!seen_code.insert(code).second) {
            ++out.duplicates;
            continue;
        }
        out.records.push_back(TuningRecord{problem.id, problem.question, problem.image_ref, code,
                                           outcome.success().answer});
    }
    return out;
}

}  // namespace

ForgeResult forge(const std::vector<ProblemRecord>& dataset, std::span<const Shot> shots,
                  const FunctionRegistry& registry, const MathContext& ctx,
                  ChatCompletionClient& client, const ForgeConfig& config,
                  const std::set<std::string>* skip_ids) {
    if (config.samples_per_problem < 1)
        throw std::invalid_argument("samples_per_problem must be at least 1");
    if (shots.size() != config.expected_shots)
        throw std::invalid_argument("expected " + std::to_string(config.expected_shots) +
                                    " exemplar shots, got " + std::to_string(shots.size()));
    for (const auto& problem : dataset)
        if (!std::isfinite(problem.label))
            throw std::invalid_argument("problem '" + problem.id + "' lacks a finite label");

    std::vector<ProblemOutcome> outcomes(dataset.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::max<std::size_t>(1, std::min(config.max_in_flight, dataset.size()));

    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= dataset.size()) return;
            if (skip_ids && skip_ids->count(dataset[i].id)) {
                outcomes[i].skipped = true;
                continue;
            }
            std::string prompt = build_prompt(dataset[i], shots, registry);
            outcomes[i] = process_problem(dataset[i], prompt, registry, ctx, client, config);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    ForgeResult result;
    result.stats.temperature = config.temperature;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto& o = outcomes[i];
        if (o.skipped) {
            ++result.stats.skipped;
            continue;
        }
        ++result.stats.problems;
        result.stats.samples += o.samples;
        result.stats.duplicates += o.duplicates;
        result.stats.wrong_output += o.wrong_output;
        if (o.transport_failed) ++result.stats.transport_failures;
        for (const auto& [klass, count] : o.rejected_by_class)
            result.stats.rejected_by_class[klass] += count;
        result.stats.kept += o.records.size();
        result.stats.yield_per_problem.emplace_back(dataset[i].id, o.records.size());
        for (auto& rec : o.records) result.records.push_back(std::move(rec));
    }
    return result;
}

namespace {

std::set<std::string> load_journal(const std::string& path) {
    std::set<std::string> done;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            done.insert(json::parse(line).at("id").get<std::string>());
        } catch (const json::exception&) {
            // A torn final line from an interrupted run is ignored.
        }
    }
    return done;
}

ordered_json stats_json(const ForgeStats& stats) {
    ordered_json j;
    j["problems"] = stats.problems;
    j["skipped"] = stats.skipped;
    j["samples"] = stats.samples;
    j["kept"] = stats.kept;
    j["duplicates"] = stats.duplicates;
    j["wrong_output"] = stats.wrong_output;
    j["transport_failures"] = stats.transport_failures;
    j["temperature"] = stats.temperature;
    ordered_json classes = ordered_json::object();
    for (const auto& [klass, count] : stats.rejected_by_class) classes[klass] = count;
    j["rejected_by_class"] = std::move(classes);
    ordered_json yields = ordered_json::array();
    for (const auto& [id, kept] : stats.yield_per_problem)
        yields.push_back(ordered_json{{"id", id}, {"kept", kept}});
    j["yield_per_problem"] = std::move(yields);
    return j;
}

}  // namespace

ForgeStats forge_to_dir(const std::vector<ProblemRecord>& dataset, std::span<const Shot> shots,
                        const FunctionRegistry& registry, const MathContext& ctx,
                        ChatCompletionClient& client, const ForgeConfig& config,
                        const std::string& out_dir, bool resume) {
    fs::create_directories(out_dir);
    const std::string journal_path = (fs::path(out_dir) / "journal.jsonl").string();
    const std::string records_path = (fs::path(out_dir) / "records.jsonl").string();
    const std::string stats_path = (fs::path(out_dir) / "stats.json").string();

    std::set<std::string> done;
    if (resume) {
        done = load_journal(journal_path);
    } else {
        std::ofstream(journal_path, std::ios::trunc);
        std::ofstream(records_path, std::ios::trunc);
    }

    ForgeResult result = forge(dataset, shots, registry, ctx, client, config,
                               done.empty() ? nullptr : &done);

    {
        std::ofstream records(records_path, std::ios::app);
        for (const auto& rec : result.records) {
            ordered_json j;
            j["id"] = rec.id;
            j["question"] = rec.question;
            if (rec.image_ref) j["image_ref"] = *rec.image_ref;
            j["code"] = rec.code;
            j["validated_answer"] = rec.validated_answer;
            records << j.dump() << '\n';
        }
    }
    {
        std::ofstream journal(journal_path, std::ios::app);
        for (const auto& [id, kept] : result.stats.yield_per_problem)
            journal << ordered_json{{"id", id}, {"kept", kept}}.dump() << '\n';
    }
    {
        std::ofstream stats(stats_path, std::ios::trunc);
        stats << stats_json(result.stats).dump(2) << '\n';
    }
    return result.stats;
}

}  // namespace geosolve
