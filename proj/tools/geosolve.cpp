// geosolve: command-line front end over the geometry solution runtime.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geosolve/dataset.hpp"
#include "geosolve/dsl.hpp"
#include "geosolve/embedding.hpp"
#include "geosolve/eval_harness.hpp"
#include "geosolve/executor.hpp"
#include "geosolve/forge.hpp"
#include "geosolve/retrieval.hpp"
#include "geosolve/synth.hpp"

namespace {

using namespace geosolve;

struct GlobalConfig {
    std::string library_path;  // empty -> bundled manifest
    std::string context = "geomverse";
};

const MathContext& context_from_name(const std::string& name) {
    if (name == "exact") return MathContext::exact();
    if (name == "geomverse") return MathContext::geomverse();
    throw std::invalid_argument("unknown context '" + name + "' (use exact or geomverse)");
}

FunctionRegistry load_registry(const GlobalConfig& global) {
    if (global.library_path.empty()) return FunctionRegistry::bundled();
    return FunctionRegistry::from_manifest_file(global.library_path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_program_command(const GlobalConfig& global, const std::string& program_path,
                        bool want_trace, bool explain) {
    FunctionRegistry registry = load_registry(global);
    const MathContext& ctx = context_from_name(global.context);

    ExecutionOutcome outcome;
    try {
        outcome = execute(dsl::parse(read_file(program_path)), registry, ctx);
    } catch (const EvalError& e) {
        outcome = ExecutionOutcome{ExecutionFailure{e.klass, e.what()}};
    }
    if (!outcome.ok()) {
        std::cerr << "error: " << to_string(outcome.failure().klass) << ": "
                  << outcome.failure().message << "\n";
        return 1;
    }
    if (explain) {
        std::cout << render_trace(outcome);
    } else {
        if (want_trace) std::cerr << render_trace(outcome);
        std::cout << outcome.success().answer_text << "\n";
    }
    return 0;
}

std::unique_ptr<EmbeddingProvider> provider_for_memory(const FunctionMemory& memory,
                                                       const std::string& endpoint) {
    if (memory.provider_identity.rfind("lexical", 0) == 0)
        return std::make_unique<LexicalEmbeddingProvider>();
    if (memory.provider_identity.rfind("service:", 0) == 0) {
        if (endpoint.empty())
            throw std::invalid_argument(
                "this memory was built by a service provider; pass --endpoint");
        ServiceEmbeddingProvider::Config cfg;
        cfg.endpoint = endpoint;
        cfg.name = memory.provider_identity.substr(8);
        return std::make_unique<ServiceEmbeddingProvider>(cfg);
    }
    throw std::invalid_argument("unknown provider identity '" + memory.provider_identity + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometry solution runtime: formula library, program executor, retrieval "
                 "memory, eval harness, data pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read defaults from an INI/TOML file");

    GlobalConfig global;
    app.add_option("--library", global.library_path, "function manifest JSON (default: bundled)")
        ->envname("GEOSOLVE_LIBRARY");
    app.add_option("--context", global.context, "math context: exact or geomverse")
        ->envname("GEOSOLVE_CONTEXT");

    // exec / explain
    std::string program_path;
    bool want_trace = false;
    auto* exec_cmd = app.add_subcommand("exec", "run a solution program and print its answer");
    exec_cmd->add_option("--program", program_path, "program source file")->required();
    exec_cmd->add_flag("--trace", want_trace, "print the explanation trace to stderr");

    auto* explain_cmd =
        app.add_subcommand("explain", "run a solution program and print its explanation trace");
    explain_cmd->add_option("--program", program_path, "program source file")->required();

    // eval
    std::string dataset_path, predictions_path, report_path;
    auto* eval_cmd = app.add_subcommand("eval", "score predictions against a dataset");
    eval_cmd->add_option("--dataset", dataset_path, "canonical dataset (jsonl)")->required();
    eval_cmd->add_option("--predictions", predictions_path, "predictions (jsonl)")->required();
    eval_cmd->add_option("--report", report_path, "write the structured report here");

    // build-memory
    std::string memory_out, embedder = "lexical", service_endpoint, service_name = "service";
    auto* build_cmd = app.add_subcommand("build-memory", "embed the function library");
    build_cmd->add_option("--out", memory_out, "memory file to write")->required();
    build_cmd->add_option("--embedder", embedder, "lexical or service");
    build_cmd->add_option("--endpoint", service_endpoint, "embedding service endpoint");
    build_cmd->add_option("--name", service_name, "service provider name");

    // retrieve
    std::string memory_path, query_text, query_image;
    std::size_t top_k = 10;
    auto* retrieve_cmd = app.add_subcommand("retrieve", "query the function memory");
    retrieve_cmd->add_option("--memory", memory_path, "memory file")->required();
    retrieve_cmd->add_option("--query", query_text, "query text")->required();
    retrieve_cmd->add_option("--k", top_k, "number of functions to return");
    retrieve_cmd->add_option("--image", query_image, "optional image reference");
    retrieve_cmd->add_option("--endpoint", service_endpoint, "embedding service endpoint");

    // gen-data
    std::string shots_path, out_dir, llm_endpoint, model = "teacher";
    std::size_t samples = 5;
    double temperature = 0.7;
    std::size_t max_in_flight = 4;
    bool resume = false;
    auto* gen_cmd = app.add_subcommand("gen-data", "sample and validate teacher completions");
    gen_cmd->add_option("--dataset", dataset_path, "canonical dataset (jsonl)")->required();
    gen_cmd->add_option("--shots", shots_path, "exemplar shots JSON")->required();
    gen_cmd->add_option("--endpoint", llm_endpoint, "chat-completion endpoint")->required();
    gen_cmd->add_option("--out", out_dir, "output directory")->required();
    gen_cmd->add_option("--samples", samples, "completions per problem");
    gen_cmd->add_option("--model", model, "model name sent to the service");
    gen_cmd->add_option("--temperature", temperature, "sampling temperature");
    gen_cmd->add_option("--max-in-flight", max_in_flight, "concurrent requests");
    gen_cmd->add_flag("--resume", resume, "skip problems already in the journal");

    // synth
    int depth = 1;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    std::string synth_out;
    bool with_gold = false;
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic problems with gold programs");
    synth_cmd->add_option("--depth", depth, "chain depth: 1, 2, or 3")->required();
    synth_cmd->add_option("--count", count, "number of problems")->required();
    synth_cmd->add_option("--seed", seed, "generator seed")->required();
    synth_cmd->add_option("--out", synth_out, "dataset file to write")->required();
    synth_cmd->add_flag("--with-gold", with_gold, "also write <out>.gold.jsonl");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exec_cmd->parsed()) return run_program_command(global, program_path, want_trace, false);
        if (explain_cmd->parsed()) return run_program_command(global, program_path, false, true);

        if (eval_cmd->parsed()) {
            FunctionRegistry registry = load_registry(global);
            const MathContext& ctx = context_from_name(global.context);
            auto dataset = load_dataset(dataset_path);
            auto predictions = load_predictions(predictions_path);
            EvalReport report = evaluate(dataset, predictions, registry, ctx);
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                if (!out) throw LoadError("cannot write report '" + report_path + "'");
                out << report_to_json(report) << "\n";
            }
            std::cout << format_report_table(report);
            return 0;
        }

        if (build_cmd->parsed()) {
            FunctionRegistry registry = load_registry(global);
            std::unique_ptr<EmbeddingProvider> provider;
            if (embedder == "lexical") {
                provider = std::make_unique<LexicalEmbeddingProvider>();
            } else if (embedder == "service") {
                ServiceEmbeddingProvider::Config cfg;
                cfg.endpoint = service_endpoint;
                cfg.name = service_name;
                provider = std::make_unique<ServiceEmbeddingProvider>(cfg);
            } else {
                throw std::invalid_argument("unknown embedder '" + embedder + "'");
            }
            FunctionMemory memory = build_memory(registry, *provider);
            save_memory(memory, memory_out);
            std::cerr << "wrote " << memory.entries.size() << " entries to " << memory_out << "\n";
            return 0;
        }

        if (retrieve_cmd->parsed()) {
            FunctionMemory memory = load_memory(memory_path);
            auto provider = provider_for_memory(memory, service_endpoint);
            std::optional<std::string> image;
            if (!query_image.empty()) image = query_image;
            RetrievalResult result = retrieve(memory, query_text, image, top_k, *provider);
            for (const auto& scored : result.ranked) {
                char line[256];
                std::snprintf(line, sizeof(line), "%s\t%.4f\n", scored.name.c_str(), scored.score);
                std::cout << line;
            }
            return 0;
        }

        if (gen_cmd->parsed()) {
            FunctionRegistry registry = load_registry(global);
            const MathContext& ctx = context_from_name(global.context);
            auto dataset = load_dataset(dataset_path);
            auto shots = load_shots(shots_path);
            ForgeConfig config;
            config.model = model;
            config.samples_per_problem = samples;
            config.temperature = temperature;
            config.max_in_flight = max_in_flight;
            config.expected_shots = shots.size();
            HttpChatClient client(llm_endpoint);
            ForgeStats stats =
                forge_to_dir(dataset, shots, registry, ctx, client, config, out_dir, resume);
            std::cout << "problems=" << stats.problems << " kept=" << stats.kept
                      << " transport_failures=" << stats.transport_failures << "\n";
            if (stats.problems > 0 && stats.transport_failures == stats.problems) return 1;
            return 0;
        }

        if (synth_cmd->parsed()) {
            auto problems = synth::generate(depth, count, seed);
            std::vector<ProblemRecord> records;
            records.reserve(problems.size());
            for (const auto& p : problems) records.push_back(p.record);
            save_dataset(records, synth_out);
            if (with_gold) {
                std::ofstream gold(synth_out + ".gold.jsonl");
                if (!gold) throw LoadError("cannot write '" + synth_out + ".gold.jsonl'");
                for (const auto& p : problems) {
                    nlohmann::ordered_json j;
                    j["id"] = p.record.id;
                    j["program"] = p.gold_program;
                    gold << j.dump() << '\n';
                }
            }
            std::cerr << "wrote " << records.size() << " problems to " << synth_out << "\n";
            return 0;
        }
    } catch (const EvalError& e) {
        std::cerr << "error: " << to_string(e.klass) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
