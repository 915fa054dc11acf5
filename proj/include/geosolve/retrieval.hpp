#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "geosolve/embedding.hpp"
#include "geosolve/function_library.hpp"

namespace geosolve {

struct MemoryEntry {
    std::string name;         // registry function name (the value)
    std::string source_text;  // the embedded "signature — description" string
    std::vector<float> key;   // L2-normalized embedding
};

// Non-parametric function memory: one embedded entry per library function.
// Immutable once built; lookups are read-only.
struct FunctionMemory {
    std::string provider_identity;
    std::size_t dimension = 0;
    std::vector<MemoryEntry> entries;
    std::vector<float> flat_keys;  // row-major entries x dimension, for scoring
};

// The string embedded for a function: "name(a, b) — description".
std::string memory_source_text(const FunctionSpec& spec);

// Embeds every registry function with `provider`. Throws on an empty registry
// or provider failure.
FunctionMemory build_memory(const FunctionRegistry& registry, EmbeddingProvider& provider);

struct ScoredName {
    std::string name;
    double score;  // cosine similarity in [-1, 1]
};

struct RetrievalResult {
    std::vector<ScoredName> ranked;  // scores nonincreasing, names distinct
};

// Exact cosine top-k over all entries; ties broken by lexicographic name.
// Requires 1 <= k <= |memory| and a provider whose identity matches the one
// the memory was built with.
RetrievalResult retrieve(const FunctionMemory& memory, const std::string& query_text,
                         const std::optional<std::string>& query_image, std::size_t k,
                         EmbeddingProvider& provider);

struct RetrievalQuery {
    std::string query_text;
    std::optional<std::string> query_image;
    std::set<std::string> gold;  // expected functions; subset of registry names
};

struct PrecisionRecallRow {
    std::size_t k;
    double precision;
    double recall;
};

struct RetrievalEvalReport {
    std::vector<PrecisionRecallRow> rows;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;  // problems with an empty gold set
};

// Mean precision/recall at each k over the evaluated problems.
RetrievalEvalReport evaluate_retrieval(const FunctionMemory& memory,
                                       const std::vector<RetrievalQuery>& problems,
                                       const std::vector<std::size_t>& ks,
                                       EmbeddingProvider& provider);

// Function list shown to the student model during training: retrieved names in
// rank order, then any missing gold names alphabetically, no duplicates.
std::vector<std::string> compose_training_prompt_functions(const RetrievalResult& retrieved,
                                                           const std::set<std::string>& gold);

void save_memory(const FunctionMemory& memory, const std::string& path);
FunctionMemory load_memory(const std::string& path);

}  // namespace geosolve
