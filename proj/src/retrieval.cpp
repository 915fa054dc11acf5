#include "geosolve/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "geosolve/errors.hpp"
#include "geosolve/simd.hpp"

namespace geosolve {

using nlohmann::json;

std::string memory_source_text(const FunctionSpec& spec) {
    return spec.signature() + " — " + spec.description;
}

namespace {

void l2_normalize(std::vector<float>& v) {
    float norm2 = simd::dot(v, v);
    if (norm2 > 0.0f) {
        float inv = 1.0f / std::sqrt(norm2);
        for (float& x : v) x *= inv;
    }
}

void rebuild_flat_keys(FunctionMemory& memory) {
    memory.flat_keys.clear();
    memory.flat_keys.reserve(memory.entries.size() * memory.dimension);
    for (const auto& e : memory.entries)
        memory.flat_keys.insert(memory.flat_keys.end(), e.key.begin(), e.key.end());
}

}  // namespace

FunctionMemory build_memory(const FunctionRegistry& registry, EmbeddingProvider& provider) {
    if (registry.size() == 0)
        throw std::invalid_argument("cannot build a function memory from an empty registry");

    std::vector<std::string> texts;
    texts.reserve(registry.size());
    for (const auto& spec : registry.specs()) texts.push_back(memory_source_text(spec));

    auto vectors = provider.embed_batch(texts, {});

    FunctionMemory memory;
    memory.provider_identity = provider.identity();
    memory.dimension = vectors.empty() ? provider.dimension() : vectors.front().size();
    for (std::size_t i = 0; i < registry.specs().size(); ++i) {
        if (vectors[i].size() != memory.dimension)
            throw LoadError("provider returned inconsistent embedding dimensions");
        l2_normalize(vectors[i]);
        memory.entries.push_back(
            MemoryEntry{registry.specs()[i].name, texts[i], std::move(vectors[i])});
    }
    rebuild_flat_keys(memory);
    return memory;
}

RetrievalResult retrieve(const FunctionMemory& memory, const std::string& query_text,
                         const std::optional<std::string>& query_image, std::size_t k,
                         EmbeddingProvider& provider) {
    if (provider.identity() != memory.provider_identity)
        throw std::invalid_argument("provider '" + provider.identity() +
                                    "' does not match the memory built with '" +
                                    memory.provider_identity + "'");
    if (k < 1 || k > memory.entries.size())
        throw std::invalid_argument("k must lie in [1, " +
                                    std::to_string(memory.entries.size()) + "]");

    std::vector<float> query = provider.embed(query_text, query_image);
    if (query.size() != memory.dimension)
        throw LoadError("query embedding dimension does not match the memory");
    l2_normalize(query);

    std::vector<float> scores(memory.entries.size());
    simd::dot_batch(memory.flat_keys.data(), memory.entries.size(), memory.dimension,
                    query.data(), scores.data());

    std::vector<std::size_t> order(memory.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return memory.entries[a].name < memory.entries[b].name;
    });

    RetrievalResult result;
    result.ranked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        double s = std::clamp(static_cast<double>(scores[order[i]]), -1.0, 1.0);
        result.ranked.push_back(ScoredName{memory.entries[order[i]].name, s});
    }
    return result;
}

RetrievalEvalReport evaluate_retrieval(const FunctionMemory& memory,
                                       const std::vector<RetrievalQuery>& problems,
                                       const std::vector<std::size_t>& ks,
                                       EmbeddingProvider& provider) {
    RetrievalEvalReport report;
    if (ks.empty()) return report;
    for (std::size_t k : ks)
        if (k < 1) throw std::invalid_argument("every k must be at least 1");
    const std::size_t max_k = *std::max_element(ks.begin(), ks.end());

    std::vector<double> recall_sum(ks.size(), 0.0);
    std::vector<double> precision_sum(ks.size(), 0.0);
    for (const auto& problem : problems) {
        if (problem.gold.empty()) {
            ++report.skipped;
            continue;
        }
        RetrievalResult top = retrieve(memory, problem.query_text, problem.query_image,
                                       std::min(max_k, memory.entries.size()), provider);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            const std::size_t k = std::min(ks[ki], top.ranked.size());
            std::size_t hits = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (problem.gold.count(top.ranked[i].name)) ++hits;
            recall_sum[ki] += static_cast<double>(hits) / problem.gold.size();
            precision_sum[ki] += static_cast<double>(hits) / ks[ki];
        }
        ++report.evaluated;
    }

    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        double n = report.evaluated ? static_cast<double>(report.evaluated) : 1.0;
        report.rows.push_back(PrecisionRecallRow{ks[ki], precision_sum[ki] / n, recall_sum[ki] / n});
    }
    return report;
}

std::vector<std::string> compose_training_prompt_functions(const RetrievalResult& retrieved,
                                                           const std::set<std::string>& gold) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& scored : retrieved.ranked)
        if (seen.insert(scored.name).second) out.push_back(scored.name);
    for (const auto& name : gold)  // std::set iterates alphabetically
        if (seen.insert(name).second) out.push_back(name);
    return out;
}

void save_memory(const FunctionMemory& memory, const std::string& path) {
    json doc;
    doc["provider"] = memory.provider_identity;
    doc["dimension"] = memory.dimension;
    json entries = json::array();
    for (const auto& e : memory.entries) {
        json j;
        j["name"] = e.name;
        j["source_text"] = e.source_text;
        j["key"] = e.key;
        entries.push_back(std::move(j));
    }
    doc["entries"] = std::move(entries);
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write memory file '" + path + "'");
    out << doc.dump(2) << '\n';
}

FunctionMemory load_memory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open memory file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed memory file: ") + e.what());
    }
    FunctionMemory memory;
    try {
        memory.provider_identity = doc.at("provider").get<std::string>();
        memory.dimension = doc.at("dimension").get<std::size_t>();
        for (const auto& j : doc.at("entries")) {
            MemoryEntry e;
            e.name = j.at("name").get<std::string>();
            e.source_text = j.at("source_text").get<std::string>();
            e.key = j.at("key").get<std::vector<float>>();
            if (e.key.size() != memory.dimension)
                throw LoadError("memory entry '" + e.name + "' has a mismatched key dimension");
            memory.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed memory file: ") + e.what());
    }
    rebuild_flat_keys(memory);
    return memory;
}

}  // namespace geosolve
