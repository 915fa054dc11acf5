#include "geosolve/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>
#include <json.hpp>

#include "geosolve/errors.hpp"
#include "geosolve/simd.hpp"

namespace geosolve {

using nlohmann::json;

std::vector<std::vector<float>> EmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts,
    const std::vector<std::optional<std::string>>& image_refs) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i)
        out.push_back(embed(texts[i], i < image_refs.size() ? image_refs[i] : std::nullopt));
    return out;
}

namespace {

std::uint64_t fnv1a(const char* data, std::size_t n, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

// Lowercase, fold every non-alphanumeric run to a single space, pad the ends
// so word boundaries contribute trigrams.
std::string normalize_text(const std::string& text) {
    std::string out = " ";
    bool last_space = true;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            out += static_cast<char>(std::tolower(u));
            last_space = false;
        } else if (!last_space) {
            out += ' ';
            last_space = true;
        }
    }
    if (!last_space) out += ' ';
    return out;
}

}  // namespace

std::vector<float> LexicalEmbeddingProvider::embed(const std::string& text,
                                                   const std::optional<std::string>&) {
    std::vector<float> vec(kDimension, 0.0f);
    // Boundary padding means any text with content normalizes to >= 3 chars;
    // content-free input embeds to the zero vector.
    const std::string norm = normalize_text(text);
    for (std::size_t i = 0; i + 3 <= norm.size(); ++i)
        vec[fnv1a(norm.data() + i, 3, kHashSeed) % kDimension] += 1.0f;
    float norm2 = simd::dot(vec, vec);
    if (norm2 > 0.0f) {
        float inv = 1.0f / std::sqrt(norm2);
        for (float& x : vec) x *= inv;
    }
    return vec;
}

ServiceEmbeddingProvider::ServiceEmbeddingProvider(Config config) : config_(std::move(config)) {
    if (config_.endpoint.empty())
        throw std::invalid_argument("service embedding provider needs an endpoint");
}

std::vector<std::vector<float>> ServiceEmbeddingProvider::request(
    const std::vector<std::string>& texts, const std::vector<std::optional<std::string>>& refs) {
    auto slash = config_.endpoint.find('/', config_.endpoint.find("//") + 2);
    std::string base = slash == std::string::npos ? config_.endpoint : config_.endpoint.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);

    httplib::Client client(base);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("GEO_EMBED_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    json body;
    body["texts"] = texts;
    json jrefs = json::array();
    for (const auto& r : refs) {
        if (r)
            jrefs.push_back(*r);
        else
            jrefs.push_back(nullptr);
    }
    body["image_refs"] = jrefs;

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw LoadError("embedding service unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw LoadError("embedding service returned status " + std::to_string(res->status));

    json doc;
    try {
        doc = json::parse(res->body);
    } catch (const json::exception& e) {
        throw LoadError(std::string("bad embedding service response: ") + e.what());
    }
    if (!doc.contains("vectors") || !doc["vectors"].is_array())
        throw LoadError("embedding service response lacks 'vectors'");

    std::vector<std::vector<float>> out;
    for (const auto& v : doc["vectors"]) out.push_back(v.get<std::vector<float>>());
    if (out.size() != texts.size())
        throw LoadError("embedding service returned a mismatched vector count");
    for (const auto& v : out) {
        if (dimension_ == 0) dimension_ = v.size();
        if (v.size() != dimension_ || v.empty())
            throw LoadError("embedding service returned inconsistent dimensions");
    }
    return out;
}

std::vector<float> ServiceEmbeddingProvider::embed(const std::string& text,
                                                   const std::optional<std::string>& image_ref) {
    return request({text}, {image_ref}).front();
}

std::vector<std::vector<float>> ServiceEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts,
    const std::vector<std::optional<std::string>>& image_refs) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
        std::size_t end = std::min(texts.size(), start + config_.batch_size);
        std::vector<std::string> chunk(texts.begin() + start, texts.begin() + end);
        std::vector<std::optional<std::string>> ref_chunk;
        for (std::size_t i = start; i < end; ++i)
            ref_chunk.push_back(i < image_refs.size() ? image_refs[i] : std::nullopt);
        auto vectors = request(chunk, ref_chunk);
        for (auto& v : vectors) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace geosolve
