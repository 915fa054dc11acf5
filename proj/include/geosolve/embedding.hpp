#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geosolve {

// A text (optionally text+image) encoder mapping inputs into a fixed-dimension
// vector space. One bundled deterministic lexical implementation keeps the
// whole retrieval stack offline; a remote-service implementation speaks the
// embedding wire contract so a multimodal encoder can be plugged in.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;

    virtual std::size_t dimension() const = 0;

    // Stable name + version; memories record it and refuse mismatched reads.
    virtual std::string identity() const = 0;

    virtual std::vector<float> embed(const std::string& text,
                                     const std::optional<std::string>& image_ref = {}) = 0;

    // Batch embedding; index i of image_refs belongs to texts[i]. The default
    // loops over embed(); remote providers override with one request.
    virtual std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& texts,
        const std::vector<std::optional<std::string>>& image_refs);
};

// Deterministic text-only provider: L2-normalized hashed character-trigram
// frequency vectors. Fixed dimension and hash seed, so keys are reproducible
// across runs and machines.
class LexicalEmbeddingProvider : public EmbeddingProvider {
  public:
    static constexpr std::size_t kDimension = 1024;
    static constexpr std::uint64_t kHashSeed = 0x9e3779b97f4a7c15ull;

    std::size_t dimension() const override { return kDimension; }
    std::string identity() const override { return "lexical-trigram-1024/1"; }
    std::vector<float> embed(const std::string& text,
                             const std::optional<std::string>& image_ref = {}) override;
};

// Remote provider speaking the embedding wire contract:
//   POST <endpoint>  {"texts": [...], "image_refs": [...|null]}
//   -> {"vectors": [[...], ...]}
// Bearer token read from the GEO_EMBED_API_KEY environment variable.
class ServiceEmbeddingProvider : public EmbeddingProvider {
  public:
    struct Config {
        std::string endpoint;       // e.g. http://host:port/embed
        std::string name = "service";
        int timeout_seconds = 30;
        std::size_t batch_size = 64;
    };

    explicit ServiceEmbeddingProvider(Config config);

    std::size_t dimension() const override { return dimension_; }
    std::string identity() const override { return "service:" + config_.name; }
    std::vector<float> embed(const std::string& text,
                             const std::optional<std::string>& image_ref = {}) override;
    std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& texts,
        const std::vector<std::optional<std::string>>& image_refs) override;

  private:
    std::vector<std::vector<float>> request(const std::vector<std::string>& texts,
                                            const std::vector<std::optional<std::string>>& refs);

    Config config_;
    std::size_t dimension_ = 0;  // discovered from the first response
};

}  // namespace geosolve
