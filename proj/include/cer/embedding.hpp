#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cer/http_client.hpp"

namespace cer::retrieval {

using EmbeddingVector = std::vector<float>;

/// Source of dense sentence embeddings. Implementations must be safe to
/// call from several threads at once.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;

    [[nodiscard]] virtual std::size_t dimension() const = 0;
    /// Identifies the embedder; an index only answers queries embedded by a
    /// provider with the same tag.
    [[nodiscard]] virtual std::string tag() const = 0;
    [[nodiscard]] virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;

    /// Single-text convenience; result is checked like embed_batch output.
    [[nodiscard]] EmbeddingVector embed(std::string_view text) const;
};

/// Throws ConfigError on a dimension mismatch and ProviderError on
/// non-finite values.
void check_embedding(const EmbeddingVector& v, std::size_t expected_dimension, std::string_view context);

/// Deterministic stand-in: feature-hashes the preprocessed tokens of a text,
/// each token contributing a fixed pseudo-random vector. Identical text
/// always maps to the identical vector, and texts sharing terms land close.
class MockEmbeddingProvider final : public EmbeddingProvider {
  public:
    explicit MockEmbeddingProvider(std::size_t dimension, std::uint64_t seed = 0);

    [[nodiscard]] std::size_t dimension() const override { return dimension_; }
    [[nodiscard]] std::string tag() const override;
    [[nodiscard]] std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

  private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

/// Vectors computed offline, read from JSONL rows {"text": ..., "vector": [...]}.
/// Unknown texts are a non-retryable ProviderError.
class PrecomputedEmbeddingProvider final : public EmbeddingProvider {
  public:
    static std::unique_ptr<PrecomputedEmbeddingProvider> load(const std::filesystem::path& path,
                                                              std::string tag = "precomputed");

    [[nodiscard]] std::size_t dimension() const override { return dimension_; }
    [[nodiscard]] std::string tag() const override { return tag_; }
    [[nodiscard]] std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

  private:
    PrecomputedEmbeddingProvider() = default;

    std::size_t dimension_ = 0;
    std::string tag_;
    std::unordered_map<std::string, EmbeddingVector> vectors_;
};

/// HTTP embedder: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
  public:
    struct Options {
        std::string endpoint;    // defaults to $CER_EMBED_ENDPOINT when empty
        std::size_t dimension = 0;  // required
        std::string tag;         // defaults to "remote:<endpoint>"
        net::HttpOptions http;
    };

    explicit RemoteEmbeddingProvider(Options options);

    [[nodiscard]] std::size_t dimension() const override { return options_.dimension; }
    [[nodiscard]] std::string tag() const override { return options_.tag; }
    [[nodiscard]] std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

  private:
    Options options_;
};

}  // namespace cer::retrieval
