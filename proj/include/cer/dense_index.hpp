#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cer/corpus.hpp"
#include "cer/embedding.hpp"
#include "cer/retrieval.hpp"

namespace cer::retrieval {

/// (q . d) / (|q| |d|), accumulated in double. Throws InvalidArgument on a
/// dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const float> q, std::span<const float> d);

struct DenseBuildOptions {
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 1;
};

/// Flat (exhaustive) cosine index. Immutable after build/load.
///
/// On-disk layout (little-endian):
///   "CERDIDX1" | u32 dimension | u64 count | str provider_tag
///   | count*dimension f32 (row-major, ordinal order)
///   | count x (str sentence_id | str text)
/// `str` is a u32 byte length followed by UTF-8 bytes.
class DenseIndex {
  public:
    /// Embeds every unit. Any provider failure aborts the build with the
    /// failing ordinal(s) in the message; zero-norm vectors are rejected.
    static DenseIndex build(std::span<const corpus::SentenceUnit> units, const EmbeddingProvider& provider,
                            DenseBuildOptions options = {});

    /// When `expected` is given, its dimension and tag must match the file
    /// (ConfigError otherwise).
    static DenseIndex load(const std::filesystem::path& path, const EmbeddingProvider* expected = nullptr);
    static DenseIndex deserialize(std::string bytes, const std::string& source = "buffer",
                                  const EmbeddingProvider* expected = nullptr);
    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::string serialize() const;

    /// Assembles an index from vectors computed elsewhere.
    static DenseIndex from_vectors(std::vector<EmbeddingVector> vectors, std::vector<StoredSentence> sentences,
                                   std::string provider_tag);

    [[nodiscard]] std::size_t size() const { return sentences_.size(); }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] const std::string& provider_tag() const { return provider_tag_; }
    [[nodiscard]] std::span<const float> vector(std::size_t ordinal) const;
    [[nodiscard]] const StoredSentence& sentence(std::size_t ordinal) const { return sentences_.at(ordinal); }

    /// Embeds `query` with `provider` (tag must match) and ranks every unit.
    [[nodiscard]] std::vector<ScoredHit> search(std::string_view query, std::size_t k,
                                                const EmbeddingProvider& provider) const;
    /// Ranks by cosine against an already-embedded query, (score desc,
    /// sentence_id asc).
    [[nodiscard]] std::vector<ScoredHit> search_vector(std::span<const float> query, std::size_t k) const;

  private:
    DenseIndex() = default;
    void finalize();

    std::size_t dimension_ = 0;
    std::string provider_tag_;
    std::vector<float> values_;
    std::vector<double> norms_;
    std::vector<StoredSentence> sentences_;
};

}  // namespace cer::retrieval
