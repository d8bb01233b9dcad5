#include "cer/dense_index.hpp"

#include <cmath>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/parallel.hpp"

namespace cer::retrieval {
namespace {

constexpr std::string_view kMagic = "CERDIDX1";

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

}  // namespace

double cosine_similarity(std::span<const float> q, std::span<const float> d) {
    if (q.size() != d.size()) throw InvalidArgument("cosine similarity of vectors with different dimensions");
    const double nq = norm(q);
    const double nd = norm(d);
    if (nq == 0.0 || nd == 0.0) throw InvalidArgument("cosine similarity undefined for a zero-norm vector");
    return dot(q, d) / (nq * nd);
}

DenseIndex DenseIndex::build(std::span<const corpus::SentenceUnit> units, const EmbeddingProvider& provider,
                             DenseBuildOptions options) {
    if (options.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
    const std::size_t dim = provider.dimension();
    const std::size_t batches = (units.size() + options.batch_size - 1) / options.batch_size;
    std::vector<std::vector<EmbeddingVector>> results(batches);

    parallel_for(batches, options.max_in_flight, [&](std::size_t b) {
        const std::size_t begin = b * options.batch_size;
        const std::size_t end = std::min(units.size(), begin + options.batch_size);
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) texts.push_back(units[i].text);
        try {
            results[b] = provider.embed_batch(texts);
        } catch (const ProviderError& e) {
            throw ProviderError("embedding failed for ordinals " + std::to_string(begin) + ".." +
                                    std::to_string(end - 1) + ": " + e.what(),
                                e.status(), e.retryable(), e.body_excerpt());
        }
        if (results[b].size() != end - begin) {
            throw ProviderError("embedding provider returned " + std::to_string(results[b].size()) +
                                    " vectors for ordinals " + std::to_string(begin) + ".." + std::to_string(end - 1),
                                0, false);
        }
    });

    std::vector<EmbeddingVector> vectors;
    std::vector<StoredSentence> sentences;
    vectors.reserve(units.size());
    sentences.reserve(units.size());
    for (std::size_t b = 0; b < batches; ++b) {
        for (auto& v : results[b]) {
            const std::size_t ordinal = vectors.size();
            check_embedding(v, dim, "ordinal " + std::to_string(ordinal));
            if (norm(v) == 0.0) throw ProviderError("zero-norm embedding at ordinal " + std::to_string(ordinal), 0, false);
            vectors.push_back(std::move(v));
        }
    }
    for (const auto& u : units) sentences.push_back(StoredSentence{u.sentence_id, u.text});
    auto index = from_vectors(std::move(vectors), std::move(sentences), provider.tag());
    index.dimension_ = dim;
    return index;
}

DenseIndex DenseIndex::from_vectors(std::vector<EmbeddingVector> vectors, std::vector<StoredSentence> sentences,
                                    std::string provider_tag) {
    if (vectors.size() != sentences.size()) throw InvalidArgument("vector and sentence counts differ");
    DenseIndex index;
    index.provider_tag_ = std::move(provider_tag);
    index.dimension_ = vectors.empty() ? 0 : vectors.front().size();
    index.values_.reserve(vectors.size() * index.dimension_);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != index.dimension_) {
            throw InvalidArgument("vector " + std::to_string(i) + " has dimension " + std::to_string(vectors[i].size()) +
                                  ", expected " + std::to_string(index.dimension_));
        }
        index.values_.insert(index.values_.end(), vectors[i].begin(), vectors[i].end());
    }
    index.sentences_ = std::move(sentences);
    index.finalize();
    return index;
}

void DenseIndex::finalize() {
    norms_.assign(sentences_.size(), 0.0);
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
        norms_[i] = norm(vector(i));
        if (norms_[i] == 0.0 || !std::isfinite(norms_[i])) {
            throw InvalidArgument("vector " + std::to_string(i) + " has zero or non-finite norm");
        }
    }
}

std::span<const float> DenseIndex::vector(std::size_t ordinal) const {
    if (ordinal >= size()) throw InvalidArgument("ordinal out of range");
    return std::span<const float>(values_).subspan(ordinal * dimension_, dimension_);
}

std::vector<ScoredHit> DenseIndex::search(std::string_view query, std::size_t k,
                                          const EmbeddingProvider& provider) const {
    if (provider.tag() != provider_tag_) {
        throw ConfigError("query provider '" + provider.tag() + "' does not match index provider '" + provider_tag_ + "'");
    }
    if (provider.dimension() != dimension_) {
        throw ConfigError("query provider dimension " + std::to_string(provider.dimension()) +
                          " does not match index dimension " + std::to_string(dimension_));
    }
    const EmbeddingVector q = provider.embed(query);
    return search_vector(q, k);
}

std::vector<ScoredHit> DenseIndex::search_vector(std::span<const float> query, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    if (query.size() != dimension_) throw ConfigError("query dimension does not match index dimension");
    const double nq = norm(query);
    if (nq == 0.0) throw InvalidArgument("cosine similarity undefined for a zero-norm query");
    std::vector<Candidate> candidates(size());
    for (std::size_t i = 0; i < size(); ++i) {
        candidates[i] = Candidate{dot(query, vector(i)) / (nq * norms_[i]), i};
    }
    return select_top_k(std::move(candidates), k, sentences_);
}

std::string DenseIndex::serialize() const {
    io::BinaryWriter w;
    w.bytes(kMagic);
    w.u32(static_cast<std::uint32_t>(dimension_));
    w.u64(size());
    w.str(provider_tag_);
    for (float v : values_) w.f32(v);
    for (const auto& s : sentences_) {
        w.str(s.sentence_id);
        w.str(s.text);
    }
    return w.buffer();
}

void DenseIndex::save(const std::filesystem::path& path) const { io::write_file_atomic(path, serialize()); }

DenseIndex DenseIndex::load(const std::filesystem::path& path, const EmbeddingProvider* expected) {
    return deserialize(io::read_file(path), path.string(), expected);
}

DenseIndex DenseIndex::deserialize(std::string bytes, const std::string& source, const EmbeddingProvider* expected) {
    io::BinaryReader r(std::move(bytes), source);
    if (r.bytes(kMagic.size()) != kMagic) throw FormatError(source + ": not a dense index (bad magic)");
    const std::uint32_t dim = r.u32();
    const std::uint64_t count = r.u64();
    std::string tag = r.str();
    if (expected != nullptr) {
        if (expected->dimension() != dim) {
            throw ConfigError(source + ": index dimension " + std::to_string(dim) + " does not match provider dimension " +
                              std::to_string(expected->dimension()));
        }
        if (expected->tag() != tag) {
            throw ConfigError(source + ": index built with provider '" + tag + "', not '" + expected->tag() + "'");
        }
    }
    if (dim == 0 && count > 0) throw FormatError(source + ": zero dimension");
    if (count != 0 && r.remaining() / count < static_cast<std::uint64_t>(dim) * 4) {
        throw FormatError(source + ": truncated vector block");
    }
    DenseIndex index;
    index.dimension_ = dim;
    index.provider_tag_ = std::move(tag);
    index.values_.resize(count * dim);
    for (auto& v : index.values_) v = r.f32();
    index.sentences_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string id = r.str();
        std::string text = r.str();
        index.sentences_.push_back(StoredSentence{std::move(id), std::move(text)});
    }
    if (!r.at_end()) throw FormatError(source + ": trailing bytes after sentence table");
    try {
        index.finalize();
    } catch (const InvalidArgument& e) {
        throw FormatError(source + ": " + e.what());
    }
    return index;
}

}  // namespace cer::retrieval
