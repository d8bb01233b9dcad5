#include "cer/embedding.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "cer/corpus.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "json.hpp"

namespace cer::retrieval {

using nlohmann::json;

EmbeddingVector EmbeddingProvider::embed(std::string_view text) const {
    const std::string owned(text);
    auto out = embed_batch(std::span<const std::string>(&owned, 1));
    if (out.size() != 1) throw ProviderError(tag() + ": expected 1 vector, got " + std::to_string(out.size()), 0, false);
    check_embedding(out.front(), dimension(), tag());
    return std::move(out.front());
}

void check_embedding(const EmbeddingVector& v, std::size_t expected_dimension, std::string_view context) {
    if (v.size() != expected_dimension) {
        throw ConfigError(std::string(context) + ": embedding dimension " + std::to_string(v.size()) +
                          " does not match expected " + std::to_string(expected_dimension));
    }
    for (float x : v) {
        if (!std::isfinite(x)) throw ProviderError(std::string(context) + ": non-finite embedding value", 0, false);
    }
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
    if (dimension == 0) throw InvalidArgument("mock embedding dimension must be >= 1");
}

std::string MockEmbeddingProvider::tag() const {
    return "mock-hash:d" + std::to_string(dimension_) + ":s" + std::to_string(seed_);
}

std::vector<EmbeddingVector> MockEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::vector<double> acc(dimension_);
    for (const std::string& text : texts) {
        std::fill(acc.begin(), acc.end(), 0.0);
        auto add = [&](std::string_view key) {
            SplitMix64 rng(fnv1a64(key) ^ seed_);
            for (double& a : acc) a += 2.0 * rng.uniform() - 1.0;
        };
        const corpus::TokenStream tokens = corpus::preprocess(text);
        if (tokens.empty()) {
            add("\x01" + text);
        } else {
            for (const auto& t : tokens) add(t);
        }
        EmbeddingVector v(dimension_);
        double norm = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) {
            v[i] = static_cast<float>(acc[i]);
            norm += static_cast<double>(v[i]) * v[i];
        }
        if (norm == 0.0) v[0] = 1.0f;
        out.push_back(std::move(v));
    }
    return out;
}

std::unique_ptr<PrecomputedEmbeddingProvider> PrecomputedEmbeddingProvider::load(const std::filesystem::path& path,
                                                                                  std::string tag) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read vectors file " + path.string());
    std::unique_ptr<PrecomputedEmbeddingProvider> p(new PrecomputedEmbeddingProvider());
    p->tag_ = std::move(tag);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(where + ": invalid JSON");
        }
        if (!row.is_object() || !row.contains("text") || !row["text"].is_string() || !row.contains("vector") ||
            !row["vector"].is_array()) {
            throw FormatError(where + ": expected {\"text\": string, \"vector\": [numbers]}");
        }
        EmbeddingVector v;
        for (const auto& x : row["vector"]) {
            if (!x.is_number()) throw FormatError(where + ": vector holds a non-number");
            v.push_back(x.get<float>());
        }
        if (p->dimension_ == 0) p->dimension_ = v.size();
        if (v.size() != p->dimension_ || v.empty()) throw FormatError(where + ": inconsistent vector dimension");
        p->vectors_[row["text"].get<std::string>()] = std::move(v);
    }
    if (p->vectors_.empty()) throw FormatError(path.string() + ": no vectors");
    return p;
}

std::vector<EmbeddingVector> PrecomputedEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = vectors_.find(t);
        if (it == vectors_.end()) {
            throw ProviderError(tag_ + ": no precomputed vector for text '" + net::excerpt(t) + "'", 404, false);
        }
        out.push_back(it->second);
    }
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(Options options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) {
        if (const char* env = std::getenv("CER_EMBED_ENDPOINT")) options_.endpoint = env;
    }
    if (options_.endpoint.empty()) throw ConfigError("no embedding endpoint configured (set CER_EMBED_ENDPOINT)");
    if (options_.dimension == 0) throw ConfigError("remote embedding provider needs a declared dimension");
    if (options_.tag.empty()) options_.tag = "remote:" + options_.endpoint;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
    json request = {{"texts", json::array()}};
    for (const auto& t : texts) request["texts"].push_back(t);
    const auto outcome = net::post_json(options_.endpoint, request.dump(), {}, options_.http);

    json body;
    try {
        body = json::parse(outcome.body);
    } catch (const json::parse_error&) {
        throw ProviderError(options_.endpoint + ": response is not JSON", outcome.status, false, net::excerpt(outcome.body));
    }
    if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array() ||
        body["vectors"].size() != texts.size()) {
        throw ProviderError(options_.endpoint + ": response lacks one vector per text", outcome.status, false,
                            net::excerpt(outcome.body));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : body["vectors"]) {
        EmbeddingVector v;
        if (!row.is_array()) throw ProviderError(options_.endpoint + ": vector is not an array", outcome.status, false);
        for (const auto& x : row) {
            if (!x.is_number()) throw ProviderError(options_.endpoint + ": vector holds a non-number", outcome.status, false);
            v.push_back(x.get<float>());
        }
        check_embedding(v, options_.dimension, options_.endpoint);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace cer::retrieval
