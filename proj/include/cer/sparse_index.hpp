#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cer/corpus.hpp"
#include "cer/retrieval.hpp"

namespace cer::retrieval {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t ordinal = 0;
    std::uint32_t tf = 0;  // f(t, D) >= 1

    bool operator==(const Posting&) const = default;
};

/// ln((N - n_t + 0.5) / (n_t + 0.5)). Negative for terms in more than half
/// of the units; the value is used unclamped.
double bm25_idf(std::uint64_t total_units, std::uint64_t units_with_term);

/// One query term's contribution:
/// idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |D| / avgdl)).
double bm25_term_contribution(double idf, double tf, double unit_length, double avgdl, const Bm25Params& params);

/// BM25 inverted index over sentence units. Immutable once built or loaded,
/// so a single instance can serve any number of concurrent readers.
///
/// On-disk layout (all integers little-endian):
///   "CERSIDX1" | u64 N | f64 avgdl | f64 k1 | f64 b
///   | u64 term_count | term_count x (str term | u32 df | df x (u32 ordinal | u32 tf))
///   | N x (u32 unit_length | str sentence_id | str text)
/// where `str` is a u32 byte length followed by UTF-8 bytes. Terms appear in
/// byte-wise ascending order; postings by ascending ordinal.
class SparseIndex {
  public:
    /// Tokenizes with corpus::preprocess. Throws InvalidArgument for an empty
    /// unit sequence, k1 <= 0 or b outside [0, 1].
    static SparseIndex build(std::span<const corpus::SentenceUnit> units, Bm25Params params = {});

    static SparseIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::string serialize() const;
    static SparseIndex deserialize(std::string bytes, const std::string& source = "buffer");

    [[nodiscard]] std::size_t size() const { return unit_lengths_.size(); }
    [[nodiscard]] double avgdl() const { return avgdl_; }
    [[nodiscard]] const Bm25Params& params() const { return params_; }
    [[nodiscard]] std::uint32_t unit_length(std::size_t ordinal) const { return unit_lengths_.at(ordinal); }
    [[nodiscard]] const StoredSentence& sentence(std::size_t ordinal) const { return sentences_.at(ordinal); }
    [[nodiscard]] std::size_t term_count() const { return postings_.size(); }

    /// n_t: number of units containing `term` (0 if absent).
    [[nodiscard]] std::size_t document_frequency(std::string_view term) const;
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    /// f(t, D) for one unit.
    [[nodiscard]] std::uint32_t term_frequency(std::string_view term, std::size_t ordinal) const;

    [[nodiscard]] double idf(std::string_view term) const;

    /// Sum over the query multiset; a repeated query term counts once per
    /// occurrence. Throws InvalidArgument if ordinal >= size().
    [[nodiscard]] double bm25_score(const corpus::TokenStream& query_tokens, std::size_t ordinal) const;

    /// Top-k among units sharing at least one query term, ordered by
    /// (score desc, sentence_id asc). k must be >= 1.
    [[nodiscard]] std::vector<ScoredHit> search(std::string_view query, std::size_t k) const;
    [[nodiscard]] std::vector<ScoredHit> search_tokens(const corpus::TokenStream& query_tokens, std::size_t k) const;

    /// Ordinal of a sentence id, or size() when unknown.
    [[nodiscard]] std::size_t ordinal_of(std::string_view sentence_id) const;

  private:
    SparseIndex() = default;
    void finalize();

    Bm25Params params_;
    double avgdl_ = 0.0;
    std::vector<std::uint32_t> unit_lengths_;
    std::vector<StoredSentence> sentences_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::size_t> ordinal_by_id_;
};

}  // namespace cer::retrieval
