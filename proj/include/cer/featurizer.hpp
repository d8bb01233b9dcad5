#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cer/interchange.hpp"

namespace cer::veracity {

/// (index, value) pairs sorted by index.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool operator==(const SparseVector&) const = default;
};

/// Unigrams then bigrams ("a b") of a token stream, in text order.
std::vector<std::string> ngrams(std::span<const std::string> tokens);

/// claim + " " + evidence joined by " " + " " + justification.
std::string feature_text(const VerdictRecord& record);

/// TF-IDF n-gram vocabulary with smoothed idf ln((1 + n) / (1 + df)) + 1.
/// Feature layout: one slot per vocabulary entry (sorted byte-wise), then
/// three one-hot slots for the LLM label in Supported, Refuted, NEI order.
class Vocabulary {
  public:
    Vocabulary() = default;

    /// Fit on training records only.
    static Vocabulary build(std::span<const VerdictRecord> records);
    static Vocabulary from_entries(std::vector<std::pair<std::string, double>> term_idf);

    [[nodiscard]] std::size_t ngram_count() const { return terms_.size(); }
    [[nodiscard]] std::size_t dimension() const { return terms_.size() + 3; }
    [[nodiscard]] const std::vector<std::string>& terms() const { return terms_; }
    [[nodiscard]] const std::vector<double>& idf() const { return idf_; }
    /// Index of an n-gram, or -1.
    [[nodiscard]] std::int64_t index_of(std::string_view term) const;

    /// TF-IDF over known n-grams (raw counts times idf), L2-normalized, plus
    /// the LLM-label one-hot. Unknown n-grams are ignored.
    [[nodiscard]] SparseVector featurize(const VerdictRecord& record) const;

  private:
    void reindex();

    std::vector<std::string> terms_;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace cer::veracity
