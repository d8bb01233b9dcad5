#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cer::retrieval {

/// One ranked result. Within a result list ranks run 1..n and scores never
/// increase with rank; equal scores are ordered by sentence_id ascending.
struct ScoredHit {
    std::string sentence_id;
    double score = 0.0;
    std::size_t rank = 0;

    bool operator==(const ScoredHit&) const = default;
};

/// Sentence payload kept alongside an index so hits can be resolved to text
/// without the original corpus.
struct StoredSentence {
    std::string sentence_id;
    std::string text;

    bool operator==(const StoredSentence&) const = default;
};

struct Candidate {
    double score = 0.0;
    std::size_t ordinal = 0;
};

/// Orders candidates by (score desc, sentence_id asc), keeps the first k and
/// assigns ranks from 1.
std::vector<ScoredHit> select_top_k(std::vector<Candidate> candidates, std::size_t k,
                                    std::span<const StoredSentence> sentences);

enum class RetrieverMode { sparse, dense };

const char* to_string(RetrieverMode mode);
RetrieverMode retriever_mode_from_string(const std::string& name);

}  // namespace cer::retrieval
