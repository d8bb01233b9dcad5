#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cer/dense_index.hpp"
#include "cer/retrieval.hpp"
#include "cer/sparse_index.hpp"

namespace cer::evidence {

inline constexpr std::size_t kDefaultTopK = 20;
inline constexpr std::size_t kDefaultPairEvidence = 3;
inline constexpr std::string_view kSeparator = " [SEP] ";

struct EvidenceHit {
    std::string sentence_id;
    std::string text;
    double score = 0.0;
    std::size_t rank = 0;

    bool operator==(const EvidenceHit&) const = default;
};

/// Retrieved sentences for one claim, in retriever rank order.
struct EvidenceSet {
    std::string claim_id;
    std::vector<EvidenceHit> hits;
    retrieval::RetrieverMode mode = retrieval::RetrieverMode::sparse;
    std::size_t k = kDefaultTopK;

    [[nodiscard]] bool empty() const { return hits.empty(); }
    [[nodiscard]] std::vector<std::string> texts(std::size_t limit = SIZE_MAX) const;
};

/// Front end over whichever index the run uses. Holds shared ownership so
/// one instance can be used from several threads.
class Retriever {
  public:
    static Retriever sparse(std::shared_ptr<const retrieval::SparseIndex> index);
    static Retriever dense(std::shared_ptr<const retrieval::DenseIndex> index,
                           std::shared_ptr<const retrieval::EmbeddingProvider> provider);

    [[nodiscard]] retrieval::RetrieverMode mode() const { return mode_; }

    /// Delegates to the index search and resolves hit texts. An empty result
    /// is valid. k must be >= 1.
    [[nodiscard]] EvidenceSet retrieve(std::string_view claim_id, std::string_view claim_text,
                                       std::size_t k = kDefaultTopK) const;

  private:
    retrieval::RetrieverMode mode_ = retrieval::RetrieverMode::sparse;
    std::shared_ptr<const retrieval::SparseIndex> sparse_;
    std::shared_ptr<const retrieval::DenseIndex> dense_;
    std::shared_ptr<const retrieval::EmbeddingProvider> provider_;
};

struct ClaimEvidencePair {
    std::string text;                 // "<claim> [SEP] <e1>, <e2>, <e3>"
    std::vector<std::string> evidence;  // the texts that went into `text`
    bool empty_evidence = false;
};

/// Joins the top min(m, hits) evidence texts with ", " after the claim and
/// the separator. With no hits the text is "<claim> [SEP] " and
/// empty_evidence is set. m must be >= 1.
ClaimEvidencePair assemble_pair(std::string_view claim_text, const EvidenceSet& evidence,
                                std::size_t m = kDefaultPairEvidence);

/// Claim part of an assembled pair: everything before the first separator.
std::string claim_of_pair(std::string_view pair);

}  // namespace cer::evidence
