#include "cer/evidence.hpp"

#include <unordered_map>

#include "cer/error.hpp"

namespace cer::evidence {

std::vector<std::string> EvidenceSet::texts(std::size_t limit) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < hits.size() && i < limit; ++i) out.push_back(hits[i].text);
    return out;
}

Retriever Retriever::sparse(std::shared_ptr<const retrieval::SparseIndex> index) {
    if (!index) throw InvalidArgument("sparse retriever needs an index");
    Retriever r;
    r.mode_ = retrieval::RetrieverMode::sparse;
    r.sparse_ = std::move(index);
    return r;
}

Retriever Retriever::dense(std::shared_ptr<const retrieval::DenseIndex> index,
                           std::shared_ptr<const retrieval::EmbeddingProvider> provider) {
    if (!index || !provider) throw InvalidArgument("dense retriever needs an index and an embedding provider");
    Retriever r;
    r.mode_ = retrieval::RetrieverMode::dense;
    r.dense_ = std::move(index);
    r.provider_ = std::move(provider);
    return r;
}

EvidenceSet Retriever::retrieve(std::string_view claim_id, std::string_view claim_text, std::size_t k) const {
    EvidenceSet set;
    set.claim_id = std::string(claim_id);
    set.mode = mode_;
    set.k = k;
    if (mode_ == retrieval::RetrieverMode::sparse) {
        for (const auto& hit : sparse_->search(claim_text, k)) {
            const auto ordinal = sparse_->ordinal_of(hit.sentence_id);
            set.hits.push_back(EvidenceHit{hit.sentence_id, sparse_->sentence(ordinal).text, hit.score, hit.rank});
        }
    } else {
        const auto hits = dense_->search(claim_text, k, *provider_);
        std::unordered_map<std::string_view, std::size_t> wanted;
        for (std::size_t i = 0; i < hits.size(); ++i) wanted.emplace(hits[i].sentence_id, i);
        set.hits.resize(hits.size());
        for (std::size_t o = 0; o < dense_->size() && !wanted.empty(); ++o) {
            const auto& s = dense_->sentence(o);
            auto it = wanted.find(s.sentence_id);
            if (it == wanted.end()) continue;
            const auto& hit = hits[it->second];
            set.hits[it->second] = EvidenceHit{hit.sentence_id, s.text, hit.score, hit.rank};
            wanted.erase(it);
        }
    }
    return set;
}

ClaimEvidencePair assemble_pair(std::string_view claim_text, const EvidenceSet& evidence, std::size_t m) {
    if (m == 0) throw InvalidArgument("pair evidence count m must be >= 1");
    ClaimEvidencePair pair;
    pair.evidence = evidence.texts(m);
    pair.empty_evidence = pair.evidence.empty();
    pair.text = std::string(claim_text) + std::string(kSeparator);
    for (std::size_t i = 0; i < pair.evidence.size(); ++i) {
        if (i > 0) pair.text += ", ";
        pair.text += pair.evidence[i];
    }
    return pair;
}

std::string claim_of_pair(std::string_view pair) {
    const auto pos = pair.find(kSeparator);
    return std::string(pair.substr(0, pos));
}

}  // namespace cer::evidence
