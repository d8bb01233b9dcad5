#include "cer/retrieval.hpp"

#include <algorithm>

#include "cer/error.hpp"

namespace cer::retrieval {

std::vector<ScoredHit> select_top_k(std::vector<Candidate> candidates, std::size_t k,
                                    std::span<const StoredSentence> sentences) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    auto before = [&sentences](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return sentences[a.ordinal].sentence_id < sentences[b.ordinal].sentence_id;
    };
    const std::size_t keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      before);
    std::vector<ScoredHit> hits;
    hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        hits.push_back(ScoredHit{sentences[candidates[i].ordinal].sentence_id, candidates[i].score, i + 1});
    }
    return hits;
}

const char* to_string(RetrieverMode mode) { return mode == RetrieverMode::sparse ? "sparse" : "dense"; }

RetrieverMode retriever_mode_from_string(const std::string& name) {
    if (name == "sparse") return RetrieverMode::sparse;
    if (name == "dense") return RetrieverMode::dense;
    throw InvalidArgument("unknown retriever mode '" + name + "' (expected sparse|dense)");
}

}  // namespace cer::retrieval
