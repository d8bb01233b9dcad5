#include "cer/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"

namespace cer::retrieval {
namespace {

constexpr std::string_view kMagic = "CERSIDX1";

void check_params(const Bm25Params& p) {
    if (!(p.k1 > 0.0) || !std::isfinite(p.k1)) throw InvalidArgument("BM25 k1 must be > 0");
    if (!(p.b >= 0.0 && p.b <= 1.0)) throw InvalidArgument("BM25 b must lie in [0, 1]");
}

double mean_length(const std::vector<std::uint32_t>& lengths) {
    std::uint64_t total = 0;
    for (auto l : lengths) total += l;
    return static_cast<double>(total) / static_cast<double>(lengths.size());
}

}  // namespace

double bm25_idf(std::uint64_t total_units, std::uint64_t units_with_term) {
    const double n = static_cast<double>(total_units);
    const double nt = static_cast<double>(units_with_term);
    return std::log((n - nt + 0.5) / (nt + 0.5));
}

double bm25_term_contribution(double idf, double tf, double unit_length, double avgdl, const Bm25Params& params) {
    const double norm = params.k1 * (1.0 - params.b + params.b * unit_length / avgdl);
    return idf * (tf * (params.k1 + 1.0)) / (tf + norm);
}

SparseIndex SparseIndex::build(std::span<const corpus::SentenceUnit> units, Bm25Params params) {
    check_params(params);
    if (units.empty()) throw InvalidArgument("cannot build a BM25 index from zero units (avgdl undefined)");

    SparseIndex index;
    index.params_ = params;
    index.unit_lengths_.reserve(units.size());
    index.sentences_.reserve(units.size());

    for (std::size_t ordinal = 0; ordinal < units.size(); ++ordinal) {
        const corpus::TokenStream tokens = corpus::preprocess(units[ordinal].text);
        if (tokens.size() > UINT32_MAX) throw InvalidArgument("unit too long");
        index.unit_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        index.sentences_.push_back(StoredSentence{units[ordinal].sentence_id, units[ordinal].text});

        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& t : tokens) ++counts[t];
        for (const auto& [term, tf] : counts) {
            index.postings_[std::string(term)].push_back(Posting{static_cast<std::uint32_t>(ordinal), tf});
        }
    }
    index.finalize();
    return index;
}

void SparseIndex::finalize() {
    avgdl_ = mean_length(unit_lengths_);
    ordinal_by_id_.clear();
    ordinal_by_id_.reserve(sentences_.size());
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
        if (!ordinal_by_id_.emplace(sentences_[i].sentence_id, i).second) {
            throw InvalidArgument("duplicate sentence id " + sentences_[i].sentence_id);
        }
    }
}

std::size_t SparseIndex::document_frequency(std::string_view term) const { return postings(term).size(); }

std::span<const Posting> SparseIndex::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return {};
    return it->second;
}

std::uint32_t SparseIndex::term_frequency(std::string_view term, std::size_t ordinal) const {
    const auto list = postings(term);
    auto it = std::lower_bound(list.begin(), list.end(), ordinal,
                               [](const Posting& p, std::size_t o) { return p.ordinal < o; });
    return (it != list.end() && it->ordinal == ordinal) ? it->tf : 0;
}

double SparseIndex::idf(std::string_view term) const { return bm25_idf(size(), document_frequency(term)); }

double SparseIndex::bm25_score(const corpus::TokenStream& query_tokens, std::size_t ordinal) const {
    if (ordinal >= size()) throw InvalidArgument("unit ordinal out of range");
    double score = 0.0;
    for (const auto& term : query_tokens) {
        const std::uint32_t tf = term_frequency(term, ordinal);
        if (tf == 0) continue;
        score += bm25_term_contribution(idf(term), tf, unit_lengths_[ordinal], avgdl_, params_);
    }
    return score;
}

std::vector<ScoredHit> SparseIndex::search(std::string_view query, std::size_t k) const {
    return search_tokens(corpus::preprocess(query), k);
}

std::vector<ScoredHit> SparseIndex::search_tokens(const corpus::TokenStream& query_tokens, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    // Contributions are accumulated in query-token order, which keeps every
    // score bit-identical to bm25_score() for the same unit.
    std::unordered_map<std::size_t, double> acc;
    for (const auto& term : query_tokens) {
        const auto list = postings(term);
        if (list.empty()) continue;
        const double term_idf = bm25_idf(size(), list.size());
        for (const Posting& p : list) {
            acc[p.ordinal] += bm25_term_contribution(term_idf, p.tf, unit_lengths_[p.ordinal], avgdl_, params_);
        }
    }
    std::vector<Candidate> candidates;
    candidates.reserve(acc.size());
    for (const auto& [ordinal, score] : acc) candidates.push_back(Candidate{score, ordinal});
    return select_top_k(std::move(candidates), k, sentences_);
}

std::size_t SparseIndex::ordinal_of(std::string_view sentence_id) const {
    auto it = ordinal_by_id_.find(std::string(sentence_id));
    return it == ordinal_by_id_.end() ? size() : it->second;
}

std::string SparseIndex::serialize() const {
    io::BinaryWriter w;
    w.bytes(kMagic);
    w.u64(size());
    w.f64(avgdl_);
    w.f64(params_.k1);
    w.f64(params_.b);

    std::vector<std::string_view> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());

    w.u64(terms.size());
    for (auto term : terms) {
        const auto& list = postings_.at(std::string(term));
        w.str(term);
        w.u32(static_cast<std::uint32_t>(list.size()));
        for (const Posting& p : list) {
            w.u32(p.ordinal);
            w.u32(p.tf);
        }
    }
    for (std::size_t i = 0; i < size(); ++i) {
        w.u32(unit_lengths_[i]);
        w.str(sentences_[i].sentence_id);
        w.str(sentences_[i].text);
    }
    return w.buffer();
}

void SparseIndex::save(const std::filesystem::path& path) const { io::write_file_atomic(path, serialize()); }

SparseIndex SparseIndex::load(const std::filesystem::path& path) { return deserialize(io::read_file(path), path.string()); }

SparseIndex SparseIndex::deserialize(std::string bytes, const std::string& source) {
    io::BinaryReader r(std::move(bytes), source);
    auto fail = [&source](const std::string& why) { return FormatError(source + ": " + why); };

    if (r.bytes(kMagic.size()) != kMagic) throw fail("not a sparse index (bad magic)");
    const std::uint64_t n = r.u64();
    const double stored_avgdl = r.f64();
    SparseIndex index;
    index.params_.k1 = r.f64();
    index.params_.b = r.f64();
    try {
        check_params(index.params_);
    } catch (const InvalidArgument& e) {
        throw fail(e.what());
    }
    if (n == 0) throw fail("index holds zero units");

    const std::uint64_t term_count = r.u64();
    std::string previous;
    for (std::uint64_t t = 0; t < term_count; ++t) {
        std::string term = r.str();
        if (t > 0 && !(previous < term)) throw fail("term dictionary not strictly ascending at '" + term + "'");
        const std::uint32_t df = r.u32();
        if (df == 0) throw fail("empty postings list for '" + term + "'");
        std::vector<Posting> list;
        list.reserve(df);
        for (std::uint32_t i = 0; i < df; ++i) {
            Posting p{r.u32(), r.u32()};
            if (p.ordinal >= n) throw fail("posting ordinal out of range for '" + term + "'");
            if (p.tf == 0) throw fail("zero term frequency for '" + term + "'");
            if (!list.empty() && list.back().ordinal >= p.ordinal) throw fail("postings not ascending for '" + term + "'");
            list.push_back(p);
        }
        previous = term;
        index.postings_.emplace(std::move(term), std::move(list));
    }
    index.unit_lengths_.reserve(n);
    index.sentences_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        index.unit_lengths_.push_back(r.u32());
        std::string id = r.str();
        std::string text = r.str();
        index.sentences_.push_back(StoredSentence{std::move(id), std::move(text)});
    }
    if (!r.at_end()) throw fail("trailing bytes after unit table");
    try {
        index.finalize();
    } catch (const InvalidArgument& e) {
        throw fail(e.what());
    }
    if (index.avgdl_ != stored_avgdl) throw fail("stored avgdl does not match unit lengths");
    return index;
}

}  // namespace cer::retrieval
