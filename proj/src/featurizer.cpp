#include "cer/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cer/corpus.hpp"
#include "cer/error.hpp"

namespace cer::veracity {

std::vector<std::string> ngrams(std::span<const std::string> tokens) {
    std::vector<std::string> out(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + " " + tokens[i + 1]);
    return out;
}

std::string feature_text(const VerdictRecord& record) {
    std::string text = record.claim;
    text += ' ';
    for (std::size_t i = 0; i < record.evidence.size(); ++i) {
        if (i > 0) text += ' ';
        text += record.evidence[i];
    }
    text += ' ';
    text += record.justification;
    return text;
}

Vocabulary Vocabulary::build(std::span<const VerdictRecord> records) {
    std::map<std::string, std::size_t> df;
    for (const auto& r : records) {
        const auto tokens = corpus::preprocess(feature_text(r));
        const auto grams = ngrams(tokens);
        for (const auto& g : std::set<std::string>(grams.begin(), grams.end())) ++df[g];
    }
    const double n = static_cast<double>(records.size());
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(df.size());
    for (const auto& [term, count] : df) {
        entries.emplace_back(term, std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return from_entries(std::move(entries));
}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, double>> term_idf) {
    std::sort(term_idf.begin(), term_idf.end());
    Vocabulary v;
    for (auto& [term, idf] : term_idf) {
        if (!v.terms_.empty() && v.terms_.back() == term) throw InvalidArgument("duplicate vocabulary term '" + term + "'");
        if (!std::isfinite(idf)) throw InvalidArgument("non-finite idf for '" + term + "'");
        v.terms_.push_back(std::move(term));
        v.idf_.push_back(idf);
    }
    v.reindex();
    return v;
}

void Vocabulary::reindex() {
    index_.clear();
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
}

std::int64_t Vocabulary::index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector Vocabulary::featurize(const VerdictRecord& record) const {
    std::map<std::uint32_t, double> counts;
    const auto tokens = corpus::preprocess(feature_text(record));
    for (const auto& g : ngrams(tokens)) {
        auto it = index_.find(g);
        if (it != index_.end()) counts[it->second] += 1.0;
    }
    SparseVector out;
    double norm2 = 0.0;
    for (const auto& [idx, tf] : counts) {
        const double w = tf * idf_[idx];
        out.entries.emplace_back(idx, w);
        norm2 += w * w;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& e : out.entries) e.second *= inv;
    }
    out.entries.emplace_back(static_cast<std::uint32_t>(terms_.size() + static_cast<std::size_t>(record.llm_label)), 1.0);
    return out;
}

}  // namespace cer::veracity
