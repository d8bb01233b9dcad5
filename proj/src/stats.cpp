#include "cer/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "cer/error.hpp"

namespace cer::evaluation {

CorpusStats corpus_stats(std::span<const corpus::SentenceUnit> units, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
    CorpusStats out;
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<std::pair<double, std::size_t>> sums;
    for (const auto& u : units) {
        auto [it, inserted] = slot.emplace(u.doc_id, out.documents.size());
        if (inserted) {
            out.documents.push_back(DocumentLength{u.doc_id, 0.0});
            sums.emplace_back(0.0, 0);
        }
        sums[it->second].first += static_cast<double>(u.char_length);
        ++sums[it->second].second;
    }
    for (std::size_t i = 0; i < out.documents.size(); ++i) {
        out.documents[i].mean_sentence_chars = sums[i].first / static_cast<double>(sums[i].second);
    }
    if (out.documents.empty()) return out;

    double lo = out.documents.front().mean_sentence_chars;
    double hi = lo;
    for (const auto& d : out.documents) {
        lo = std::min(lo, d.mean_sentence_chars);
        hi = std::max(hi, d.mean_sentence_chars);
    }
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    out.bins.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out.bins[b].start = lo + width * static_cast<double>(b);
        out.bins[b].end = b + 1 == bins && hi > lo ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (const auto& d : out.documents) {
        auto b = static_cast<std::size_t>((d.mean_sentence_chars - lo) / width);
        ++out.bins[std::min(b, bins - 1)].count;
    }
    return out;
}

std::string histogram_csv(const CorpusStats& stats) {
    std::string out = "bin_start,bin_end,count\n";
    char line[96];
    for (const auto& b : stats.bins) {
        std::snprintf(line, sizeof line, "%.4f,%.4f,%zu\n", b.start, b.end, b.count);
        out += line;
    }
    return out;
}

}  // namespace cer::evaluation
