#pragma once

#include <span>
#include <string>
#include <vector>

#include "cer/corpus.hpp"

namespace cer::evaluation {

struct DocumentLength {
    std::string doc_id;
    double mean_sentence_chars = 0.0;
};

struct HistogramBin {
    double start = 0.0;
    double end = 0.0;
    std::size_t count = 0;
};

struct CorpusStats {
    std::vector<DocumentLength> documents;  // first-appearance order
    std::vector<HistogramBin> bins;
};

/// Per-document mean of SentenceUnit::char_length, binned into `bins`
/// equal-width bins spanning [min, max]; the maximum falls in the last bin.
/// A single distinct value gets bins of width 1 starting at it.
CorpusStats corpus_stats(std::span<const corpus::SentenceUnit> units, std::size_t bins = 50);

/// "bin_start,bin_end,count" header plus one row per bin.
std::string histogram_csv(const CorpusStats& stats);

}  // namespace cer::evaluation
