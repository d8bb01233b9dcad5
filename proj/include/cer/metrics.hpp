#pragma once

#include <span>
#include <string>
#include <vector>

#include "cer/labels.hpp"

namespace cer::evaluation {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // gold count

    bool operator==(const ClassMetrics&) const = default;
};

struct EvalReport {
    LabelSet labels;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_label;             // aligned with labels
    std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
    std::vector<std::size_t> unlisted;               // [gold]: predictions outside the set
    std::size_t total = 0;

    bool operator==(const EvalReport&) const = default;
};

/// Per-class P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R), each 0 when its
/// denominator is 0. Macro values are unweighted means over `labels`, classes
/// never predicted included. Throws InvalidArgument on a length mismatch or a
/// label outside the set. With `allow_unlisted_predictions`, a prediction
/// outside the set is a false negative for the gold class and a false
/// positive for none.
EvalReport macro_metrics(std::span<const Label> gold, std::span<const Label> predicted, const LabelSet& labels,
                         bool allow_unlisted_predictions = false);

/// Machine-readable report.
std::string report_json(const EvalReport& report, int indent = 2);

/// Aligned text table with percentages to two decimals.
std::string report_table(const EvalReport& report, const std::string& title = {});

/// Percentage with two decimals, e.g. 0.14142 -> "14.14".
std::string percent(double fraction);

}  // namespace cer::evaluation
