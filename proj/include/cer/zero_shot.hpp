#pragma once

#include <string>

#include "cer/http_client.hpp"
#include "cer/interchange.hpp"
#include "cer/labels.hpp"

namespace cer::veracity {

enum class ZeroShotMode { llm_passthrough, external_endpoint };

struct ZeroShotOptions {
    ZeroShotMode mode = ZeroShotMode::llm_passthrough;
    std::string endpoint;  // external mode; defaults to $CER_ZEROSHOT_ENDPOINT
    LabelSet candidate_labels = three_class_labels();
    net::HttpOptions http;
};

struct ZeroShotResult {
    Label label = Label::NEI;
    std::optional<std::map<Label, double>> probabilities;  // external mode, normalized scores
};

/// Passthrough returns the record's llm_label (NEI after a parse failure)
/// and never fails. External mode POSTs
///   {"claim", "evidence", "justification", "candidate_labels"}
/// and expects {"labels": [...], "scores": [...]}; the top-scoring label
/// wins, ties to the lexicographically first name.
ZeroShotResult zero_shot_classify(const VerdictRecord& record, const ZeroShotOptions& options);

}  // namespace cer::veracity
