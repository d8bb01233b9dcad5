#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cer/classifier.hpp"
#include "cer/dataset.hpp"
#include "cer/evidence.hpp"
#include "cer/interchange.hpp"
#include "cer/llm.hpp"
#include "cer/metrics.hpp"
#include "cer/prompt.hpp"
#include "cer/zero_shot.hpp"

namespace cer::pipeline {

using evaluation::ClaimRecord;
using veracity::RecordFlag;
using veracity::VerdictRecord;

/// Output of the retrieval stage for one claim, persisted as JSONL:
///   {"claim_id", "claim", "dataset", "split", "gold_label"?, "evidence",
///    "context", "pair", "flags"}
/// `context` holds the top-k sentences for the prompt, `evidence` the top-m
/// that enter the pair string.
struct PairRecord {
    std::string claim_id;
    std::string claim;
    std::string dataset;
    veracity::Split split = veracity::Split::test;
    std::optional<Label> gold_label;
    std::vector<std::string> evidence;
    std::vector<std::string> context;
    std::string pair;
    std::set<RecordFlag> flags;

    bool operator==(const PairRecord&) const = default;
};

std::string serialize_pairs(const std::vector<PairRecord>& pairs);
std::vector<PairRecord> parse_pairs(std::string_view text, const std::string& source = "pairs");
void write_pairs(const std::vector<PairRecord>& pairs, const std::filesystem::path& path);
std::vector<PairRecord> read_pairs(const std::filesystem::path& path);

struct ReasoningConfig {
    std::size_t k = evidence::kDefaultTopK;
    std::size_t m = evidence::kDefaultPairEvidence;
    reasoning::PromptOptions prompt;
    std::size_t max_in_flight = 4;
};

/// Retrieves evidence for each claim (split taken from the record, test when
/// unset).
std::vector<PairRecord> retrieve_pairs(std::span<const ClaimRecord> claims, const evidence::Retriever& retriever,
                                       const ReasoningConfig& config);

/// Builds the prompt from the pair's context, calls the LLM and parses the
/// answer. Calls run concurrently up to config.max_in_flight; output order
/// follows input order.
std::vector<VerdictRecord> reason_pairs(std::span<const PairRecord> pairs, const reasoning::LlmProvider& llm,
                                        const reasoning::ResponseCache* cache, const ReasoningConfig& config);

/// Everything the reasoning stage needs.
struct Stage {
    const evidence::Retriever* retriever = nullptr;
    const reasoning::LlmProvider* llm = nullptr;
    const reasoning::ResponseCache* cache = nullptr;
};

std::vector<VerdictRecord> reason_claims(std::span<const ClaimRecord> claims, const Stage& stage,
                                         const ReasoningConfig& config);

enum class ClassifyMode { trained, zero_shot };

const char* to_string(ClassifyMode mode);
ClassifyMode classify_mode_from_string(std::string_view name);

struct PipelineConfig {
    ReasoningConfig reasoning;
    veracity::TrainConfig train;
    std::uint64_t split_seed = 42;
    ClassifyMode classify = ClassifyMode::trained;
    veracity::ZeroShotOptions zero_shot;
};

struct PipelineRun {
    std::string dataset;
    LabelSet labels;
    std::vector<VerdictRecord> records;  // every split; test records carry predictions
    evaluation::EvalReport report;       // test split
    std::optional<veracity::ClassifierModel> model;
};

/// Predictions for the test split of `records` (already reasoned, with
/// splits set) under `config.classify`.
PipelineRun classify_and_evaluate(std::string dataset, LabelSet labels, std::vector<VerdictRecord> records,
                                  const PipelineConfig& config);

/// split -> retrieve -> prompt -> LLM -> parse -> classify -> evaluate.
PipelineRun run_pipeline(const evaluation::DatasetSpec& ds, const Stage& stage, const PipelineConfig& config);

/// Macro metrics over records that carry gold and predicted labels, taken in
/// claim_id order. Predictions outside `labels` count as misses.
evaluation::EvalReport evaluate_records(std::span<const VerdictRecord> records, const LabelSet& labels);

/// Pairs gold labels from `gold` (by claim_id) with predictions from `pred`.
evaluation::EvalReport evaluate_against(std::span<const VerdictRecord> pred, std::span<const VerdictRecord> gold,
                                        const LabelSet& labels);

}  // namespace cer::pipeline
