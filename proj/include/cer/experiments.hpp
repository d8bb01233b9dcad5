#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cer/dataset.hpp"
#include "cer/metrics.hpp"
#include "cer/pipeline.hpp"
#include "cer/prompt.hpp"

namespace cer::evaluation {

enum class Baseline { all_supported, all_refuted, all_nei };

const char* to_string(Baseline which);
Baseline baseline_from_string(std::string_view name);

/// Constant predictor over the whole dataset. all_nei on a dataset without
/// NEI throws InvalidArgument.
EvalReport run_baseline(const DatasetSpec& ds, Baseline which);

/// Rows for each applicable baseline, one table.
std::string baseline_table(const DatasetSpec& ds);

struct AblationRow {
    reasoning::PromptVariant variant = reasoning::PromptVariant::full;
    EvalReport report;
};

/// Human-readable row name, e.g. "w/o scientific evidence".
std::string variant_title(reasoning::PromptVariant variant);

/// One full pipeline run per variant, in the given order; runs differ only in
/// the prompt variant.
std::vector<AblationRow> ablation_run(const DatasetSpec& ds, std::span<const reasoning::PromptVariant> variants,
                                      const pipeline::Stage& stage, const pipeline::PipelineConfig& config);

/// Rows = variants, columns = P / R / F1 in percent.
std::string ablation_table(const std::string& dataset, std::span<const AblationRow> rows);
std::string ablation_json(const std::string& dataset, std::span<const AblationRow> rows);

/// Reasoned records of one dataset with splits assigned.
struct LabeledRecords {
    std::string name;
    LabelSet labels;
    std::vector<veracity::VerdictRecord> records;
};

/// Removes NEI-gold records; name gains "-2". Throws if there is no NEI class.
LabeledRecords drop_nei(const LabeledRecords& data);

struct CrossEvalMatrix {
    std::vector<std::string> train_names;
    std::vector<std::string> test_names;
    std::vector<std::vector<EvalReport>> cells;  // [train][test]
};

/// For each (train, test) pair: label sets are aligned by dropping NEI from
/// whichever side has it when they differ; the classifier is trained on the
/// train split of the train side (validation split for model selection) and
/// evaluated on the test split of the test side.
CrossEvalMatrix cross_eval_records(std::span<const LabeledRecords> train_sets, std::span<const LabeledRecords> test_sets,
                                   const veracity::TrainConfig& config);

/// Splits and reasons every dataset once, then cross_eval_records.
CrossEvalMatrix cross_eval(std::span<const DatasetSpec> train_sets, std::span<const DatasetSpec> test_sets,
                           const pipeline::Stage& stage, const pipeline::PipelineConfig& config);

/// Standalone train/evaluate on one dataset, the reference for a diagonal cell.
EvalReport train_and_evaluate(const LabeledRecords& data, const veracity::TrainConfig& config);

std::string cross_eval_table(const CrossEvalMatrix& m);
std::string cross_eval_json(const CrossEvalMatrix& m);

}  // namespace cer::evaluation
