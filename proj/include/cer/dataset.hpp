#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cer/interchange.hpp"
#include "cer/labels.hpp"

namespace cer::evaluation {

using veracity::Split;

struct ClaimRecord {
    std::string id;
    std::string claim;
    Label label = Label::NEI;
    std::string dataset;
    std::optional<Split> split;  // set when the source file assigns one

    bool operator==(const ClaimRecord&) const = default;
};

using LabelCounts = std::map<Label, std::size_t>;

struct SplitSizes {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;

    [[nodiscard]] std::size_t total() const { return train + validation + test; }
    bool operator==(const SplitSizes&) const = default;
};

/// exact: the sizes are used as given and records beyond them stay unused.
/// fit: validation and test as given, train takes every remaining record.
enum class SplitPolicy { exact, fit };

/// Published facts about a known dataset.
struct DatasetInfo {
    std::string name;
    LabelSet labels;
    LabelCounts expected_counts;
    std::optional<SplitSizes> split_sizes;
    SplitPolicy split_policy = SplitPolicy::exact;
};

/// HealthFC, BioASQ-7b, SciFact, HealthFC-2 and SciFact-2.
const std::vector<DatasetInfo>& known_datasets();
const DatasetInfo* find_dataset(std::string_view name);

struct DatasetSpec {
    std::string name;
    LabelSet labels;
    std::vector<ClaimRecord> records;
    std::optional<LabelCounts> expected_counts;

    [[nodiscard]] LabelCounts counts() const;
};

/// Source field names. The shipped data/columns/*.json files hold one object
/// {"id": ..., "claim": ..., "label": ..., "split": ...} per dataset.
struct ColumnMap {
    std::string id = "id";
    std::string claim = "claim";
    std::string label = "label";
    std::string split;  // empty: no split column

    static ColumnMap load(const std::filesystem::path& path);
};

struct LoadOptions {
    ColumnMap columns;
    bool strict_counts = false;
};

/// Reads JSONL (object rows) or TSV (header row naming the columns,
/// selected by a .tsv extension). Labels go through normalize_label; an
/// unknown label or a label outside the dataset's set is an error naming the
/// row. Under strict_counts the label counts must equal the published ones.
DatasetSpec load_dataset(std::string_view name, const std::filesystem::path& path, const LoadOptions& options = {});

/// Records with the given label counts (ids "<name>-<n>"), for reasoning
/// about published distributions without the source files.
DatasetSpec dataset_from_counts(std::string_view name, const LabelSet& labels, const LabelCounts& counts);

/// Throws Error when counts differ from ds.expected_counts.
void check_counts(const DatasetSpec& ds);

/// Removes NEI-gold records; the name gains a "-2" suffix. Throws
/// InvalidArgument if the dataset has no NEI class.
DatasetSpec drop_nei(const DatasetSpec& ds);

struct DatasetSplits {
    std::vector<ClaimRecord> train;
    std::vector<ClaimRecord> validation;
    std::vector<ClaimRecord> test;
    std::vector<ClaimRecord> unused;
};

/// Stratified by label and deterministic per seed. Each split's per-label
/// quota is its size times the label's share, rounded by largest remainder.
/// Every split keeps the dataset's record order. Throws InvalidArgument when
/// the sizes exceed the dataset.
DatasetSplits split_dataset(const DatasetSpec& ds, const SplitSizes& sizes, std::uint64_t seed,
                            SplitPolicy policy = SplitPolicy::exact);

/// Published sizes for known datasets; otherwise 20% validation, 20% test
/// and the rest train. Records that all carry a split keep it.
DatasetSplits split_dataset(const DatasetSpec& ds, std::uint64_t seed);

/// 20/20 proportional sizes with the remainder in train.
SplitSizes proportional_sizes(std::size_t n);

}  // namespace cer::evaluation
