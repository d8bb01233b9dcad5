#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cer/labels.hpp"

namespace cer::veracity {

enum class Split { train, validation, test };

const char* to_string(Split split);
std::optional<Split> split_from_string(std::string_view name);

enum class RecordFlag { empty_evidence, parse_failed };

const char* to_string(RecordFlag flag);
std::optional<RecordFlag> flag_from_string(std::string_view name);

/// One claim as it moves between pipeline stages, and the row format shared
/// with external trainers.
struct VerdictRecord {
    std::string claim_id;
    std::string claim;
    std::string dataset;
    Split split = Split::test;
    std::optional<Label> gold_label;
    std::vector<std::string> evidence;  // at most the pair evidence count, rank order
    std::string justification;
    Label llm_label = Label::NEI;
    std::optional<Label> predicted_label;
    std::optional<std::map<Label, double>> probabilities;
    std::set<RecordFlag> flags;

    bool operator==(const VerdictRecord&) const = default;

    [[nodiscard]] bool has(RecordFlag f) const { return flags.count(f) != 0; }
};

/// Argmax with ties going to the lexicographically first label name.
Label argmax_label(const std::map<Label, double>& probabilities);

/// Throws InvalidArgument if probabilities do not sum to 1 +- 1e-9, any value
/// lies outside [0, 1], or predicted_label disagrees with their argmax.
void validate(const VerdictRecord& record);

/// One JSON object, keys in the fixed order claim_id, claim, dataset, split,
/// gold_label, evidence, justification, llm_label, predicted_label,
/// probabilities, flags. Absent optionals are omitted.
std::string to_json_line(const VerdictRecord& record);

/// Throws FormatError naming `line_no` and the offending field.
VerdictRecord from_json_line(std::string_view line, std::size_t line_no = 1, const std::string& source = "input");

void write_interchange(const std::vector<VerdictRecord>& records, const std::filesystem::path& path);
std::string serialize_interchange(const std::vector<VerdictRecord>& records);
std::vector<VerdictRecord> read_interchange(const std::filesystem::path& path);
std::vector<VerdictRecord> parse_interchange(std::string_view text, const std::string& source = "input");

}  // namespace cer::veracity
