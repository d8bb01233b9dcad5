#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cer {

/// Veracity label. Declaration order is the canonical order used for
/// one-hot slots, probability maps and confusion matrices.
enum class Label { Supported = 0, Refuted = 1, NEI = 2 };

inline constexpr std::array<Label, 3> kAllLabels{Label::Supported, Label::Refuted, Label::NEI};

/// Ordered set of labels a dataset or model uses (2 or 3 entries).
using LabelSet = std::vector<Label>;

LabelSet three_class_labels();
LabelSet two_class_labels();

std::string_view to_string(Label label);

/// Exact canonical names only ("Supported", "Refuted", "NEI").
std::optional<Label> label_from_name(std::string_view name);

/// Dataset label normalization: case-insensitive, surrounding whitespace
/// ignored. Accepts the canonical names plus true/yes/support/supports,
/// false/no/confute/refutes/contradict and nei/not enough information.
std::optional<Label> normalize_label(std::string_view raw);

/// Index of `label` within `set`, or nullopt.
std::optional<std::size_t> index_in(const LabelSet& set, Label label);

bool contains(const LabelSet& set, Label label);

/// Labels of `set` sorted by name, used for deterministic tie-breaking.
LabelSet lexicographic(const LabelSet& set);

std::string join_labels(const LabelSet& set, std::string_view sep = ",");

}  // namespace cer
