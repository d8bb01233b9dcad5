#include "cer/labels.hpp"

#include <algorithm>
#include <cctype>

namespace cer {

LabelSet three_class_labels() { return {Label::Supported, Label::Refuted, Label::NEI}; }
LabelSet two_class_labels() { return {Label::Supported, Label::Refuted}; }

std::string_view to_string(Label label) {
    switch (label) {
        case Label::Supported: return "Supported";
        case Label::Refuted: return "Refuted";
        case Label::NEI: return "NEI";
    }
    return "NEI";
}

std::optional<Label> label_from_name(std::string_view name) {
    for (Label l : kAllLabels) {
        if (to_string(l) == name) return l;
    }
    return std::nullopt;
}

std::optional<Label> normalize_label(std::string_view raw) {
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    std::string key;
    key.reserve(raw.size());
    bool prev_space = false;
    for (char c : raw) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            if (!prev_space) key.push_back(' ');
            prev_space = true;
            continue;
        }
        prev_space = false;
        key.push_back(static_cast<char>(std::tolower(uc)));
    }

    static constexpr std::array<std::string_view, 5> supported{"supported", "true", "yes", "support", "supports"};
    static constexpr std::array<std::string_view, 6> refuted{"refuted", "false", "no", "confute", "refutes", "contradict"};
    static constexpr std::array<std::string_view, 2> nei{"nei", "not enough information"};

    auto in = [&key](const auto& table) { return std::find(table.begin(), table.end(), key) != table.end(); };
    if (in(supported)) return Label::Supported;
    if (in(refuted)) return Label::Refuted;
    if (in(nei)) return Label::NEI;
    return std::nullopt;
}

std::optional<std::size_t> index_in(const LabelSet& set, Label label) {
    auto it = std::find(set.begin(), set.end(), label);
    if (it == set.end()) return std::nullopt;
    return static_cast<std::size_t>(it - set.begin());
}

bool contains(const LabelSet& set, Label label) { return index_in(set, label).has_value(); }

LabelSet lexicographic(const LabelSet& set) {
    LabelSet out = set;
    std::sort(out.begin(), out.end(), [](Label a, Label b) { return to_string(a) < to_string(b); });
    return out;
}

std::string join_labels(const LabelSet& set, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) out += sep;
        out += to_string(set[i]);
    }
    return out;
}

}  // namespace cer
