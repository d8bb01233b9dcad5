#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cer::reasoning {

enum class PromptVariant { full, no_role, no_evidence, no_justification };

const char* to_string(PromptVariant variant);
/// Accepts the enum names; throws ConfigError otherwise.
PromptVariant prompt_variant_from_string(std::string_view name);

enum class Section { sys, context, question };

const char* to_string(Section section);

/// A named piece of the prompt. Variants are defined as edits to specific
/// segments, so two prompts can be compared segment by segment.
struct PromptSegment {
    std::string name;
    Section section = Section::sys;
    std::string text;

    bool operator==(const PromptSegment&) const = default;
};

inline constexpr std::size_t kDefaultCharBudget = 24000;

struct PromptOptions {
    PromptVariant variant = PromptVariant::full;
    std::size_t char_budget = kDefaultCharBudget;  // code points of the rendered prompt
};

struct PromptSpec {
    PromptVariant variant = PromptVariant::full;
    std::vector<PromptSegment> segments;
    std::size_t context_sentences = 0;  // sentences kept after truncation
    std::size_t dropped_sentences = 0;

    [[nodiscard]] std::string section(Section s) const;
    [[nodiscard]] std::string sys_section() const { return section(Section::sys); }
    [[nodiscard]] std::string context_section() const { return section(Section::context); }
    [[nodiscard]] std::string question_section() const { return section(Section::question); }
    [[nodiscard]] const PromptSegment* segment(std::string_view name) const;

    /// "<<SYS>>: <sys>\n\n<<Context>>: <context>\n\n<<Question>>: <question>"
    [[nodiscard]] std::string render() const;
};

/// Segment names, in render order.
namespace segment {
inline constexpr std::string_view role = "role";
inline constexpr std::string_view guidance = "guidance";
inline constexpr std::string_view evidence_clause = "evidence_clause";
inline constexpr std::string_view claim_clause = "claim_clause";
inline constexpr std::string_view elaborate = "elaborate";
inline constexpr std::string_view knowledge_rule = "knowledge_rule";
inline constexpr std::string_view style_rule = "style_rule";
inline constexpr std::string_view justification = "justification";
inline constexpr std::string_view label_rule = "label_rule";
inline constexpr std::string_view context = "context";
inline constexpr std::string_view question = "question";
}  // namespace segment

/// Segments a variant is allowed to change relative to the full prompt.
std::vector<std::string_view> segments_touched_by(PromptVariant variant);

/// Reasoning prompt for one claim. `context_sentences` are in rank order;
/// when the rendered prompt exceeds the budget, sentences are dropped from
/// the lowest rank upward until it fits (possibly down to none).
PromptSpec build_prompt(std::string_view claim, const std::vector<std::string>& context_sentences,
                        const PromptOptions& options = {});

}  // namespace cer::reasoning
