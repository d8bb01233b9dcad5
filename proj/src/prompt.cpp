#include "cer/prompt.hpp"

#include "cer/corpus.hpp"
#include "cer/error.hpp"
#include "cer/log.hpp"

namespace cer::reasoning {
namespace {

constexpr std::string_view kRole = "You are a helpful, respectful, and honest Doctor. ";
constexpr std::string_view kGuidance = "Always answer as helpfully as possible using the context text provided. ";
constexpr std::string_view kEvidenceLead = "Try to give an explanation based on the scientific evidence as follows: ";
constexpr std::string_view kClaimLead = "The claim is as follows: ";
constexpr std::string_view kElaborate = "Elaborate the scientific evidence to generate new information.\n";
constexpr std::string_view kKnowledgeRule = "Use only the knowledge in the results to answer.\n";
constexpr std::string_view kStyleRule = "Be formal and use the third person.\n";
constexpr std::string_view kJustification =
    "Provide a maximum 200-word response without directly mentioning the Context. "
    "Use it but don’t refer to it in your answer. ";
constexpr std::string_view kLabelOnly = "Respond with only the label. ";
constexpr std::string_view kLabelRule =
    "Begin with: \"Label:\" followed by the justification label (\"Yes\", \"No\", or \"NEI\").";

bool ends_with_terminal(std::string_view s) {
    return !s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!');
}

std::string clause(std::string_view lead, std::string_view body) {
    std::string out(lead);
    out += body;
    if (!ends_with_terminal(body)) out += '.';
    out += ' ';
    return out;
}

std::string join(const std::vector<std::string>& items, std::size_t n, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

PromptSpec assemble(std::string_view claim, const std::vector<std::string>& sentences, std::size_t n,
                    PromptVariant variant) {
    const bool with_evidence = variant != PromptVariant::no_evidence;
    PromptSpec spec;
    spec.variant = variant;
    spec.context_sentences = with_evidence ? n : 0;
    auto add = [&](std::string_view name, Section section, std::string text) {
        spec.segments.push_back(PromptSegment{std::string(name), section, std::move(text)});
    };
    add(segment::role, Section::sys, variant == PromptVariant::no_role ? "" : std::string(kRole));
    add(segment::guidance, Section::sys, std::string(kGuidance));
    add(segment::evidence_clause, Section::sys, with_evidence ? clause(kEvidenceLead, join(sentences, n, " ")) : "");
    add(segment::claim_clause, Section::sys, clause(kClaimLead, claim));
    add(segment::elaborate, Section::sys, std::string(kElaborate));
    add(segment::knowledge_rule, Section::sys, std::string(kKnowledgeRule));
    add(segment::style_rule, Section::sys, std::string(kStyleRule));
    add(segment::justification, Section::sys,
        std::string(variant == PromptVariant::no_justification ? kLabelOnly : kJustification));
    add(segment::label_rule, Section::sys, std::string(kLabelRule));
    add(segment::context, Section::context, with_evidence ? join(sentences, n, "\n") : "");
    add(segment::question, Section::question, std::string(claim));
    return spec;
}

}  // namespace

const char* to_string(PromptVariant variant) {
    switch (variant) {
        case PromptVariant::full: return "full";
        case PromptVariant::no_role: return "no_role";
        case PromptVariant::no_evidence: return "no_evidence";
        case PromptVariant::no_justification: return "no_justification";
    }
    return "?";
}

PromptVariant prompt_variant_from_string(std::string_view name) {
    for (auto v : {PromptVariant::full, PromptVariant::no_role, PromptVariant::no_evidence,
                   PromptVariant::no_justification}) {
        if (name == to_string(v)) return v;
    }
    throw ConfigError("unknown prompt variant '" + std::string(name) +
                      "' (expected full, no_role, no_evidence or no_justification)");
}

const char* to_string(Section section) {
    switch (section) {
        case Section::sys: return "SYS";
        case Section::context: return "Context";
        case Section::question: return "Question";
    }
    return "?";
}

std::string PromptSpec::section(Section s) const {
    std::string out;
    for (const auto& seg : segments) {
        if (seg.section == s) out += seg.text;
    }
    return out;
}

const PromptSegment* PromptSpec::segment(std::string_view name) const {
    for (const auto& seg : segments) {
        if (seg.name == name) return &seg;
    }
    return nullptr;
}

std::string PromptSpec::render() const {
    return "<<SYS>>: " + sys_section() + "\n\n<<Context>>: " + context_section() +
           "\n\n<<Question>>: " + question_section();
}

std::vector<std::string_view> segments_touched_by(PromptVariant variant) {
    switch (variant) {
        case PromptVariant::full: return {};
        case PromptVariant::no_role: return {segment::role};
        case PromptVariant::no_evidence: return {segment::evidence_clause, segment::context};
        case PromptVariant::no_justification: return {segment::justification};
    }
    return {};
}

PromptSpec build_prompt(std::string_view claim, const std::vector<std::string>& context_sentences,
                        const PromptOptions& options) {
    std::size_t n = options.variant == PromptVariant::no_evidence ? 0 : context_sentences.size();
    PromptSpec spec = assemble(claim, context_sentences, n, options.variant);
    while (n > 0 && corpus::count_code_points(spec.render()) > options.char_budget) {
        --n;
        spec = assemble(claim, context_sentences, n, options.variant);
    }
    spec.dropped_sentences = options.variant == PromptVariant::no_evidence ? 0 : context_sentences.size() - n;
    if (corpus::count_code_points(spec.render()) > options.char_budget) {
        log::warn("prompt exceeds the character budget even without context");
    }
    return spec;
}

}  // namespace cer::reasoning
