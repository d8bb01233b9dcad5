#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cer/http_client.hpp"
#include "cer/labels.hpp"
#include "cer/prompt.hpp"

namespace cer::reasoning {

/// Text-completion backend. Implementations must tolerate concurrent calls.
class LlmProvider {
  public:
    virtual ~LlmProvider() = default;
    /// Part of the cache key: responses from different providers never mix.
    [[nodiscard]] virtual std::string tag() const = 0;
    [[nodiscard]] virtual std::string complete(const std::string& prompt) const = 0;
};

/// Canned responses read from a fixture file:
///
///   {"responses": {"<sha256 of rendered prompt>": "text", ...},
///    "rules": [{"contains": "...", "not_contains": "...", "response": "text"}, ...],
///    "default": "text"}
///
/// An exact hash match wins, then the first rule whose conditions all hold,
/// then the default. A file holding a flat {hash: text} object is read as
/// "responses" alone. No match and no default is a ProviderError (404).
class MockLlmProvider final : public LlmProvider {
  public:
    struct Rule {
        std::vector<std::string> contains;
        std::vector<std::string> not_contains;
        std::string response;
    };

    MockLlmProvider() = default;
    static std::unique_ptr<MockLlmProvider> load(const std::filesystem::path& path);
    static std::unique_ptr<MockLlmProvider> parse(std::string_view json_text, const std::string& source = "fixture");

    void set_response(const std::string& prompt_hash, std::string text) { responses_[prompt_hash] = std::move(text); }
    void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }
    void set_default(std::string text) { default_ = std::move(text); }

    [[nodiscard]] std::string tag() const override { return "mock"; }
    [[nodiscard]] std::string complete(const std::string& prompt) const override;

    /// Number of complete() calls so far.
    [[nodiscard]] std::size_t calls() const { return calls_.load(); }

  private:
    std::unordered_map<std::string, std::string> responses_;
    std::vector<Rule> rules_;
    std::optional<std::string> default_;
    mutable std::atomic<std::size_t> calls_{0};
};

/// POST {"prompt", "temperature", "max_tokens"} -> {"text"}. The API key,
/// when present, goes in an `Authorization: Bearer` header.
class HttpLlmProvider final : public LlmProvider {
  public:
    struct Options {
        std::string endpoint;  // defaults to $CER_LLM_ENDPOINT
        std::string api_key;   // defaults to $CER_LLM_API_KEY
        double temperature = 0.0;
        int max_tokens = 512;
        net::HttpOptions http;
    };

    explicit HttpLlmProvider(Options options);

    [[nodiscard]] std::string tag() const override;
    [[nodiscard]] std::string complete(const std::string& prompt) const override;

  private:
    Options options_;
};

/// Content-addressed response store: one JSON file per key under `dir`,
/// written atomically. Unreadable or corrupt entries count as misses.
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path dir);

    [[nodiscard]] static std::string key(std::string_view provider_tag, std::string_view rendered_prompt);

    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, std::string_view provider_tag, std::string_view text) const;

    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
    [[nodiscard]] std::filesystem::path entry_path(const std::string& key) const;

  private:
    std::filesystem::path dir_;
};

/// Renders the prompt and asks the provider, consulting `cache` (may be
/// null) first and storing fresh responses in it.
std::string invoke_llm(const PromptSpec& prompt, const LlmProvider& provider, const ResponseCache* cache = nullptr);

struct ReasoningOutput {
    Label llm_label = Label::NEI;
    std::string justification;
    bool parse_ok = false;
    std::string raw;

    bool operator==(const ReasoningOutput&) const = default;
};

/// Reads a leading "Label: Yes|No|NEI" (case-insensitive, markdown emphasis
/// and surrounding whitespace tolerated) and takes the rest as the
/// justification. Without a parseable label: NEI, parse_ok = false and the
/// whole raw text as justification. Never throws.
ReasoningOutput parse_reasoning(std::string_view raw) noexcept;

}  // namespace cer::reasoning
