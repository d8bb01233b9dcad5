#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cer/dense_index.hpp"
#include "cer/embedding.hpp"
#include "cer/llm.hpp"
#include "cer/pipeline.hpp"
#include "cer/sparse_index.hpp"

namespace cer {

enum class ConfigSource { default_value, config_file, environment, command_line };

const char* to_string(ConfigSource source);

struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string env;  // empty: no environment variable
    std::string help;
};

/// Settings of one run. Values come from, in decreasing precedence, command
/// line flags, environment variables, a config file and built-in defaults.
/// Every key is validated up front; unknown keys are a ConfigError.
class RunConfig {
  public:
    static const std::vector<ConfigKey>& keys();
    static bool is_key(std::string_view name);

    /// Parses `key=value` lines (`#` comments) or, when the first
    /// non-blank character is `{`, a flat JSON object.
    static std::map<std::string, std::string> parse_file(const std::filesystem::path& path);

    using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
    static EnvLookup process_env();

    static RunConfig resolve(const std::map<std::string, std::string>& cli,
                             const std::optional<std::filesystem::path>& config_file,
                             const EnvLookup& env = process_env());

    [[nodiscard]] const std::string& get(std::string_view key) const;
    [[nodiscard]] ConfigSource source(std::string_view key) const;
    [[nodiscard]] std::size_t get_count(std::string_view key) const;
    [[nodiscard]] double get_real(std::string_view key) const;
    [[nodiscard]] bool get_flag(std::string_view key) const;
    [[nodiscard]] std::uint64_t get_u64(std::string_view key) const;

    /// Throws ConfigError naming the first invalid key.
    void validate() const;

    [[nodiscard]] retrieval::RetrieverMode retriever_mode() const;
    [[nodiscard]] retrieval::Bm25Params bm25() const;
    [[nodiscard]] net::HttpOptions http() const;
    [[nodiscard]] pipeline::PipelineConfig pipeline_config() const;

    /// Embedder selected by `embedder` (mock, remote or precomputed).
    [[nodiscard]] std::shared_ptr<const retrieval::EmbeddingProvider> make_embedder() const;
    /// Mock provider when `llm_fixture` is set, HTTP provider otherwise.
    [[nodiscard]] std::unique_ptr<reasoning::LlmProvider> make_llm() const;
    /// Null when `cache_dir` is empty.
    [[nodiscard]] std::unique_ptr<reasoning::ResponseCache> make_cache() const;

    /// key = value (source) lines, API key masked.
    [[nodiscard]] std::string describe() const;

  private:
    struct Entry {
        std::string value;
        ConfigSource source = ConfigSource::default_value;
    };
    std::map<std::string, Entry, std::less<>> values_;
};

}  // namespace cer
