#include "cer/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "json.hpp"

namespace cer {

const char* to_string(ConfigSource source) {
    switch (source) {
        case ConfigSource::default_value: return "default";
        case ConfigSource::config_file: return "config file";
        case ConfigSource::environment: return "environment";
        case ConfigSource::command_line: return "command line";
    }
    return "?";
}

const std::vector<ConfigKey>& RunConfig::keys() {
    static const std::vector<ConfigKey> kKeys = {
        {"mode", "sparse", "", "retriever: sparse or dense"},
        {"k", "20", "", "sentences retrieved per claim"},
        {"m", "3", "", "evidence sentences in the claim-evidence pair"},
        {"variant", "full", "", "prompt variant: full, no_role, no_evidence, no_justification"},
        {"char_budget", "24000", "", "prompt size limit in characters"},
        {"max_in_flight", "4", "", "concurrent provider calls"},
        {"seed", "42", "", "split and training seed"},
        {"strict_counts", "false", "", "require published label counts when loading datasets"},
        {"k1", "1.2", "", "BM25 term-frequency saturation"},
        {"b", "0.75", "", "BM25 length normalization"},
        {"llm_fixture", "", "", "mock LLM response file; when set no endpoint is contacted"},
        {"llm_endpoint", "", "CER_LLM_ENDPOINT", "LLM completion endpoint URL"},
        {"llm_api_key", "", "CER_LLM_API_KEY", "bearer token for the LLM endpoint"},
        {"llm_max_tokens", "512", "", "completion length limit"},
        {"llm_temperature", "0", "", "sampling temperature"},
        {"embedder", "mock", "", "embedding provider: mock, remote or precomputed"},
        {"embed_dim", "64", "", "embedding dimension (mock and remote)"},
        {"embed_seed", "0", "", "mock embedder seed"},
        {"embed_endpoint", "", "CER_EMBED_ENDPOINT", "embedding endpoint URL"},
        {"embed_vectors", "", "", "precomputed vectors JSONL"},
        {"zeroshot_endpoint", "", "CER_ZEROSHOT_ENDPOINT", "zero-shot classifier endpoint URL"},
        {"cache_dir", "", "", "LLM response cache directory; empty disables caching"},
        {"retries", "3", "", "retries after a transient provider failure"},
        {"backoff_ms", "1000", "", "first retry delay; doubles on each retry"},
        {"timeout_s", "60", "", "per-request timeout"},
        {"lr", "1.0", "", "classifier learning rate"},
        {"l2", "0.0001", "", "classifier L2 penalty"},
        {"epochs", "200", "", "classifier epoch limit"},
        {"patience", "10", "", "epochs without validation improvement before stopping"},
        {"data_dir", "", "", "directory holding <dataset>.jsonl or <dataset>.tsv files"},
        {"columns_dir", "", "", "directory of per-dataset column maps (<dataset>.json)"},
    };
    return kKeys;
}

bool RunConfig::is_key(std::string_view name) {
    for (const auto& k : keys()) {
        if (k.name == name) return true;
    }
    return false;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::map<std::string, std::string> RunConfig::parse_file(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    std::map<std::string, std::string> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path.string() + ": invalid JSON (" + e.what() + ")");
        }
        for (const auto& [key, value] : j.items()) {
            if (value.is_string()) out[key] = value.get<std::string>();
            else if (value.is_boolean()) out[key] = value.get<bool>() ? "true" : "false";
            else if (value.is_number()) out[key] = value.dump();
            else throw ConfigError(path.string() + ": key '" + key + "' must be a string, number or boolean");
        }
    } else {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
            }
            out[trim(std::string_view(line).substr(0, eq))] = trim(std::string_view(line).substr(eq + 1));
        }
    }
    for (const auto& [key, value] : out) {
        if (!is_key(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");
    }
    return out;
}

RunConfig::EnvLookup RunConfig::process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
}

RunConfig RunConfig::resolve(const std::map<std::string, std::string>& cli,
                             const std::optional<std::filesystem::path>& config_file, const EnvLookup& env) {
    RunConfig cfg;
    for (const auto& k : keys()) cfg.values_[k.name] = Entry{k.default_value, ConfigSource::default_value};
    if (config_file) {
        for (auto& [key, value] : parse_file(*config_file)) cfg.values_[key] = Entry{value, ConfigSource::config_file};
    }
    for (const auto& k : keys()) {
        if (k.env.empty()) continue;
        if (auto v = env(k.env); v && !v->empty()) cfg.values_[k.name] = Entry{*v, ConfigSource::environment};
    }
    for (const auto& [key, value] : cli) {
        if (!is_key(key)) throw ConfigError("unknown configuration key '" + key + "'");
        cfg.values_[key] = Entry{value, ConfigSource::command_line};
    }
    cfg.validate();
    return cfg;
}

const std::string& RunConfig::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    return it->second.value;
}

ConfigSource RunConfig::source(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    return it->second.source;
}

namespace {

[[noreturn]] void bad(std::string_view key, const std::string& value, const char* want) {
    throw ConfigError("configuration key '" + std::string(key) + "' = '" + value + "' is not " + want);
}

}  // namespace

std::uint64_t RunConfig::get_u64(std::string_view key) const {
    const std::string& v = get(key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, v, "a non-negative integer");
    return out;
}

std::size_t RunConfig::get_count(std::string_view key) const { return static_cast<std::size_t>(get_u64(key)); }

double RunConfig::get_real(std::string_view key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) bad(key, v, "a finite number");
    return d;
}

bool RunConfig::get_flag(std::string_view key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
    bad(key, v, "a boolean");
}

void RunConfig::validate() const {
    (void)retriever_mode();
    try {
        (void)reasoning::prompt_variant_from_string(get("variant"));
    } catch (const Error& e) {
        throw ConfigError("configuration key 'variant': " + std::string(e.what()));
    }
    for (const char* key : {"k", "m", "char_budget", "max_in_flight", "llm_max_tokens", "embed_dim", "epochs"}) {
        if (get_count(key) == 0) throw ConfigError("configuration key '" + std::string(key) + "' must be >= 1");
    }
    for (const char* key : {"seed", "embed_seed", "retries", "backoff_ms", "timeout_s", "patience"}) (void)get_u64(key);
    (void)get_flag("strict_counts");
    if (get_real("k1") <= 0.0) throw ConfigError("configuration key 'k1' must be > 0");
    const double b = get_real("b");
    if (b < 0.0 || b > 1.0) throw ConfigError("configuration key 'b' must lie in [0, 1]");
    if (get_real("lr") <= 0.0) throw ConfigError("configuration key 'lr' must be > 0");
    if (get_real("l2") < 0.0) throw ConfigError("configuration key 'l2' must be >= 0");
    if (get_real("llm_temperature") < 0.0) throw ConfigError("configuration key 'llm_temperature' must be >= 0");
    const std::string& e = get("embedder");
    if (e != "mock" && e != "remote" && e != "precomputed") {
        throw ConfigError("configuration key 'embedder' must be mock, remote or precomputed");
    }
}

retrieval::RetrieverMode RunConfig::retriever_mode() const {
    try {
        return retrieval::retriever_mode_from_string(get("mode"));
    } catch (const Error&) {
        throw ConfigError("configuration key 'mode' must be sparse or dense, got '" + get("mode") + "'");
    }
}

retrieval::Bm25Params RunConfig::bm25() const { return retrieval::Bm25Params{get_real("k1"), get_real("b")}; }

net::HttpOptions RunConfig::http() const {
    net::HttpOptions h;
    h.retry.max_retries = static_cast<int>(get_count("retries"));
    h.retry.base_delay = std::chrono::milliseconds(get_u64("backoff_ms"));
    h.timeout = std::chrono::seconds(get_u64("timeout_s"));
    return h;
}

pipeline::PipelineConfig RunConfig::pipeline_config() const {
    pipeline::PipelineConfig p;
    p.reasoning.k = get_count("k");
    p.reasoning.m = get_count("m");
    p.reasoning.prompt.variant = reasoning::prompt_variant_from_string(get("variant"));
    p.reasoning.prompt.char_budget = get_count("char_budget");
    p.reasoning.max_in_flight = get_count("max_in_flight");
    p.train.learning_rate = get_real("lr");
    p.train.l2 = get_real("l2");
    p.train.max_epochs = get_count("epochs");
    p.train.patience = get_count("patience");
    p.train.seed = get_u64("seed");
    p.split_seed = get_u64("seed");
    p.zero_shot.endpoint = get("zeroshot_endpoint");
    if (!p.zero_shot.endpoint.empty()) p.zero_shot.mode = veracity::ZeroShotMode::external_endpoint;
    p.zero_shot.http = http();
    return p;
}

std::shared_ptr<const retrieval::EmbeddingProvider> RunConfig::make_embedder() const {
    const std::string& kind = get("embedder");
    if (kind == "mock") return std::make_shared<retrieval::MockEmbeddingProvider>(get_count("embed_dim"), get_u64("embed_seed"));
    if (kind == "precomputed") {
        if (get("embed_vectors").empty()) throw ConfigError("embedder 'precomputed' needs embed_vectors");
        return retrieval::PrecomputedEmbeddingProvider::load(get("embed_vectors"));
    }
    retrieval::RemoteEmbeddingProvider::Options o;
    o.endpoint = get("embed_endpoint");
    o.dimension = get_count("embed_dim");
    o.http = http();
    return std::make_shared<retrieval::RemoteEmbeddingProvider>(std::move(o));
}

std::unique_ptr<reasoning::LlmProvider> RunConfig::make_llm() const {
    if (!get("llm_fixture").empty()) return reasoning::MockLlmProvider::load(get("llm_fixture"));
    reasoning::HttpLlmProvider::Options o;
    o.endpoint = get("llm_endpoint");
    o.api_key = get("llm_api_key");
    o.temperature = get_real("llm_temperature");
    o.max_tokens = static_cast<int>(get_count("llm_max_tokens"));
    o.http = http();
    return std::make_unique<reasoning::HttpLlmProvider>(std::move(o));
}

std::unique_ptr<reasoning::ResponseCache> RunConfig::make_cache() const {
    if (get("cache_dir").empty()) return nullptr;
    return std::make_unique<reasoning::ResponseCache>(get("cache_dir"));
}

std::string RunConfig::describe() const {
    std::string out;
    for (const auto& k : keys()) {
        const auto& e = values_.at(k.name);
        const std::string shown = k.name == "llm_api_key" && !e.value.empty() ? "****" : e.value;
        out += k.name + " = " + shown + " (" + to_string(e.source) + ")\n";
    }
    return out;
}

}  // namespace cer
