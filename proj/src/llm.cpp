#include "cer/llm.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/log.hpp"
#include "json.hpp"

namespace cer::reasoning {

using nlohmann::json;

namespace {

std::vector<std::string> string_or_list(const json& v, const std::string& where) {
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw FormatError(where + ": expected a string or a list of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw FormatError(where + ": expected a string or a list of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::string env_or(const std::string& value, const char* name) {
    if (!value.empty()) return value;
    const char* env = std::getenv(name);
    return env ? std::string(env) : std::string();
}

}  // namespace

std::unique_ptr<MockLlmProvider> MockLlmProvider::load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
}

std::unique_ptr<MockLlmProvider> MockLlmProvider::parse(std::string_view json_text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(source + ": invalid JSON (" + e.what() + ")");
    }
    if (!doc.is_object()) throw FormatError(source + ": expected a JSON object");
    auto mock = std::make_unique<MockLlmProvider>();
    const bool structured = doc.contains("responses") || doc.contains("rules") || doc.contains("default");
    const json& responses = structured ? doc.value("responses", json::object()) : doc;
    if (!responses.is_object()) throw FormatError(source + ": \"responses\" must be an object");
    for (const auto& [hash, text] : responses.items()) {
        if (!text.is_string()) throw FormatError(source + ": response for " + hash + " is not a string");
        mock->set_response(hash, text.get<std::string>());
    }
    if (structured && doc.contains("rules")) {
        if (!doc["rules"].is_array()) throw FormatError(source + ": \"rules\" must be a list");
        std::size_t i = 0;
        for (const auto& r : doc["rules"]) {
            const std::string where = source + ": rule " + std::to_string(i++);
            if (!r.is_object() || !r.contains("response") || !r["response"].is_string()) {
                throw FormatError(where + ": needs a string \"response\"");
            }
            Rule rule;
            if (r.contains("contains")) rule.contains = string_or_list(r["contains"], where);
            if (r.contains("not_contains")) rule.not_contains = string_or_list(r["not_contains"], where);
            rule.response = r["response"].get<std::string>();
            mock->add_rule(std::move(rule));
        }
    }
    if (structured && doc.contains("default")) {
        if (!doc["default"].is_string()) throw FormatError(source + ": \"default\" must be a string");
        mock->set_default(doc["default"].get<std::string>());
    }
    return mock;
}

std::string MockLlmProvider::complete(const std::string& prompt) const {
    calls_.fetch_add(1);
    if (!responses_.empty()) {
        auto it = responses_.find(sha256_hex(prompt));
        if (it != responses_.end()) return it->second;
    }
    for (const auto& rule : rules_) {
        bool ok = true;
        for (const auto& s : rule.contains) ok = ok && prompt.find(s) != std::string::npos;
        for (const auto& s : rule.not_contains) ok = ok && prompt.find(s) == std::string::npos;
        if (ok) return rule.response;
    }
    if (default_) return *default_;
    throw ProviderError("mock provider has no response for prompt " + sha256_hex(prompt), 404, false);
}

HttpLlmProvider::HttpLlmProvider(Options options) : options_(std::move(options)) {
    options_.endpoint = env_or(options_.endpoint, "CER_LLM_ENDPOINT");
    options_.api_key = env_or(options_.api_key, "CER_LLM_API_KEY");
    if (options_.endpoint.empty()) throw ConfigError("no LLM endpoint configured (set CER_LLM_ENDPOINT)");
    if (options_.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

std::string HttpLlmProvider::tag() const {
    std::ostringstream out;
    out << "http:" << options_.endpoint << ":t" << options_.temperature << ":m" << options_.max_tokens;
    return out.str();
}

std::string HttpLlmProvider::complete(const std::string& prompt) const {
    const json request = {{"prompt", prompt}, {"temperature", options_.temperature}, {"max_tokens", options_.max_tokens}};
    net::Headers headers;
    if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);
    const auto outcome = net::post_json(options_.endpoint, request.dump(), headers, options_.http);
    json body;
    try {
        body = json::parse(outcome.body);
    } catch (const json::parse_error&) {
        throw ProviderError(options_.endpoint + ": response is not JSON", outcome.status, false,
                            net::excerpt(outcome.body));
    }
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
        throw ProviderError(options_.endpoint + ": response lacks a string \"text\"", outcome.status, false,
                            net::excerpt(outcome.body));
    }
    return body["text"].get<std::string>();
}

std::string invoke_llm(const PromptSpec& prompt, const LlmProvider& provider, const ResponseCache* cache) {
    const std::string rendered = prompt.render();
    const std::string tag = provider.tag();
    std::string key;
    if (cache != nullptr) {
        key = ResponseCache::key(tag, rendered);
        if (auto hit = cache->get(key)) {
            log::debug("cache hit " + key);
            return *hit;
        }
    }
    std::string text = provider.complete(rendered);
    if (cache != nullptr) cache->put(key, tag, text);
    return text;
}

namespace {

bool is_markup(char c) { return c == '*' || c == '_' || c == '#' || c == '>' || c == '`' || c == '~'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void skip_space_and_markup(std::string_view s, std::size_t& i) {
    while (i < s.size() && (is_space(s[i]) || is_markup(s[i]))) ++i;
}

bool match_word(std::string_view s, std::size_t i, std::string_view word) {
    if (s.size() - i < word.size()) return false;
    for (std::size_t j = 0; j < word.size(); ++j) {
        if (std::tolower(static_cast<unsigned char>(s[i + j])) != word[j]) return false;
    }
    const std::size_t end = i + word.size();
    return end == s.size() || !is_word(s[end]);
}

std::string trim_justification(std::string_view s) {
    std::size_t b = 0;
    while (b < s.size() && (is_space(s[b]) || is_markup(s[b]) || s[b] == '.' || s[b] == ',' || s[b] == ':' ||
                            s[b] == '-' || s[b] == ';')) {
        ++b;
    }
    std::size_t e = s.size();
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

ReasoningOutput parse_reasoning(std::string_view raw) noexcept {
    ReasoningOutput out;
    try {
        out.raw = std::string(raw);
        out.justification = out.raw;
        std::size_t i = 0;
        skip_space_and_markup(raw, i);
        if (!match_word(raw, i, "label")) return out;
        i += 5;
        skip_space_and_markup(raw, i);
        if (i >= raw.size() || raw[i] != ':') return out;
        ++i;
        skip_space_and_markup(raw, i);
        static const std::pair<std::string_view, Label> kTokens[] = {
            {"not enough information", Label::NEI},
            {"yes", Label::Supported},
            {"no", Label::Refuted},
            {"nei", Label::NEI},
        };
        for (const auto& [word, label] : kTokens) {
            if (match_word(raw, i, word)) {
                out.llm_label = label;
                out.parse_ok = true;
                out.justification = trim_justification(raw.substr(i + word.size()));
                return out;
            }
        }
        return out;
    } catch (...) {
        out = ReasoningOutput{};
        return out;
    }
}

}  // namespace cer::reasoning
