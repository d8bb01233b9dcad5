#include <system_error>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/llm.hpp"
#include "cer/log.hpp"
#include "json.hpp"

namespace cer::reasoning {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::string ResponseCache::key(std::string_view provider_tag, std::string_view rendered_prompt) {
    std::string material(provider_tag);
    material += '\0';
    material += rendered_prompt;
    return sha256_hex(material);
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
    // Two-character fan-out keeps directories small on long runs.
    return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    const auto path = entry_path(key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    try {
        const json entry = json::parse(io::read_file(path));
        if (!entry.is_object() || entry.value("key", "") != key || !entry.contains("text") || !entry["text"].is_string()) {
            log::warn("cache entry " + path.string() + " is malformed; bypassing cache");
            return std::nullopt;
        }
        return entry["text"].get<std::string>();
    } catch (const std::exception& e) {
        log::warn("cache entry " + path.string() + " unreadable (" + e.what() + "); bypassing cache");
        return std::nullopt;
    }
}

void ResponseCache::put(const std::string& key, std::string_view provider_tag, std::string_view text) const {
    const json entry = {{"key", key}, {"provider", provider_tag}, {"text", text}};
    const auto path = entry_path(key);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    try {
        io::write_file_atomic(path, entry.dump());
    } catch (const IoError& e) {
        log::warn(std::string("cannot write cache entry: ") + e.what());
    }
}

}  // namespace cer::reasoning
