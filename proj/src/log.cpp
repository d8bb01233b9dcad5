#include "cer/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace cer::log {
namespace {

Level level_from_env() {
    const char* raw = std::getenv("CER_LOG_LEVEL");
    if (raw == nullptr) return Level::warn;
    const std::string v(raw);
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "error") return Level::error;
    if (v == "off") return Level::off;
    return Level::warn;
}

std::atomic<Level>& current() {
    static std::atomic<Level> lvl{level_from_env()};
    return lvl;
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

const char* tag(Level l) {
    switch (l) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        case Level::off: break;
    }
    return "";
}

}  // namespace

void set_level(Level l) { current().store(l); }
Level level() { return current().load(); }

void write(Level l, std::string_view message) {
    if (l < current().load() || l == Level::off) return;
    std::lock_guard<std::mutex> lock(sink_mutex());
    std::cerr << "[cer:" << tag(l) << "] " << message << '\n';
}

}  // namespace cer::log
