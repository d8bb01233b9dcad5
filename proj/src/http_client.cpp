#include "cer/http_client.hpp"

#include <cmath>
#include <thread>

#include "cer/error.hpp"
#include "cer/log.hpp"
#include "httplib.h"

namespace cer::net {
namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme (http:// or https://)");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) throw ConfigError("endpoint '" + url + "' lacks a host");
    return out;
}

}  // namespace

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    const double factor = std::pow(multiplier, std::max(0, attempt - 1));
    return std::chrono::milliseconds(static_cast<long long>(static_cast<double>(base_delay.count()) * factor));
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

bool is_retryable_status(int status) {
    return status == 0 || status == 408 || status == 425 || status == 429 || (status >= 500 && status <= 599);
}

std::string excerpt(const std::string& body) { return body.size() <= 200 ? body : body.substr(0, 200) + "..."; }

PostOutcome post_json(const std::string& url, const std::string& json_body, const Headers& headers,
                      const HttpOptions& options) {
    const ParsedUrl target = parse_url(url);
    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    const int max_attempts = 1 + std::max(0, options.retry.max_retries);
    int last_status = 0;
    std::string last_body;
    std::string last_reason;

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        httplib::Client client(target.origin);
        client.set_connection_timeout(options.timeout);
        client.set_read_timeout(options.timeout);
        client.set_write_timeout(options.timeout);

        auto res = client.Post(target.path, hdrs, json_body, "application/json");
        if (res) {
            last_status = res->status;
            last_body = res->body;
            last_reason = "HTTP " + std::to_string(res->status);
            if (res->status >= 200 && res->status < 300) {
                log::info(url + ": success after " + std::to_string(attempt) + " attempt(s)");
                return PostOutcome{res->body, res->status, attempt};
            }
        } else {
            last_status = 0;
            last_body.clear();
            last_reason = httplib::to_string(res.error());
        }

        if (!is_retryable_status(last_status)) {
            throw ProviderError(url + ": non-retryable " + last_reason + ": " + excerpt(last_body), last_status, false,
                                excerpt(last_body));
        }
        log::warn(url + ": attempt " + std::to_string(attempt) + "/" + std::to_string(max_attempts) +
                  " failed (" + last_reason + ")");
        if (attempt < max_attempts) options.sleeper(options.retry.delay_after(attempt));
    }
    throw ProviderError(url + ": giving up after " + std::to_string(max_attempts) + " attempts, last " + last_reason,
                        last_status, true, excerpt(last_body));
}

}  // namespace cer::net
