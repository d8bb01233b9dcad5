#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cer::net {

/// Exponential backoff: attempt n (n >= 1) that fails transiently is
/// followed by a delay of base_delay * multiplier^(n-1), up to max_retries
/// extra attempts.
struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{1000};
    double multiplier = 2.0;

    [[nodiscard]] std::chrono::milliseconds delay_after(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// std::this_thread::sleep_for.
Sleeper real_sleeper();

/// 408, 425, 429 and every 5xx; 0 stands for "no response" (timeout or
/// connection failure) and is retryable too.
bool is_retryable_status(int status);

using Headers = std::vector<std::pair<std::string, std::string>>;

struct PostOutcome {
    std::string body;
    int status = 0;
    int attempts = 0;
};

struct HttpOptions {
    RetryPolicy retry;
    std::chrono::seconds timeout{60};
    Sleeper sleeper = real_sleeper();
};

/// POSTs a JSON body to an http:// or https:// URL and returns the 2xx
/// response body. Transient failures are retried per options.retry; a
/// non-retryable status fails immediately. Either way the thrown
/// ProviderError carries the last status and a body excerpt.
PostOutcome post_json(const std::string& url, const std::string& json_body, const Headers& headers,
                      const HttpOptions& options);

/// At most 200 bytes of a response body, for error messages.
std::string excerpt(const std::string& body);

}  // namespace cer::net
