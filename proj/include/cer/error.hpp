#pragma once

#include <stdexcept>
#include <string>

namespace cer {

/// Base for every failure that stems from inputs or environment rather than
/// from a programming error. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// A file or message that does not match its documented schema.
class FormatError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Violated precondition on caller-supplied values.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Failure reported by a remote or mock provider (LLM, embedder, zero-shot).
class ProviderError : public Error {
  public:
    ProviderError(const std::string& what, int status, bool retryable, std::string body_excerpt = {})
        : Error(what), status_(status), retryable_(retryable), body_excerpt_(std::move(body_excerpt)) {}

    /// HTTP status, or 0 when no response was received.
    [[nodiscard]] int status() const noexcept { return status_; }
    [[nodiscard]] bool retryable() const noexcept { return retryable_; }
    [[nodiscard]] const std::string& body_excerpt() const noexcept { return body_excerpt_; }

  private:
    int status_;
    bool retryable_;
    std::string body_excerpt_;
};

}  // namespace cer
