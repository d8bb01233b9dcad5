#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cer {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data);

/// SplitMix64 generator. Used wherever the output sequence must not depend
/// on the standard library implementation.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

  private:
    std::uint64_t state_;
};

}  // namespace cer
