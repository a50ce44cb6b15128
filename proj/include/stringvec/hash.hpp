#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace stringvec {

/// Seeded 64-bit statistical hash (MurmurHash64A). Used for MinHash
/// sketches, TF-IDF bucketing and the mock embedding backend.
std::uint64_t murmur64(const void* data, std::size_t len, std::uint64_t seed) noexcept;

inline std::uint64_t murmur64(std::string_view s, std::uint64_t seed) noexcept {
    return murmur64(s.data(), s.size(), seed);
}

/// Deterministic 64-bit stream (splitmix64). Portable across platforms and
/// standard libraries, unlike std::normal_distribution.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept;

    /// Uniform double in [0, 1).
    double uniform01() noexcept;

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) noexcept;

    /// Standard normal via Box-Muller.
    double normal() noexcept;

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Folds a list of 64-bit values into a single derived seed. Order matters.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Folds a string into a running seed.
std::uint64_t mix_seed_str(std::uint64_t h, std::string_view s) noexcept;

/// SHA-256 of a byte string as lowercase hex. Content addressing for the
/// embedding cache and config digests.
std::string sha256_hex(std::string_view data);

} // namespace stringvec
