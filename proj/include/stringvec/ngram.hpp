#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stringvec {

/// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences decode
/// to U+FFFD so n-gram extraction never fails on dirty input.
std::vector<char32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const char32_t* data, std::size_t len);

bool valid_utf8(std::string_view s);

/// Lowercases ASCII A-Z and the Latin-1 uppercase range. Full Unicode case
/// folding is out of scope.
char32_t to_lower_scalar(char32_t c) noexcept;

/// Unique character n-grams of the lowercased string, lengths n_min..n_max,
/// over Unicode scalar values. First-occurrence order; strings shorter than
/// n_min yield an empty set. Whitespace participates in n-grams.
std::vector<std::string> char_ngrams(std::string_view s, int n_min, int n_max);

/// N-gram occurrence counts (term frequencies) for TF-IDF style encoders.
std::vector<std::pair<std::string, int>> char_ngram_counts(std::string_view s, int n_min, int n_max);

enum class Regime { Dirty, Diverse };

inline const char* regime_name(Regime r) noexcept {
    return r == Regime::Dirty ? "dirty" : "diverse";
}

/// Column diversity summary: unique character n-grams over a row sample.
struct NgramProfile {
    std::string column;
    int sample_size = 0;
    int n_min = 2;
    int n_max = 4;
    std::int64_t unique_ngrams = 0;
    Regime regime = Regime::Dirty;
};

/// Dirty at or below the threshold, Diverse strictly above it.
Regime classify_regime(std::int64_t unique_ngrams, std::int64_t threshold = 3000);

/// Samples min(sample_n, |values|) rows without replacement and counts the
/// union of their character n-grams.
NgramProfile profile_column(const std::vector<std::string>& values,
                            int sample_n = 1000,
                            int n_min = 2,
                            int n_max = 4,
                            std::uint64_t seed = 0,
                            std::int64_t regime_threshold = 3000,
                            std::string column_name = {});

} // namespace stringvec
