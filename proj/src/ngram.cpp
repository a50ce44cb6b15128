#include "stringvec/ngram.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "stringvec/hash.hpp"

namespace stringvec {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Returns the scalar at p, advancing p. Invalid sequences yield U+FFFD and
// advance by one byte.
char32_t next_scalar(const unsigned char*& p, const unsigned char* end) {
    unsigned char b0 = *p;
    if (b0 < 0x80) {
        ++p;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++p;
        return kReplacement;
    }
    if (end - p < len) {
        ++p;
        return kReplacement;
    }
    for (int i = 1; i < len; ++i) {
        if ((p[i] & 0xC0) != 0x80) {
            ++p;
            return kReplacement;
        }
        cp = (cp << 6) | (p[i] & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range values are invalid.
    static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++p;
        return kReplacement;
    }
    p += len;
    return cp;
}

} // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const unsigned char* end = p + s.size();
    while (p < end) out.push_back(next_scalar(p, end));
    return out;
}

std::string encode_utf8(const char32_t* data, std::size_t len) {
    std::string out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        char32_t c = data[i];
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

bool valid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const unsigned char* end = p + s.size();
    while (p < end) {
        unsigned char b0 = *p;
        if (b0 < 0x80) {
            ++p;
            continue;
        }
        int len;
        char32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return false;
        }
        if (end - p < len) return false;
        for (int i = 1; i < len; ++i) {
            if ((p[i] & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (p[i] & 0x3F);
        }
        static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        p += len;
    }
    return true;
}

char32_t to_lower_scalar(char32_t c) noexcept {
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    return c;
}

namespace {

std::vector<char32_t> lowered_scalars(std::string_view s) {
    std::vector<char32_t> cps = decode_utf8(s);
    for (auto& c : cps) c = to_lower_scalar(c);
    return cps;
}

} // namespace

std::vector<std::string> char_ngrams(std::string_view s, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max) throw std::invalid_argument("char_ngrams: need 1 <= n_min <= n_max");
    std::vector<char32_t> cps = lowered_scalars(s);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    const int len = static_cast<int>(cps.size());
    for (int n = n_min; n <= n_max; ++n) {
        for (int i = 0; i + n <= len; ++i) {
            std::string g = encode_utf8(cps.data() + i, static_cast<std::size_t>(n));
            if (seen.insert(g).second) out.push_back(std::move(g));
        }
    }
    return out;
}

std::vector<std::pair<std::string, int>> char_ngram_counts(std::string_view s, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max) throw std::invalid_argument("char_ngram_counts: need 1 <= n_min <= n_max");
    std::vector<char32_t> cps = lowered_scalars(s);
    std::vector<std::pair<std::string, int>> out;
    std::unordered_map<std::string, int> index;
    const int len = static_cast<int>(cps.size());
    for (int n = n_min; n <= n_max; ++n) {
        for (int i = 0; i + n <= len; ++i) {
            std::string g = encode_utf8(cps.data() + i, static_cast<std::size_t>(n));
            auto [it, fresh] = index.emplace(std::move(g), static_cast<int>(out.size()));
            if (fresh) {
                out.emplace_back(it->first, 1);
            } else {
                ++out[static_cast<std::size_t>(it->second)].second;
            }
        }
    }
    return out;
}

Regime classify_regime(std::int64_t unique_ngrams, std::int64_t threshold) {
    return unique_ngrams <= threshold ? Regime::Dirty : Regime::Diverse;
}

NgramProfile profile_column(const std::vector<std::string>& values,
                            int sample_n, int n_min, int n_max,
                            std::uint64_t seed, std::int64_t regime_threshold,
                            std::string column_name) {
    if (values.empty()) throw std::invalid_argument("profile_column: values must be non-empty");
    if (sample_n < 1) throw std::invalid_argument("profile_column: sample_n must be >= 1");

    const std::size_t n = values.size();
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(sample_n), n);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (take < n) {
        SplitMix64 rng(seed);
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
            std::swap(idx[i], idx[j]);
        }
    }

    std::unordered_set<std::string> grams;
    for (std::size_t i = 0; i < take; ++i) {
        for (auto& g : char_ngrams(values[idx[i]], n_min, n_max)) grams.insert(std::move(g));
    }

    NgramProfile profile;
    profile.column = std::move(column_name);
    profile.sample_size = static_cast<int>(take);
    profile.n_min = n_min;
    profile.n_max = n_max;
    profile.unique_ngrams = static_cast<std::int64_t>(grams.size());
    profile.regime = classify_regime(profile.unique_ngrams, regime_threshold);
    return profile;
}

} // namespace stringvec
