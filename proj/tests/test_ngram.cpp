#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "stringvec/hash.hpp"
#include "stringvec/ngram.hpp"

using namespace stringvec;

namespace {

// Independent n-gram enumeration: decode by hand, lowercase ASCII/Latin-1,
// collect substrings into an ordered set. Deliberately naive.
std::set<std::string> oracle_ngrams(const std::string& s, int n_min, int n_max) {
    std::vector<char32_t> cps = decode_utf8(s);
    for (auto& c : cps) c = to_lower_scalar(c);
    std::set<std::string> out;
    for (int n = n_min; n <= n_max; ++n) {
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cps.size(); ++i)
            out.insert(encode_utf8(cps.data() + i, static_cast<std::size_t>(n)));
    }
    return out;
}

std::string random_string(SplitMix64& rng, int len) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 -";
    std::string s;
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[static_cast<std::size_t>(rng.bounded(alphabet.size()))]);
    return s;
}

} // namespace

TEST_CASE("char_ngrams enumerates abc") {
    auto grams = char_ngrams("abc", 2, 3);
    std::set<std::string> got(grams.begin(), grams.end());
    CHECK(got == std::set<std::string>{"ab", "bc", "abc"});
}

TEST_CASE("char_ngrams of the empty string is empty") {
    CHECK(char_ngrams("", 2, 4).empty());
    CHECK(char_ngrams("a", 2, 4).empty());  // shorter than n_min
}

TEST_CASE("char_ngrams lowercases") {
    auto upper = char_ngrams("AB", 2, 2);
    auto lower = char_ngrams("ab", 2, 2);
    CHECK(upper == lower);
}

TEST_CASE("char_ngrams works on multibyte scalars") {
    // 4 scalars; 3 bigrams, each a 2-scalar UTF-8 string.
    auto grams = char_ngrams("\xC3\xA9t\xC3\xA9s", 2, 2);  // "étés"
    CHECK(grams.size() == 3);
    CHECK(std::find(grams.begin(), grams.end(), "\xC3\xA9t") != grams.end());
}

TEST_CASE("portugal has 18 unique 2..4-grams") {
    // 7 bigrams + 6 trigrams + 5 quadgrams, all distinct.
    CHECK(char_ngrams("portugal", 2, 4).size() == 18);
    CHECK(char_ngrams("Portugal", 2, 4).size() == 18);
}

TEST_CASE("char_ngram_counts keeps multiplicity") {
    auto counts = char_ngram_counts("aaa", 2, 2);  // "aa" twice
    REQUIRE(counts.size() == 1);
    CHECK(counts[0].first == "aa");
    CHECK(counts[0].second == 2);
}

TEST_CASE("classify_regime honors the threshold inclusively") {
    CHECK(classify_regime(294) == Regime::Dirty);
    CHECK(classify_regime(12605) == Regime::Diverse);
    CHECK(classify_regime(3000) == Regime::Dirty);
    CHECK(classify_regime(3001) == Regime::Diverse);
}

TEST_CASE("profile_column of constant rows matches single-string count") {
    std::vector<std::string> values(1000, "Portugal");
    auto profile = profile_column(values, 1000, 2, 4, 0);
    CHECK(profile.unique_ngrams == 18);
    CHECK(profile.sample_size == 1000);
    CHECK(profile.regime == Regime::Dirty);
}

TEST_CASE("profile_column equals the brute-force union oracle") {
    SplitMix64 rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::string> values;
        const int rows = 200 + static_cast<int>(rng.bounded(300));
        for (int i = 0; i < rows; ++i)
            values.push_back(random_string(rng, 3 + static_cast<int>(rng.bounded(12))));

        std::set<std::string> expected;
        for (const auto& v : values) {
            auto grams = oracle_ngrams(v, 2, 4);
            expected.insert(grams.begin(), grams.end());
        }
        // sample_n >= rows, so every row participates.
        auto profile = profile_column(values, 1000, 2, 4, static_cast<std::uint64_t>(trial));
        CHECK(profile.unique_ngrams == static_cast<std::int64_t>(expected.size()));
        CHECK(profile.sample_size == rows);
    }
}

TEST_CASE("profile monotonicity: adding rows never decreases the count") {
    SplitMix64 rng(77);
    std::vector<std::string> values;
    std::int64_t last = 0;
    for (int step = 0; step < 10; ++step) {
        for (int i = 0; i < 20; ++i)
            values.push_back(random_string(rng, 5 + static_cast<int>(rng.bounded(6))));
        auto profile = profile_column(values, 10000, 2, 4, 0);
        CHECK(profile.unique_ngrams >= last);
        last = profile.unique_ngrams;
    }
}

TEST_CASE("profile is permutation invariant when the sample is the whole column") {
    SplitMix64 rng(5);
    std::vector<std::string> values;
    for (int i = 0; i < 300; ++i) values.push_back(random_string(rng, 8));
    auto base = profile_column(values, 1000, 2, 4, 9);

    std::vector<std::string> shuffled = values;
    for (std::size_t i = 0; i + 1 < shuffled.size(); ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(shuffled.size() - i));
        std::swap(shuffled[i], shuffled[j]);
    }
    auto again = profile_column(shuffled, 1000, 2, 4, 123);
    CHECK(base.unique_ngrams == again.unique_ngrams);
}

TEST_CASE("profile sampling clamps to the column length") {
    std::vector<std::string> values{"alpha", "beta", "gamma"};
    auto profile = profile_column(values, 1000, 2, 4, 0);
    CHECK(profile.sample_size == 3);
}

TEST_CASE("profile subsamples without replacement") {
    // 2000 distinct rows, sample 1000: the sampled union can never exceed the
    // full union, and two seeds pick different subsets.
    SplitMix64 rng(404);
    std::vector<std::string> values;
    for (int i = 0; i < 2000; ++i) values.push_back(random_string(rng, 10));
    auto full = profile_column(values, 2000, 2, 4, 0);
    auto sampled0 = profile_column(values, 1000, 2, 4, 0);
    auto sampled1 = profile_column(values, 1000, 2, 4, 1);
    CHECK(sampled0.sample_size == 1000);
    CHECK(sampled0.unique_ngrams <= full.unique_ngrams);
    CHECK(sampled0.unique_ngrams != sampled1.unique_ngrams);  // overwhelmingly likely
    auto repeat = profile_column(values, 1000, 2, 4, 0);
    CHECK(repeat.unique_ngrams == sampled0.unique_ngrams);
}

TEST_CASE("decode/encode round trip") {
    std::string s = "caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x98\x80";  // café € emoji
    auto cps = decode_utf8(s);
    CHECK(encode_utf8(cps.data(), cps.size()) == s);
    CHECK(valid_utf8(s));
    CHECK(!valid_utf8("\xFF\xFE"));
    CHECK(!valid_utf8("\xC3"));  // truncated sequence
}
