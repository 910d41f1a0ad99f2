/*
 * oracle.hpp
 *
 * Independent reference implementations for testing: a plain-text shadow
 * that answers every query naively, a deterministic generator for highly
 * repetitive texts, and a sweep that cross-checks an index against its
 * shadow on a systematic set of patterns.
 */

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tsti/index.hpp"
#include "tsti/strings.hpp"

namespace tsti {

// Plain-text mirror of an index; every operation is the naive one.
class ShadowText {
public:
    explicit ShadowText(Text t) : text_(std::move(t)) {}

    const Text& text() const { return text_; }
    std::size_t size() const { return text_.size(); }

    std::uint64_t count(const Pattern& p) const { return occ_naive(p, text_).size(); }
    std::vector<std::size_t> locate(const Pattern& p) const { return occ_naive(p, text_); }
    std::string extract(std::size_t i, std::size_t len) const {
        return text_.bytes.substr(i - 1, len);
    }
    void insert(std::size_t i, std::string_view k) { text_ = insert_str(text_, i, k); }
    void erase(std::size_t i, std::size_t k) { text_ = delete_str(text_, i, k); }

private:
    Text text_;
};

// Highly repetitive text: a random base block repeated `copies` times, with
// point mutations sprinkled at the given rate. Deterministic in the seed.
inline Text gen_repetitive(std::size_t base_len, std::size_t copies, double mutation_rate,
                           std::uint64_t seed, std::string_view alphabet = "ab") {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string base;
    base.reserve(base_len);
    for (std::size_t i = 0; i < base_len; ++i) base.push_back(alphabet[pick(rng)]);
    std::string raw;
    raw.reserve(base_len * copies);
    for (std::size_t c = 0; c < copies; ++c) raw += base;
    if (mutation_rate > 0 && !raw.empty()) {
        std::bernoulli_distribution mutate(mutation_rate);
        for (char& ch : raw)
            if (mutate(rng)) ch = alphabet[pick(rng)];
    }
    if (raw.empty()) raw.push_back(alphabet[0]);
    return Text::from_raw(raw);
}

// Patterns worth probing for a text and q: substrings at assorted positions
// with lengths straddling q, plus a few strings guaranteed absent.
inline std::vector<Pattern> probe_patterns(const Text& t, std::size_t q, std::uint64_t seed,
                                           std::size_t per_length = 5) {
    std::mt19937_64 rng(seed);
    std::string_view raw = t.raw();
    std::vector<Pattern> out;
    std::set<std::string> seen;
    std::vector<std::size_t> lens{1, q > 1 ? q - 1 : 1, q, q + 1, 2 * q, 4 * q};
    for (std::size_t len : lens) {
        if (len == 0 || len > raw.size()) continue;
        std::uniform_int_distribution<std::size_t> pos(0, raw.size() - len);
        for (std::size_t r = 0; r < per_length; ++r) {
            std::string p(raw.substr(pos(rng), len));
            if (seen.insert(p).second) out.emplace_back(std::move(p));
        }
        // boundary substrings
        std::string head(raw.substr(0, len));
        if (seen.insert(head).second) out.emplace_back(std::move(head));
        std::string tail(raw.substr(raw.size() - len, len));
        if (seen.insert(tail).second) out.emplace_back(std::move(tail));
    }
    // absent patterns: symbols outside the text alphabet
    for (std::string p : {std::string("zzz"), std::string(q + 1, 'z')})
        if (seen.insert(p).second) out.emplace_back(std::move(p));
    return out;
}

// Cross-checks count/locate/extract of `idx` against the shadow on the
// given patterns. Returns a human-readable description of the first
// mismatch, or the empty string when everything agrees.
inline std::string check_against_shadow(const TstIndex& idx, const ShadowText& shadow,
                                        const std::vector<Pattern>& patterns) {
    if (idx.text() != shadow.text()) return "reconstructed text differs";
    for (const Pattern& p : patterns) {
        auto want = shadow.locate(p);
        auto got = idx.locate(p);
        if (got != want)
            return "locate mismatch on pattern of length " + std::to_string(p.size());
        if (idx.count(p) != want.size())
            return "count mismatch on pattern of length " + std::to_string(p.size());
    }
    const std::size_t n = shadow.size();
    std::vector<std::pair<std::size_t, std::size_t>> cuts{
        {1, n}, {1, 1}, {n, 1}, {1, n > 1 ? n / 2 : 1}, {n / 2 + 1, n - n / 2}};
    for (auto [i, len] : cuts)
        if (idx.extract(i, len) != shadow.extract(i, len)) return "extract mismatch";
    return "";
}

}  // namespace tsti
