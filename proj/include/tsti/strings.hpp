/*
 * strings.hpp
 *
 * Core text model: sentinel-terminated texts, insert/delete edits,
 * naive occurrence search, run-length encoding and LZ77 factorization
 * (without self-reference).
 *
 * Positions in the public API are 1-based throughout.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsti {

// The sentinel terminates every text. Ordinal 0, not part of the alphabet.
inline constexpr char kSentinel = '\0';

struct Text {
    // Raw symbols, last byte is always the sentinel. N = bytes.size().
    std::string bytes;

    Text() : bytes(1, kSentinel) {}

    explicit Text(std::string b) : bytes(std::move(b)) {
        if (bytes.empty() || bytes.back() != kSentinel)
            throw std::invalid_argument("text must end with the sentinel");
        if (bytes.find(kSentinel) != bytes.size() - 1)
            throw std::invalid_argument("sentinel may appear only at the end");
    }

    // Appends the sentinel to raw content (the on-disk form never stores it).
    static Text from_raw(std::string_view raw) {
        if (raw.find(kSentinel) != std::string_view::npos)
            throw std::invalid_argument("raw text contains the sentinel byte");
        std::string b(raw);
        b.push_back(kSentinel);
        return Text(std::move(b));
    }

    std::size_t size() const { return bytes.size(); }

    // raw content without the sentinel
    std::string_view raw() const {
        return std::string_view(bytes).substr(0, bytes.size() - 1);
    }

    bool operator==(const Text&) const = default;
};

struct Pattern {
    std::string bytes;  // non-empty, sentinel-free

    explicit Pattern(std::string b) : bytes(std::move(b)) {
        if (bytes.empty())
            throw std::invalid_argument("pattern must be non-empty");
        if (bytes.find(kSentinel) != std::string::npos)
            throw std::invalid_argument("pattern may not contain the sentinel");
    }

    std::size_t size() const { return bytes.size(); }
};

// insert(T, i, K) = T[..i-1] K T[i..], 1 <= i <= N. Inserting at i = N
// places K just before the sentinel.
inline Text insert_str(const Text& t, std::size_t i, std::string_view k) {
    const std::size_t n = t.size();
    if (i < 1 || i > n)
        throw std::out_of_range("insert position out of range");
    if (k.find(kSentinel) != std::string_view::npos)
        throw std::invalid_argument("inserted span contains the sentinel");
    std::string b;
    b.reserve(n + k.size());
    b.append(t.bytes, 0, i - 1);
    b.append(k);
    b.append(t.bytes, i - 1, std::string::npos);
    return Text(std::move(b));
}

// Removes exactly k symbols starting at i. The sentinel may not be touched.
inline Text delete_str(const Text& t, std::size_t i, std::size_t k) {
    const std::size_t n = t.size();
    if (i < 1 || i > n)
        throw std::out_of_range("delete position out of range");
    if (k == 0) return t;
    if (i + k - 1 >= n)
        throw std::out_of_range("delete range touches the sentinel");
    std::string b;
    b.reserve(n - k);
    b.append(t.bytes, 0, i - 1);
    b.append(t.bytes, i - 1 + k, std::string::npos);
    return Text(std::move(b));
}

// All 1-based start positions of p in t, ascending. The testing oracle for
// every index query.
inline std::vector<std::size_t> occ_naive(std::string_view p, std::string_view t) {
    std::vector<std::size_t> out;
    if (p.empty() || p.size() > t.size()) return out;
    for (std::size_t i = t.find(p); i != std::string_view::npos; i = t.find(p, i + 1))
        out.push_back(i + 1);
    return out;
}

inline std::vector<std::size_t> occ_naive(const Pattern& p, const Text& t) {
    return occ_naive(p.bytes, std::string_view(t.bytes));
}

template <typename Sym>
struct RleFactor {
    Sym symbol;
    std::size_t run_length;
    bool operator==(const RleFactor&) const = default;
};

template <typename Seq>
auto rle(const Seq& s) -> std::vector<RleFactor<typename Seq::value_type>> {
    using Sym = typename Seq::value_type;
    if (s.empty()) throw std::invalid_argument("rle of empty sequence");
    std::vector<RleFactor<Sym>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && s[j] == s[i]) ++j;
        out.push_back({s[i], j - i});
        i = j;
    }
    return out;
}

struct Lz77Factor {
    std::size_t start;   // 1-based position in the input
    std::size_t length;  // >= 1
    bool is_literal;     // fresh single symbol
    bool operator==(const Lz77Factor&) const = default;
};

namespace detail {

// Suffix automaton over an arbitrary symbol type; used to find the longest
// prefix of the remaining text occurring in the already-processed prefix.
template <typename Sym>
class SuffixAutomaton {
public:
    SuffixAutomaton() {
        states_.push_back({-1, 0, {}});
        last_ = 0;
    }

    void append(const Sym& c) {
        int cur = static_cast<int>(states_.size());
        states_.push_back({0, states_[last_].len + 1, {}});
        int p = last_;
        while (p >= 0 && !states_[p].next.count(c)) {
            states_[p].next[c] = cur;
            p = states_[p].link;
        }
        if (p < 0) {
            states_[cur].link = 0;
        } else {
            int q = states_[p].next[c];
            if (states_[p].len + 1 == states_[q].len) {
                states_[cur].link = q;
            } else {
                int clone = static_cast<int>(states_.size());
                states_.push_back(states_[q]);
                states_[clone].len = states_[p].len + 1;
                while (p >= 0 && states_[p].next[c] == q) {
                    states_[p].next[c] = clone;
                    p = states_[p].link;
                }
                states_[q].link = clone;
                states_[cur].link = clone;
            }
        }
        last_ = cur;
    }

    // Length of the longest prefix of s[from..] that is a substring of the
    // text appended so far.
    template <typename Seq>
    std::size_t longest_match(const Seq& s, std::size_t from) const {
        int v = 0;
        std::size_t len = 0;
        while (from + len < s.size()) {
            auto it = states_[v].next.find(s[from + len]);
            if (it == states_[v].next.end()) break;
            v = it->second;
            ++len;
        }
        return len;
    }

private:
    struct State {
        int link;
        std::size_t len;
        std::map<Sym, int> next;
    };
    std::vector<State> states_;
    int last_;
};

}  // namespace detail

// LZ77 factorization without self-reference: each non-literal factor is the
// longest prefix of the remaining text occurring entirely in the prefix
// before the factor start.
template <typename Seq>
std::vector<Lz77Factor> lz77(const Seq& s) {
    using Sym = typename Seq::value_type;
    if (s.empty()) throw std::invalid_argument("lz77 of empty sequence");
    std::vector<Lz77Factor> out;
    detail::SuffixAutomaton<Sym> sa;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len = sa.longest_match(s, i);
        if (len == 0) {
            out.push_back({i + 1, 1, true});
            sa.append(s[i]);
            i += 1;
        } else {
            out.push_back({i + 1, len, false});
            for (std::size_t j = 0; j < len; ++j) sa.append(s[i + j]);
            i += len;
        }
    }
    return out;
}

inline std::vector<Lz77Factor> lz77(const Text& t) { return lz77(t.bytes); }

}  // namespace tsti
