/*
 * lcparse.hpp
 *
 * Locally consistent parsing for colored sequences (no two equal adjacent
 * symbols). tau() marks block starts so that
 *   (1) every gap between consecutive starts lies in [2,4], first start = 1;
 *   (2) the bit at an interior position is a pure function of the symbols
 *       in the window [i - delta_l, i + delta_r].
 *
 * The landmark rule is deterministic coin tossing: iterated alphabet
 * reduction down to three colors, then local maxima of the reduced labels.
 * Head/tail repair keeps the [2,4] gap bound unconditional and only touches
 * positions near the sequence ends.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tsti {

// log* with base-2 logs, clamped to >= 1.
inline std::size_t log_star(long double n) {
    std::size_t i = 0;
    while (n > 1.0L) {
        long double m = 0;
        while (n > 1.0L) {
            n /= 2.0L;
            m += 1;
        }
        n = m;
        ++i;
        if (i > 64) break;
    }
    return i == 0 ? 1 : i;
}

inline std::size_t delta_l_for(std::uint64_t color_bound) {
    return log_star(static_cast<long double>(color_bound)) + 6;
}
inline constexpr std::size_t kDeltaR = 4;

struct LandmarkBits {
    std::vector<bool> bits;                 // bits[i] for position i+1
    std::vector<std::size_t> block_starts;  // 1-based, first is 1
};

namespace detail {

// One round of alphabet reduction: label[i] = 2*j + bit_j(cur[i]), where j
// is the lowest bit position where cur[i] and cur[i-1] differ. Position 0
// keeps a label derived from its own value only.
inline void reduce_round(std::vector<std::uint64_t>& cur) {
    std::vector<std::uint64_t> next(cur.size());
    next[0] = cur[0] & 1u;  // depends on cur[0] alone
    for (std::size_t i = 1; i < cur.size(); ++i) {
        std::uint64_t diff = cur[i] ^ cur[i - 1];
        unsigned j = static_cast<unsigned>(__builtin_ctzll(diff));
        next[i] = 2ull * j + ((cur[i] >> j) & 1u);
    }
    // Restore the adjacent-distinct property at the head: if the first two
    // labels collide, flip the low bit choice for position 0.
    if (cur.size() > 1 && next[0] == next[1]) next[0] ^= 1u;
    cur.swap(next);
}

}  // namespace detail

// Landmark bit sequence for a colored sequence S with color bound c.
// Throws if |S| < 2 or adjacent symbols are equal.
template <typename Seq>
LandmarkBits tau(const Seq& s, std::uint64_t color_bound) {
    const std::size_t n = s.size();
    if (n < 2) throw std::invalid_argument("tau needs length >= 2");

    std::vector<std::uint64_t> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
        lab[i] = static_cast<std::uint64_t>(s[i]);
        if (i > 0 && lab[i] == lab[i - 1])
            throw std::invalid_argument("input is not a colored sequence");
    }

    // Iterated reduction down to labels < 6. Each round shrinks the
    // alphabet to at most 2*ceil(log2(alpha)); a handful of rounds suffice
    // for any 64-bit color bound.
    std::uint64_t alpha = color_bound < 2 ? 2 : color_bound;
    while (alpha > 6) {
        detail::reduce_round(lab);
        std::uint64_t bits = 0;
        while ((1ull << bits) < alpha) ++bits;
        alpha = 2 * bits;
    }

    // Eliminate labels 3, 4, 5: replace each, simultaneously per value, by
    // the smallest color in {0,1,2} unequal to both neighbors. Positions
    // with the eliminated value are never adjacent, so the passes preserve
    // adjacent distinctness.
    for (std::uint64_t v = 3; v <= 5; ++v) {
        std::vector<std::uint64_t> next = lab;
        for (std::size_t i = 0; i < n; ++i) {
            if (lab[i] != v) continue;
            std::uint64_t l = i > 0 ? lab[i - 1] : ~0ull;
            std::uint64_t r = i + 1 < n ? lab[i + 1] : ~0ull;
            std::uint64_t pick = 0;
            while (pick == l || pick == r) ++pick;
            next[i] = pick;
        }
        lab.swap(next);
    }

    // Landmarks: local maxima of the 3-coloring, with virtual -1 padding at
    // both ends. Consecutive maxima are 2..4 apart.
    std::vector<std::size_t> lm;  // 0-based positions
    for (std::size_t i = 0; i < n; ++i) {
        bool up = (i == 0) || lab[i] > lab[i - 1];
        bool down = (i + 1 == n) || lab[i] > lab[i + 1];
        if (up && down) lm.push_back(i);
    }

    // Normalize into block starts: force start at 0, drop a landmark at
    // position 1, keep gaps in [2,4] by splitting long gaps 3 symbols at a
    // time, and repair a length-1 tail block.
    std::vector<std::size_t> starts{0};
    for (std::size_t c : lm) {
        if (c <= 1) continue;  // covered by the forced start
        std::size_t last = starts.back();
        if (c - last < 2) continue;  // merge a too-close landmark
        while (c - starts.back() > 4) starts.push_back(starts.back() + 3);
        starts.push_back(c);
    }
    while (n - starts.back() > 4) starts.push_back(starts.back() + 3);
    if (n - starts.back() == 1 && starts.size() > 1) {
        starts.pop_back();
        if (n - starts.back() > 4) starts.push_back(starts.back() + 3);
    }

    LandmarkBits out;
    out.bits.assign(n, false);
    out.block_starts.reserve(starts.size());
    for (std::size_t p : starts) {
        out.bits[p] = true;
        out.block_starts.push_back(p + 1);
    }
    return out;
}

// Slices S at the given 1-based block starts (first must be 1).
template <typename Seq>
std::vector<std::vector<typename Seq::value_type>> blocks_from_starts(
    const Seq& s, const std::vector<std::size_t>& starts) {
    if (starts.empty() || starts.front() != 1)
        throw std::invalid_argument("block starts must begin at 1");
    std::vector<std::vector<typename Seq::value_type>> out;
    for (std::size_t b = 0; b < starts.size(); ++b) {
        std::size_t lo = starts[b] - 1;
        std::size_t hi = b + 1 < starts.size() ? starts[b + 1] - 1 : s.size();
        out.emplace_back(s.begin() + lo, s.begin() + hi);
    }
    return out;
}

// Block decomposition LC_c(S): tiles S, every block length in [2,4].
template <typename Seq>
std::vector<std::vector<typename Seq::value_type>> lc_blocks(const Seq& s,
                                                             std::uint64_t color_bound) {
    return blocks_from_starts(s, tau(s, color_bound).block_starts);
}

}  // namespace tsti
