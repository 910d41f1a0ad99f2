/*
 * tst.hpp
 *
 * q-truncated suffix tree over a text: the compact trie of all length-q
 * substrings plus all shorter suffixes, with occurrence counts and suffix
 * links. Provides the q-TST transformation of texts and patterns and the
 * splice planning for dynamic edits (which q-grams appear/disappear and
 * which window of T_q is replaced).
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsti/strings.hpp"
#include "tsti/trie.hpp"

namespace tsti {

using LeafHandle = NodeId;

// Multiset of windows T[i..min(i+q-1, N)], as (string, multiplicity) pairs
// in lexicographic order. Oracle-grade helper.
inline std::vector<std::pair<std::string, std::uint64_t>> qgram_set(const Text& t,
                                                                    std::size_t q) {
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    std::map<std::string, std::uint64_t> m;
    const std::string& b = t.bytes;
    for (std::size_t i = 0; i < b.size(); ++i)
        m[b.substr(i, std::min(q, b.size() - i))] += 1;
    return {m.begin(), m.end()};
}

// Replacement of a window of T_q: `start` (1-based), `old_len` handles
// removed, `new_handles` inserted in their place.
struct TqSplice {
    std::size_t start = 1;
    std::size_t old_len = 0;
    std::vector<LeafHandle> new_handles;
};

// Update plan for one text edit: step (i) q-gram insertions have already
// been applied to the trie when the plan is returned; step (iv) removals
// are listed and applied by finish_edit() after the grammar splice.
struct EditPlan {
    std::vector<std::string> inserted_qgrams;
    std::vector<std::string> removed_qgrams;
    TqSplice splice;
};

class QTst {
public:
    QTst() : q_(0) {}
    explicit QTst(std::size_t q) : q_(q) {
        if (q < 1) throw std::invalid_argument("q must be >= 1");
    }

    std::size_t q() const { return q_; }
    CompactTrie& trie() { return trie_; }
    const CompactTrie& trie() const { return trie_; }

    static QTst build(const Text& t, std::size_t q) {
        QTst x(q);
        const std::string& b = t.bytes;
        for (std::size_t i = 0; i < b.size(); ++i)
            x.trie_.insert_string(window(b, i, q));
        return x;
    }

    // Leaf for the window starting at 1-based position i.
    LeafHandle leaf_at(const Text& t, std::size_t i) const {
        auto loc = trie_.locus(window(t.bytes, i - 1, q_));
        if (!loc || loc->above != 0 || !trie_.node(loc->node).is_leaf())
            throw std::logic_error("window locus is not a leaf");
        return loc->node;
    }

    // T_q: one leaf handle per text position, via slink + child rolling.
    std::vector<LeafHandle> transform(const Text& t) {
        const std::string& b = t.bytes;
        std::vector<LeafHandle> out;
        out.reserve(b.size());
        LeafHandle cur = leaf_at(t, 1);
        out.push_back(cur);
        for (std::size_t i = 1; i < b.size(); ++i) {
            TrieLocus loc = trie_.slink(cur);
            if (i + q_ <= b.size()) {
                auto nxt = trie_.child(loc, b[i + q_ - 1]);
                if (!nxt) throw std::logic_error("transform: rolling step failed");
                loc = *nxt;
            }
            if (loc.above != 0 || !trie_.node(loc.node).is_leaf())
                throw std::logic_error("transform: window locus is not a leaf");
            cur = loc.node;
            out.push_back(cur);
        }
        return out;
    }

    // P_q for a q-long pattern; nullopt when some q-gram of P is absent
    // (then Occ(P, T) is empty).
    std::optional<std::vector<LeafHandle>> transform_pattern(const Pattern& p) const {
        const std::string& b = p.bytes;
        if (b.size() <= q_) throw std::invalid_argument("pattern must be q-long");
        std::vector<LeafHandle> out;
        out.reserve(b.size() - q_ + 1);
        auto loc = trie_.locus(std::string_view(b).substr(0, q_));
        if (!loc || loc->above != 0 || !trie_.node(loc->node).is_leaf())
            return std::nullopt;
        out.push_back(loc->node);
        for (std::size_t i = 1; i + q_ <= b.size(); ++i) {
            // slink is non-const (cache); recompute via locus here.
            auto sl = trie_.locus(std::string_view(b).substr(i, q_ - 1));
            if (!sl) return std::nullopt;
            auto nxt = trie_.child(*sl, b[i + q_ - 1]);
            if (!nxt || nxt->above != 0 || !trie_.node(nxt->node).is_leaf())
                return std::nullopt;
            out.push_back(nxt->node);
        }
        return out;
    }

    // Step (i) + (ii) for insert(T, i, K): adds the new q-grams to the trie,
    // computes the replacement window of T_q, and lists the q-grams whose
    // occurrences vanish. t_old must be the pre-edit text.
    EditPlan plan_insert(const Text& t_old, std::size_t i, std::string_view k) {
        const std::size_t n = t_old.size();
        if (i < 1 || i > n) throw std::out_of_range("insert position out of range");
        Text t_new = insert_str(t_old, i, k);
        return make_plan(t_old, t_new, i, /*old_span=*/0, /*new_span=*/k.size());
    }

    // Step (i) + (ii) for delete(T, i, k).
    EditPlan plan_delete(const Text& t_old, std::size_t i, std::size_t k) {
        const std::size_t n = t_old.size();
        if (i < 1 || k == 0 || i + k - 1 >= n)
            throw std::out_of_range("delete range out of bounds");
        Text t_new = delete_str(t_old, i, k);
        return make_plan(t_old, t_new, i, /*old_span=*/k, /*new_span=*/0);
    }

    // Step (iv): remove the q-grams of the vanished windows. Call after the
    // grammar splice has been applied.
    void finish_edit(const EditPlan& plan) {
        for (const std::string& g : plan.removed_qgrams) trie_.remove_string(g);
    }

    bool structurally_equal(const QTst& other) const {
        return q_ == other.q_ && trie_.structurally_equal(other.trie_);
    }

private:
    static std::string window(const std::string& b, std::size_t i0, std::size_t q) {
        return b.substr(i0, std::min(q, b.size() - i0));
    }

    // Windows at positions [p0, i-1] of the old text change or vanish;
    // windows at [p0, i + new_span - 1] of the new text replace them.
    // Positions before p0 and the suffix alignment are unaffected.
    EditPlan make_plan(const Text& t_old, const Text& t_new, std::size_t i,
                       std::size_t old_span, std::size_t new_span) {
        EditPlan plan;
        const std::size_t p0 = i > q_ - 1 ? i - (q_ - 1) : 1;
        for (std::size_t p = p0; p + 1 <= i + old_span; ++p)
            plan.removed_qgrams.push_back(window(t_old.bytes, p - 1, q_));
        for (std::size_t p = p0; p + 1 <= i + new_span; ++p)
            plan.inserted_qgrams.push_back(window(t_new.bytes, p - 1, q_));
        plan.splice.start = p0;
        plan.splice.old_len = plan.removed_qgrams.size();
        for (const std::string& g : plan.inserted_qgrams) {
            LeafHandle h = trie_.insert_string(g);
            plan.splice.new_handles.push_back(h);
        }
        return plan;
    }

    std::size_t q_;
    CompactTrie trie_;
};

}  // namespace tsti
