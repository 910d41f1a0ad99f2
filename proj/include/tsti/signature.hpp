/*
 * signature.hpp
 *
 * Signature-encoding grammar over an integer terminal alphabet. Levels
 * alternate: level 0 assigns a variable per terminal, odd levels group
 * runs (power rules), even levels group locally consistent blocks of 2-4
 * variables (sequence rules). Rules are hash-consed per (level, body) and
 * reference counted; unreachable rules are reclaimed after edits.
 *
 * The represented string is never stored in plain form; extraction walks
 * the derivation DAG via expanded lengths. The materialized per-level
 * sequences drive the dynamic splice, which re-parses outward from the
 * edit until the new parse coincides with the old one at both frontiers.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tsti/lcparse.hpp"
#include "tsti/strings.hpp"

namespace tsti {

using Term = std::uint64_t;
using VarId = std::uint64_t;

enum class BodyKind : std::uint8_t { Terminal = 0, Power = 1, Sequence = 2 };

struct Rule {
    std::uint32_t level = 0;
    BodyKind kind = BodyKind::Terminal;
    Term term = 0;                // Terminal
    VarId base = 0;               // Power
    std::uint64_t exponent = 0;   // Power
    std::vector<VarId> seq;       // Sequence (2..4 variables)
    std::uint64_t refcount = 0;   // uses in other bodies, +1 for the start
    std::uint64_t expanded_len = 0;
};

struct GrammarCapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};
}  // namespace detail

class SignatureGrammar {
public:
    // Test hook: overrides the LC blocking during build (returns block
    // lengths). Never used by splice.
    using LcBlocker =
        std::function<std::vector<std::size_t>(std::size_t level, const std::vector<VarId>&)>;

    SignatureGrammar() = default;

    explicit SignatureGrammar(std::uint64_t capacity_m) : cap_m_(capacity_m) {
        if (capacity_m == 0) throw std::invalid_argument("capacity M must be positive");
        dl_ = delta_l_for(4 * cap_m_);
    }

    static SignatureGrammar build(const std::vector<Term>& terminals, std::uint64_t capacity_m,
                                  const LcBlocker& blocker = nullptr) {
        if (terminals.empty()) throw std::invalid_argument("cannot build over empty input");
        SignatureGrammar g(capacity_m);
        std::vector<VarId> cur;
        cur.reserve(terminals.size());
        for (Term t : terminals) cur.push_back(g.assign_terminal(t));
        g.levels_.push_back(std::move(cur));
        while (g.levels_.back().size() > 1) {
            std::size_t t = g.levels_.size();
            if (t % 2 == 1)
                g.levels_.push_back(g.parse_rle(g.levels_.back(), t));
            else
                g.levels_.push_back(g.parse_lc(g.levels_.back(), t, blocker));
        }
        g.start_ = g.levels_.back()[0];
        g.rules_.at(g.start_).refcount += 1;
        return g;
    }

    VarId start() const { return start_; }
    std::size_t height() const { return levels_.size(); }  // h + 1
    std::size_t text_len() const { return levels_.empty() ? 0 : levels_[0].size(); }
    std::size_t rule_count() const { return rules_.size(); }
    std::uint64_t capacity_m() const { return cap_m_; }
    const Rule& rule(VarId id) const { return rules_.at(id); }
    const std::vector<std::vector<VarId>>& levels() const { return levels_; }

    std::vector<Term> expand() const { return extract(1, text_len()); }

    // T_q[i..i+len-1], 1-based.
    std::vector<Term> extract(std::size_t i, std::size_t len) const {
        if (len == 0) return {};
        if (i < 1 || i - 1 + len > text_len()) throw std::out_of_range("extract out of range");
        std::vector<Term> out;
        out.reserve(len);
        extract_rec(start_, i - 1, i - 1 + len, 0, out);
        return out;
    }

    // All positions of terminal c in the represented string, ascending.
    std::vector<std::size_t> cocc(Term c) const {
        auto it = dict_.find(terminal_key(c));
        if (it == dict_.end()) return {};
        return occurrences(it->second);
    }

    // All start positions (1-based) of segments derived by variable v.
    std::vector<std::size_t> occurrences(VarId v) const {
        std::unordered_set<VarId> anc = ancestors_of(v);
        std::vector<std::size_t> out;
        if (anc.count(start_)) occ_rec(start_, 0, v, anc, out);
        return out;
    }

    // Occ(Pq, expand(S)) via the core of Pq: parse the pattern with the same
    // level pipeline, trim the locality frontier at each level, anchor on a
    // surviving variable, then verify each candidate by extraction.
    std::vector<std::size_t> core_search(const std::vector<Term>& pq) const {
        if (pq.empty()) throw std::invalid_argument("empty pattern");
        if (pq.size() == 1) return cocc(pq[0]);
        if (pq.size() > text_len()) return {};

        struct Elem {
            VarId id;
            std::size_t pstart;  // 0-based offset into pq
            std::size_t plen;    // terminals covered
        };
        std::vector<Elem> cur;
        cur.reserve(pq.size());
        for (std::size_t i = 0; i < pq.size(); ++i) {
            auto it = dict_.find(terminal_key(pq[i]));
            if (it == dict_.end()) return {};
            cur.push_back({it->second, i, 1});
        }
        std::vector<Elem> best = cur;

        for (std::size_t t = 1; cur.size() > 3; ++t) {
            std::vector<Elem> next;
            bool stuck = false;
            if (t % 2 == 1) {
                // Runs; the first and last may merge with symbols outside
                // the pattern, so only interior runs survive.
                std::vector<std::pair<std::size_t, std::size_t>> runs;  // [lo, hi)
                std::size_t i = 0;
                while (i < cur.size()) {
                    std::size_t j = i + 1;
                    while (j < cur.size() && cur[j].id == cur[i].id) ++j;
                    runs.emplace_back(i, j);
                    i = j;
                }
                if (runs.size() < 3) break;
                for (std::size_t r = 1; r + 1 < runs.size() && !stuck; ++r) {
                    auto [lo, hi] = runs[r];
                    auto it = dict_.find(power_key(t, cur[lo].id, hi - lo));
                    if (it == dict_.end()) {
                        // An interior run absent from the live dictionary
                        // normally means no occurrence, but fall back to the
                        // previous level rather than rely on that.
                        stuck = true;
                        break;
                    }
                    std::size_t plen = 0;
                    for (std::size_t x = lo; x < hi; ++x) plen += cur[x].plen;
                    next.push_back({it->second, cur[lo].pstart, plen});
                }
            } else {
                if (cur.size() < dl_ + kDeltaR + 26) break;
                std::vector<VarId> ids(cur.size());
                for (std::size_t i = 0; i < cur.size(); ++i) ids[i] = cur[i].id;
                LandmarkBits lb = tau(ids, 4 * cap_m_);
                const auto& ps = lb.block_starts;  // 1-based
                for (std::size_t b = 0; b < ps.size() && !stuck; ++b) {
                    std::size_t lo = ps[b] - 1;
                    std::size_t hi = b + 1 < ps.size() ? ps[b + 1] - 1 : cur.size();
                    // Keep only blocks whose boundary bits have full
                    // locality windows inside the pattern parse, with slack
                    // for the head/tail repair zones.
                    if (lo < dl_ + 10 || hi + kDeltaR + 10 > cur.size()) continue;
                    std::vector<VarId> body(ids.begin() + lo, ids.begin() + hi);
                    auto it = dict_.find(sequence_key(t, body));
                    if (it == dict_.end()) {
                        stuck = true;
                        break;
                    }
                    std::size_t plen = 0;
                    for (std::size_t x = lo; x < hi; ++x) plen += cur[x].plen;
                    next.push_back({it->second, cur[lo].pstart, plen});
                }
            }
            if (stuck || next.empty()) break;
            cur = std::move(next);
            best = cur;
        }

        // Anchor: the surviving element with the longest expansion.
        const Elem* anchor = &best[0];
        for (const Elem& e : best)
            if (rules_.at(e.id).expanded_len > rules_.at(anchor->id).expanded_len) anchor = &e;

        std::vector<std::size_t> out;
        for (std::size_t pos : occurrences(anchor->id)) {
            if (pos <= anchor->pstart) continue;
            std::size_t cand = pos - anchor->pstart;
            if (cand - 1 + pq.size() > text_len()) continue;
            if (extract(cand, pq.size()) == pq) out.push_back(cand);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Replace terminals [at, at + remove_len) with insert_terms, re-parsing
    // level by level until the parse stabilizes, then reclaim dead rules.
    void splice(std::size_t at, std::size_t remove_len, const std::vector<Term>& insert_terms) {
        const std::size_t n = text_len();
        if (at < 1 || at - 1 + remove_len > n) throw std::out_of_range("splice out of range");
        if (n - remove_len + insert_terms.size() == 0)
            throw std::invalid_argument("splice would empty the string");
        if (remove_len == 0 && insert_terms.empty()) return;

        std::size_t oa = at - 1;
        std::size_t ob = oa + remove_len;
        std::vector<VarId> repl;
        repl.reserve(insert_terms.size());
        for (Term t : insert_terms) repl.push_back(assign_terminal(t));
        bool changed = replace_range(levels_[0], oa, ob, repl);
        std::size_t nl = repl.size();

        if (changed) {
            for (std::size_t t = 1; t < levels_.size(); ++t) {
                if (levels_[t - 1].size() < 2) {
                    // The level below collapsed to a single symbol; all
                    // higher levels vanish.
                    levels_.resize(t);
                    changed = false;
                    break;
                }
                if (!reparse_level(t, oa, ob, nl)) {
                    changed = false;
                    break;
                }
            }
        }
        (void)changed;

        // Grow or shrink the top until exactly one level has length 1.
        while (levels_.back().size() > 1) {
            std::size_t t = levels_.size();
            if (t % 2 == 1)
                levels_.push_back(parse_rle(levels_.back(), t));
            else
                levels_.push_back(parse_lc(levels_.back(), t, nullptr));
        }
        std::size_t first_unit = 0;
        while (levels_[first_unit].size() > 1) ++first_unit;
        levels_.resize(first_unit + 1);

        VarId new_start = levels_.back()[0];
        if (new_start != start_) {
            rules_.at(start_).refcount -= 1;
            rules_.at(new_start).refcount += 1;
            start_ = new_start;
        }
        collect_garbage();
    }

    // ---- auditing helpers (used by tests) ----

    // Recomputed refcounts (body uses + start) must match stored values.
    bool refcounts_exact() const {
        std::unordered_map<VarId, std::uint64_t> rc;
        for (auto& [id, r] : rules_) {
            if (r.kind == BodyKind::Power) rc[r.base] += 1;
            if (r.kind == BodyKind::Sequence)
                for (VarId c : r.seq) rc[c] += 1;
        }
        rc[start_] += 1;
        for (auto& [id, r] : rules_)
            if (r.refcount != rc[id]) return false;
        return true;
    }

    bool no_duplicate_bodies() const {
        std::unordered_set<std::vector<std::uint64_t>, detail::VecHash> seen;
        for (auto& [id, r] : rules_)
            if (!seen.insert(key_of(r)).second) return false;
        return true;
    }

    // ---- serialization ----

    void save(std::string& out) const {
        append_u64(out, cap_m_);
        append_u64(out, next_id_);
        append_u64(out, start_);
        append_u64(out, rules_.size());
        std::vector<VarId> ids;
        ids.reserve(rules_.size());
        for (auto& [id, r] : rules_) ids.push_back(id);
        std::sort(ids.begin(), ids.end());
        for (VarId id : ids) {
            const Rule& r = rules_.at(id);
            append_u64(out, id);
            append_u64(out, r.level);
            out.push_back(static_cast<char>(r.kind));
            switch (r.kind) {
                case BodyKind::Terminal:
                    append_u64(out, r.term);
                    break;
                case BodyKind::Power:
                    append_u64(out, r.base);
                    append_u64(out, r.exponent);
                    break;
                case BodyKind::Sequence:
                    append_u64(out, r.seq.size());
                    for (VarId c : r.seq) append_u64(out, c);
                    break;
            }
        }
    }

    static SignatureGrammar load(const std::string& in, std::size_t& off) {
        SignatureGrammar g;
        g.cap_m_ = read_u64(in, off);
        g.dl_ = delta_l_for(4 * g.cap_m_);
        g.next_id_ = read_u64(in, off);
        g.start_ = read_u64(in, off);
        std::uint64_t count = read_u64(in, off);
        std::vector<VarId> order;
        for (std::uint64_t i = 0; i < count; ++i) {
            VarId id = read_u64(in, off);
            Rule r;
            r.level = static_cast<std::uint32_t>(read_u64(in, off));
            if (off >= in.size()) throw std::runtime_error("truncated grammar data");
            r.kind = static_cast<BodyKind>(in[off++]);
            switch (r.kind) {
                case BodyKind::Terminal:
                    r.term = read_u64(in, off);
                    break;
                case BodyKind::Power:
                    r.base = read_u64(in, off);
                    r.exponent = read_u64(in, off);
                    break;
                case BodyKind::Sequence: {
                    std::uint64_t len = read_u64(in, off);
                    for (std::uint64_t j = 0; j < len; ++j) r.seq.push_back(read_u64(in, off));
                    break;
                }
                default:
                    throw std::runtime_error("bad rule kind");
            }
            g.rules_.emplace(id, std::move(r));
            order.push_back(id);
        }
        // Rebuild derived structure: expanded lengths, dictionary, users,
        // refcounts, and the materialized level sequences.
        for (VarId id : order) g.finish_load_rule(id);
        g.rules_.at(g.start_).refcount += 1;
        g.rebuild_levels();
        return g;
    }

private:
    // ---- rule lifecycle ----

    std::vector<std::uint64_t> terminal_key(Term t) const { return {0, 0, t}; }
    std::vector<std::uint64_t> power_key(std::size_t level, VarId base, std::uint64_t k) const {
        return {level, 1, base, k};
    }
    std::vector<std::uint64_t> sequence_key(std::size_t level,
                                            const std::vector<VarId>& body) const {
        std::vector<std::uint64_t> key{level, 2};
        key.insert(key.end(), body.begin(), body.end());
        return key;
    }
    std::vector<std::uint64_t> key_of(const Rule& r) const {
        switch (r.kind) {
            case BodyKind::Terminal:
                return terminal_key(r.term);
            case BodyKind::Power:
                return power_key(r.level, r.base, r.exponent);
            default:
                return sequence_key(r.level, r.seq);
        }
    }

    VarId fresh_id() {
        if (next_id_ > 4 * cap_m_)
            throw GrammarCapacityError(
                "variable budget 4M exhausted; rebuild the index with a larger M");
        return next_id_++;
    }

    VarId assign_terminal(Term t) {
        auto key = terminal_key(t);
        auto it = dict_.find(key);
        if (it != dict_.end()) return it->second;
        VarId id = fresh_id();
        Rule r;
        r.level = 0;
        r.kind = BodyKind::Terminal;
        r.term = t;
        r.expanded_len = 1;
        rules_.emplace(id, std::move(r));
        dict_.emplace(std::move(key), id);
        return id;
    }

    VarId assign_power(std::size_t level, VarId base, std::uint64_t k) {
        auto key = power_key(level, base, k);
        auto it = dict_.find(key);
        if (it != dict_.end()) return it->second;
        VarId id = fresh_id();
        Rule r;
        r.level = static_cast<std::uint32_t>(level);
        r.kind = BodyKind::Power;
        r.base = base;
        r.exponent = k;
        r.expanded_len = k * rules_.at(base).expanded_len;
        rules_.emplace(id, std::move(r));
        dict_.emplace(std::move(key), id);
        rules_.at(base).refcount += 1;
        users_[base][id] += 1;
        return id;
    }

    VarId assign_sequence(std::size_t level, std::vector<VarId> body) {
        auto key = sequence_key(level, body);
        auto it = dict_.find(key);
        if (it != dict_.end()) return it->second;
        VarId id = fresh_id();
        Rule r;
        r.level = static_cast<std::uint32_t>(level);
        r.kind = BodyKind::Sequence;
        r.expanded_len = 0;
        for (VarId c : body) r.expanded_len += rules_.at(c).expanded_len;
        r.seq = std::move(body);
        for (VarId c : r.seq) {
            rules_.at(c).refcount += 1;
            users_[c][id] += 1;
        }
        rules_.emplace(id, std::move(r));
        dict_.emplace(std::move(key), id);
        return id;
    }

    void destroy_rule(VarId id) {
        const Rule& r = rules_.at(id);
        std::vector<VarId> children;
        if (r.kind == BodyKind::Power) children.push_back(r.base);
        if (r.kind == BodyKind::Sequence) children = r.seq;
        dict_.erase(key_of(r));
        users_.erase(id);
        rules_.erase(id);
        for (VarId c : children) {
            auto cit = rules_.find(c);
            if (cit != rules_.end()) cit->second.refcount -= 1;
            auto uit = users_.find(c);
            if (uit != users_.end()) {
                auto pit = uit->second.find(id);
                if (pit != uit->second.end() && --pit->second == 0) uit->second.erase(pit);
            }
        }
    }

    void collect_garbage() {
        std::unordered_set<VarId> live;
        std::vector<VarId> stack{start_};
        while (!stack.empty()) {
            VarId v = stack.back();
            stack.pop_back();
            if (!live.insert(v).second) continue;
            const Rule& r = rules_.at(v);
            if (r.kind == BodyKind::Power) stack.push_back(r.base);
            if (r.kind == BodyKind::Sequence)
                for (VarId c : r.seq) stack.push_back(c);
        }
        if (live.size() == rules_.size()) return;
        std::vector<VarId> dead;
        for (auto& [id, r] : rules_)
            if (!live.count(id)) dead.push_back(id);
        for (VarId id : dead) destroy_rule(id);
    }

    // ---- parsing ----

    std::vector<VarId> parse_rle(const std::vector<VarId>& in, std::size_t level) {
        std::vector<VarId> out;
        std::size_t i = 0;
        while (i < in.size()) {
            std::size_t j = i + 1;
            while (j < in.size() && in[j] == in[i]) ++j;
            out.push_back(assign_power(level, in[i], j - i));
            i = j;
        }
        return out;
    }

    std::vector<VarId> parse_lc(const std::vector<VarId>& in, std::size_t level,
                                const LcBlocker& blocker) {
        std::vector<VarId> out;
        std::size_t pos = 0;
        if (blocker) {
            for (std::size_t len : blocker(level, in)) {
                if (len < 2 || len > 4 || pos + len > in.size())
                    throw std::invalid_argument("blocker returned invalid block lengths");
                out.push_back(
                    assign_sequence(level, {in.begin() + pos, in.begin() + pos + len}));
                pos += len;
            }
            if (pos != in.size()) throw std::invalid_argument("blocker did not tile the input");
            return out;
        }
        LandmarkBits lb = tau(in, 4 * cap_m_);
        const auto& ps = lb.block_starts;
        for (std::size_t b = 0; b < ps.size(); ++b) {
            std::size_t lo = ps[b] - 1;
            std::size_t hi = b + 1 < ps.size() ? ps[b + 1] - 1 : in.size();
            out.push_back(assign_sequence(level, {in.begin() + lo, in.begin() + hi}));
        }
        return out;
    }

    // ---- splice internals ----

    static bool replace_range(std::vector<VarId>& v, std::size_t lo, std::size_t hi,
                              const std::vector<VarId>& repl) {
        if (hi - lo == repl.size() && std::equal(repl.begin(), repl.end(), v.begin() + lo))
            return false;
        std::vector<VarId> out;
        out.reserve(v.size() - (hi - lo) + repl.size());
        out.insert(out.end(), v.begin(), v.begin() + lo);
        out.insert(out.end(), repl.begin(), repl.end());
        out.insert(out.end(), v.begin() + hi, v.end());
        v.swap(out);
        return true;
    }

    std::size_t body_width(VarId id) const {
        const Rule& r = rules_.at(id);
        return r.kind == BodyKind::Power ? r.exponent : r.seq.size();
    }

    // Re-parses level t after levels_[t-1] had its old range [oa, ob)
    // replaced by nl entries. Updates (oa, ob, nl) to describe the change
    // at level t; returns false when the parse stabilized.
    bool reparse_level(std::size_t t, std::size_t& oa, std::size_t& ob, std::size_t& nl) {
        const bool rle_level = (t % 2 == 1);
        const std::vector<VarId>& below = levels_[t - 1];  // new content
        std::vector<VarId>& here = levels_[t];             // old content

        std::vector<std::size_t> starts(here.size() + 1, 0);
        for (std::size_t i = 0; i < here.size(); ++i)
            starts[i + 1] = starts[i] + body_width(here[i]);
        const std::size_t old_below_len = starts.back();
        const std::size_t new_below_len = below.size();
        const std::ptrdiff_t shift =
            static_cast<std::ptrdiff_t>(nl) - static_cast<std::ptrdiff_t>(ob - oa);

        // Sync frontiers: positions whose parse decision provably matches
        // between the old and new sequences.
        const std::size_t lguard = rle_level ? 1 : kDeltaR + 10;
        const std::size_t rguard = rle_level ? 1 : dl_ + 10;
        std::size_t left_lim = oa > lguard ? oa - lguard : 0;
        std::size_t right_lim = ob + rguard;
        if (!rle_level) right_lim = std::max<std::size_t>(right_lim, 16);

        std::size_t ta = 0;
        while (ta + 1 < starts.size() - 0 && ta + 1 < here.size() + 1 &&
               starts[ta + 1] <= left_lim)
            ++ta;
        std::size_t tb = ta;
        while (tb < here.size() && starts[tb] < right_lim) ++tb;

        const std::size_t L = starts[ta];
        const bool to_end = (tb == here.size());
        const std::size_t r_new =
            to_end ? new_below_len
                   : static_cast<std::size_t>(static_cast<std::ptrdiff_t>(starts[tb]) + shift);

        std::vector<VarId> fresh;
        if (rle_level) {
            std::size_t i = L;
            while (i < r_new) {
                std::size_t j = i + 1;
                while (j < r_new && below[j] == below[i]) ++j;
                if (j == r_new && !to_end && j < new_below_len && below[j - 1] == below[j])
                    throw std::logic_error("splice: run frontier did not synchronize");
                fresh.push_back(assign_power(t, below[i], j - i));
                i = j;
            }
        } else if (L < r_new) {
            // Window large enough that interior bits match the global parse.
            const std::size_t pad = dl_ + 32;
            std::size_t win_lo = L > pad ? L - pad : 0;
            std::size_t win_hi = std::min(new_below_len, r_new + kDeltaR + 32);
            std::vector<VarId> win(below.begin() + win_lo, below.begin() + win_hi);
            LandmarkBits lb = tau(win, 4 * cap_m_);
            std::vector<std::size_t> bstarts;  // absolute, within [L, r_new)
            for (std::size_t p : lb.block_starts) {
                std::size_t abs = win_lo + p - 1;
                if (abs >= L && abs < r_new) bstarts.push_back(abs);
            }
            if (bstarts.empty() || bstarts.front() != L)
                throw std::logic_error("splice: block frontier did not synchronize (left)");
            if (!to_end && r_new < new_below_len) {
                bool boundary = r_new - win_lo < lb.bits.size() && lb.bits[r_new - win_lo];
                if (!boundary)
                    throw std::logic_error("splice: block frontier did not synchronize (right)");
            }
            for (std::size_t b = 0; b < bstarts.size(); ++b) {
                std::size_t lo = bstarts[b];
                std::size_t hi = b + 1 < bstarts.size() ? bstarts[b + 1] : r_new;
                if (hi - lo < 2 || hi - lo > 4)
                    throw std::logic_error("splice: block length out of range");
                fresh.push_back(
                    assign_sequence(t, {below.begin() + lo, below.begin() + hi}));
            }
        }

        bool changed = replace_range(here, ta, tb, fresh);
        oa = ta;
        ob = tb;
        nl = fresh.size();
        return changed;
    }

    // ---- queries ----

    void extract_rec(VarId v, std::size_t lo, std::size_t hi, std::size_t base,
                     std::vector<Term>& out) const {
        const Rule& r = rules_.at(v);
        switch (r.kind) {
            case BodyKind::Terminal:
                out.push_back(r.term);
                return;
            case BodyKind::Power: {
                std::uint64_t clen = rules_.at(r.base).expanded_len;
                std::size_t first = lo > base ? (lo - base) / clen : 0;
                for (std::uint64_t j = first; j < r.exponent; ++j) {
                    std::size_t cbase = base + j * clen;
                    if (cbase >= hi) break;
                    if (cbase + clen <= lo) continue;
                    extract_rec(r.base, lo, hi, cbase, out);
                }
                return;
            }
            case BodyKind::Sequence: {
                std::size_t off = base;
                for (VarId c : r.seq) {
                    std::uint64_t clen = rules_.at(c).expanded_len;
                    if (off < hi && off + clen > lo) extract_rec(c, lo, hi, off, out);
                    off += clen;
                }
                return;
            }
        }
    }

    std::unordered_set<VarId> ancestors_of(VarId v) const {
        std::unordered_set<VarId> anc;
        std::vector<VarId> stack{v};
        anc.insert(v);
        while (!stack.empty()) {
            VarId x = stack.back();
            stack.pop_back();
            auto it = users_.find(x);
            if (it == users_.end()) continue;
            for (auto& [parent, cnt] : it->second)
                if (anc.insert(parent).second) stack.push_back(parent);
        }
        return anc;
    }

    void occ_rec(VarId v, std::size_t base, VarId target,
                 const std::unordered_set<VarId>& anc, std::vector<std::size_t>& out) const {
        if (v == target) {
            out.push_back(base + 1);
            return;
        }
        const Rule& r = rules_.at(v);
        if (r.kind == BodyKind::Power) {
            if (!anc.count(r.base)) return;
            std::uint64_t clen = rules_.at(r.base).expanded_len;
            for (std::uint64_t j = 0; j < r.exponent; ++j)
                occ_rec(r.base, base + j * clen, target, anc, out);
        } else if (r.kind == BodyKind::Sequence) {
            std::size_t off = base;
            for (VarId c : r.seq) {
                if (anc.count(c)) occ_rec(c, off, target, anc, out);
                off += rules_.at(c).expanded_len;
            }
        }
    }

    // ---- (de)serialization helpers ----

    static void append_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    static std::uint64_t read_u64(const std::string& in, std::size_t& off) {
        if (off + 8 > in.size()) throw std::runtime_error("truncated grammar data");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
        off += 8;
        return v;
    }

    void finish_load_rule(VarId id) {
        Rule& r = rules_.at(id);
        switch (r.kind) {
            case BodyKind::Terminal:
                r.expanded_len = 1;
                break;
            case BodyKind::Power:
                r.expanded_len = r.exponent * rules_.at(r.base).expanded_len;
                rules_.at(r.base).refcount += 1;
                users_[r.base][id] += 1;
                break;
            case BodyKind::Sequence:
                r.expanded_len = 0;
                for (VarId c : r.seq) {
                    r.expanded_len += rules_.at(c).expanded_len;
                    rules_.at(c).refcount += 1;
                    users_[c][id] += 1;
                }
                break;
        }
        dict_.emplace(key_of(r), id);
    }

    void rebuild_levels() {
        std::size_t h = rules_.at(start_).level;
        levels_.assign(h + 1, {});
        levels_[h] = {start_};
        for (std::size_t t = h; t >= 1; --t) {
            std::vector<VarId>& lower = levels_[t - 1];
            for (VarId v : levels_[t]) {
                const Rule& r = rules_.at(v);
                if (r.kind == BodyKind::Power)
                    lower.insert(lower.end(), r.exponent, r.base);
                else
                    lower.insert(lower.end(), r.seq.begin(), r.seq.end());
            }
        }
    }

    std::unordered_map<VarId, Rule> rules_;
    std::unordered_map<std::vector<std::uint64_t>, VarId, detail::VecHash> dict_;
    std::unordered_map<VarId, std::map<VarId, std::uint32_t>> users_;
    std::vector<std::vector<VarId>> levels_;
    VarId start_ = 0;
    VarId next_id_ = 1;
    std::uint64_t cap_m_ = 0;
    std::size_t dl_ = 0;
};

}  // namespace tsti
