/*
 * index.hpp
 *
 * The compressed dynamic self-index: a q-truncated suffix tree over the
 * text plus a signature-encoding grammar over the transformed sequence
 * T_q. Short patterns (m <= q) are answered on the truncated tree alone;
 * long patterns are transformed and searched through the grammar core.
 * Edits splice both structures; if a splice fails midway the index is
 * rebuilt from the edited text, so the visible state is always consistent.
 */

#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsti/signature.hpp"
#include "tsti/strings.hpp"
#include "tsti/trie.hpp"
#include "tsti/tst.hpp"

namespace tsti {

struct IndexStats {
    std::size_t text_len = 0;       // N, including the sentinel
    std::size_t q = 0;
    std::uint64_t capacity_m = 0;
    std::size_t alphabet = 0;       // distinct symbols incl. sentinel
    std::size_t qgram_count = 0;    // |Sigma_T^q|
    std::size_t trie_nodes = 0;
    std::size_t grammar_rules = 0;  // w'
    std::size_t grammar_height = 0;
    std::size_t serialized_bytes = 0;
    std::uint64_t rebuilt_edits = 0;
};

class TstIndex {
public:
    TstIndex() = default;

    static TstIndex build(const Text& t, std::size_t q, std::uint64_t capacity_m) {
        if (q < 2) throw std::invalid_argument("q must be >= 2");
        TstIndex x;
        x.q_ = q;
        x.cap_m_ = capacity_m;
        x.tst_ = QTst::build(t, q);
        std::vector<Term> tq;
        for (LeafHandle h : x.tst_.transform(t)) tq.push_back(h);
        x.gram_ = SignatureGrammar::build(tq, capacity_m);
        return x;
    }

    std::size_t q() const { return q_; }
    std::uint64_t capacity_m() const { return cap_m_; }
    std::size_t text_len() const { return gram_.text_len(); }
    const QTst& tst() const { return tst_; }
    const SignatureGrammar& grammar() const { return gram_; }

    // Benchmarking hook: route patterns of length exactly q through the
    // grammar core instead of the O(q) truncated-tree lookup.
    void set_force_long_path(bool on) { force_long_ = on; }

    // Full text reconstruction (T[i] is the first symbol of the i-th
    // window, so the expansion of T_q determines T).
    Text text() const {
        std::vector<Term> tq = gram_.expand();
        std::string b;
        b.reserve(tq.size());
        for (Term h : tq) b.push_back(tst_.trie().path(static_cast<NodeId>(h))[0]);
        return Text(std::move(b));
    }

    std::string extract(std::size_t i, std::size_t len) const {
        if (len == 0) return {};
        if (i < 1 || i - 1 + len > text_len()) throw std::out_of_range("extract out of range");
        std::vector<Term> tq = gram_.extract(i, len);
        std::string out;
        out.reserve(len);
        for (Term h : tq) out.push_back(tst_.trie().path(static_cast<NodeId>(h))[0]);
        return out;
    }

    std::uint64_t count(const Pattern& p) const {
        if (p.size() <= q_ && !(force_long_ && p.size() == q_))
            return tst_.trie().occ_count_at(p.bytes);
        return locate(p).size();
    }

    std::vector<std::size_t> locate(const Pattern& p) const {
        const std::size_t m = p.size();
        if (m > text_len()) return {};
        if (m <= q_) {
            if (force_long_ && m == q_) {
                // P itself is a stored window; its handle is the one-element
                // transformed pattern, resolved through the grammar.
                auto loc = tst_.trie().locus(p.bytes);
                if (!loc || loc->above != 0 || !tst_.trie().node(loc->node).is_leaf())
                    return {};
                return gram_.core_search({static_cast<Term>(loc->node)});
            }
            std::vector<std::size_t> out;
            for (NodeId leaf : tst_.trie().leave(p.bytes)) {
                auto occ = gram_.cocc(static_cast<Term>(leaf));
                out.insert(out.end(), occ.begin(), occ.end());
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        auto pq = tst_.transform_pattern(p);
        if (!pq) return {};
        std::vector<Term> terms(pq->begin(), pq->end());
        return gram_.core_search(terms);
    }

    // insert(T, i, K): K slides in before position i, 1 <= i <= N.
    void insert(std::size_t i, std::string_view k) {
        if (k.empty()) return;
        Text t_old = text();
        Text t_new = insert_str(t_old, i, k);
        apply_edit(t_new, [&] {
            EditPlan plan = tst_.plan_insert(t_old, i, k);
            std::vector<Term> terms(plan.splice.new_handles.begin(),
                                    plan.splice.new_handles.end());
            gram_.splice(plan.splice.start, plan.splice.old_len, terms);
            tst_.finish_edit(plan);
        });
    }

    // delete(T, i, k): removes exactly k symbols starting at position i.
    void erase(std::size_t i, std::size_t k) {
        if (k == 0) return;
        Text t_old = text();
        Text t_new = delete_str(t_old, i, k);
        apply_edit(t_new, [&] {
            EditPlan plan = tst_.plan_delete(t_old, i, k);
            std::vector<Term> terms(plan.splice.new_handles.begin(),
                                    plan.splice.new_handles.end());
            gram_.splice(plan.splice.start, plan.splice.old_len, terms);
            tst_.finish_edit(plan);
        });
    }

    IndexStats stats() const {
        IndexStats s;
        s.text_len = text_len();
        s.q = q_;
        s.capacity_m = cap_m_;
        Text t = text();
        bool seen[256] = {};
        for (unsigned char c : t.bytes) seen[c] = true;
        for (int c = 0; c < 256; ++c) s.alphabet += seen[c];
        s.qgram_count = tst_.trie().leaf_count();
        s.trie_nodes = tst_.trie().node_count();
        s.grammar_rules = gram_.rule_count();
        s.grammar_height = gram_.height();
        s.serialized_bytes = serialize().size();
        s.rebuilt_edits = rebuilt_edits_;
        return s;
    }

    // ---- serialization ----

    std::string serialize() const {
        std::string payload;
        append_u64(payload, q_);
        tst_.trie().save(payload);
        gram_.save(payload);
        std::string out = "TSTIDX1\n";
        append_u64(out, fnv1a(payload));
        append_u64(out, payload.size());
        out += payload;
        return out;
    }

    static TstIndex deserialize(const std::string& in) {
        if (in.size() < 24 || in.compare(0, 8, "TSTIDX1\n") != 0)
            throw std::runtime_error("not an index file");
        std::size_t off = 8;
        std::uint64_t sum = read_u64(in, off);
        std::uint64_t len = read_u64(in, off);
        if (off + len != in.size()) throw std::runtime_error("index file size mismatch");
        std::string payload = in.substr(off);
        if (fnv1a(payload) != sum) throw std::runtime_error("index file checksum mismatch");
        TstIndex x;
        std::size_t p = 0;
        x.q_ = read_u64(payload, p);
        x.tst_ = QTst(x.q_);
        x.tst_.trie() = CompactTrie::load(payload, p);
        x.gram_ = SignatureGrammar::load(payload, p);
        x.cap_m_ = x.gram_.capacity_m();
        if (p != payload.size()) throw std::runtime_error("trailing bytes in index file");
        return x;
    }

    void save_file(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        std::string blob = serialize();
        f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        if (!f) throw std::runtime_error("write failed: " + path);
    }

    static TstIndex load_file(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path);
        std::string blob((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
        return deserialize(blob);
    }

private:
    template <typename Fn>
    void apply_edit(const Text& t_new, Fn&& fn) {
        try {
            fn();
        } catch (...) {
            // Leave a consistent index over the edited text.
            std::uint64_t rebuilt = rebuilt_edits_ + 1;
            bool force = force_long_;
            *this = build(t_new, q_, cap_m_);
            rebuilt_edits_ = rebuilt;
            force_long_ = force;
        }
    }

    static std::uint64_t fnv1a(const std::string& s) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
    static void append_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    static std::uint64_t read_u64(const std::string& in, std::size_t& off) {
        if (off + 8 > in.size()) throw std::runtime_error("truncated index data");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
        off += 8;
        return v;
    }

    std::size_t q_ = 0;
    std::uint64_t cap_m_ = 0;
    QTst tst_;
    SignatureGrammar gram_;
    bool force_long_ = false;
    std::uint64_t rebuilt_edits_ = 0;
};

}  // namespace tsti
