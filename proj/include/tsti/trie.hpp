/*
 * trie.hpp
 *
 * Dynamic compact trie over a prefix-free string multiset, with stable node
 * handles, per-explicit-node occurrence counts, and suffix links for
 * leaves. Edge labels are stored explicitly (no reference string), which is
 * what the dynamic setting needs.
 *
 * Node handles are monotonically increasing and never reused within one
 * trie lifetime.
 */

#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tsti {

using NodeId = std::uint64_t;
inline constexpr NodeId kNoNode = 0;

// A point in the trie: `above` symbols above explicit node `node` on its
// incoming edge. above == 0 means the explicit node itself. Valid as long
// as `node` survives; edge splits above the point do not invalidate it.
struct TrieLocus {
    NodeId node = kNoNode;
    std::size_t above = 0;
    bool operator==(const TrieLocus&) const = default;
};

struct TrieNode {
    NodeId parent = kNoNode;
    std::string edge;  // label of the incoming edge ("" for the root)
    std::map<unsigned char, NodeId> children;
    std::uint64_t occ_count = 0;  // subtree sum of leaf multiplicities
    std::uint64_t leaf_mult = 0;  // > 0 iff this node is a leaf
    // Cached suffix link (leaves only); valid while slink_version matches
    // the trie's structural version.
    TrieLocus slink;
    std::uint64_t slink_version = 0;

    bool is_leaf() const { return leaf_mult > 0; }
};

class CompactTrie {
public:
    CompactTrie() {
        root_ = next_id_++;
        nodes_.emplace(root_, TrieNode{});
    }

    NodeId root() const { return root_; }
    const TrieNode& node(NodeId id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw std::out_of_range("stale node handle");
        return it->second;
    }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const { return leaf_total_; }
    std::uint64_t structural_version() const { return version_; }

    std::string path(NodeId id) const {
        std::vector<const std::string*> parts;
        NodeId u = id;
        while (u != root_) {
            const TrieNode& nd = node(u);
            parts.push_back(&nd.edge);
            u = nd.parent;
        }
        std::string out;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += **it;
        return out;
    }

    std::string path(const TrieLocus& loc) const {
        std::string p = path(loc.node);
        p.resize(p.size() - loc.above);
        return p;
    }

    // Node spelling exactly p, possibly inside an edge; nullopt if p is not
    // a prefix of any stored string.
    std::optional<TrieLocus> locus(std::string_view p) const {
        NodeId u = root_;
        std::size_t i = 0;
        while (i < p.size()) {
            const TrieNode& nd = node(u);
            auto it = nd.children.find(static_cast<unsigned char>(p[i]));
            if (it == nd.children.end()) return std::nullopt;
            const TrieNode& ch = node(it->second);
            std::size_t j = 0;
            while (j < ch.edge.size() && i < p.size()) {
                if (ch.edge[j] != p[i]) return std::nullopt;
                ++j;
                ++i;
            }
            if (i == p.size() && j < ch.edge.size())
                return TrieLocus{it->second, ch.edge.size() - j};
            u = it->second;
        }
        return TrieLocus{u, 0};
    }

    // One symbol below loc on branch c.
    std::optional<TrieLocus> child(const TrieLocus& loc, char c) const {
        if (loc.above > 0) {
            const TrieNode& nd = node(loc.node);
            char on_edge = nd.edge[nd.edge.size() - loc.above];
            if (on_edge != c) return std::nullopt;
            return TrieLocus{loc.node, loc.above - 1};
        }
        const TrieNode& nd = node(loc.node);
        auto it = nd.children.find(static_cast<unsigned char>(c));
        if (it == nd.children.end()) return std::nullopt;
        const TrieNode& ch = node(it->second);
        return TrieLocus{it->second, ch.edge.size() - 1};
    }

    // Nearest explicit descendant: the lower endpoint of the edge.
    NodeId expl(const TrieLocus& loc) const { return loc.node; }

    // Suffix link of a leaf: the locus of path(leaf)[2..]. Cached per leaf,
    // recomputed after structural changes.
    TrieLocus slink(NodeId leaf) {
        TrieNode& nd = nodes_.at(leaf);
        if (!nd.is_leaf()) throw std::invalid_argument("slink: not a leaf");
        if (nd.slink_version == version_ && nd.slink.node != kNoNode) return nd.slink;
        std::string p = path(leaf);
        auto loc = locus(std::string_view(p).substr(1));
        if (!loc) throw std::logic_error("leaf suffix link target missing");
        nd.slink = *loc;
        nd.slink_version = version_;
        return *loc;
    }

    // All leaves whose stored string has p as a prefix, in symbol order.
    std::vector<NodeId> leave(std::string_view p) const {
        std::vector<NodeId> out;
        auto loc = locus(p);
        if (!loc) return out;
        collect_leaves(loc->node, out);
        return out;
    }

    // Occurrence count of the subtree at the locus of p (0 if absent).
    std::uint64_t occ_count_at(std::string_view p) const {
        auto loc = locus(p);
        if (!loc) return 0;
        return node(loc->node).occ_count;
    }

    // Inserts k with the given multiplicity; returns the (stable) leaf id.
    NodeId insert_string(std::string_view k, std::uint64_t multiplicity = 1) {
        if (k.empty()) throw std::invalid_argument("cannot insert empty string");
        if (multiplicity == 0) throw std::invalid_argument("zero multiplicity");
        NodeId u = root_;
        std::size_t i = 0;
        NodeId leaf = kNoNode;
        while (true) {
            TrieNode& nd = nodes_.at(u);
            if (i == k.size()) {
                // Existing node spells k exactly; prefix-free usage means it
                // must already be a leaf.
                if (!nd.is_leaf())
                    throw std::logic_error("insert would violate prefix-freeness");
                nd.leaf_mult += multiplicity;
                leaf = u;
                break;
            }
            auto it = nd.children.find(static_cast<unsigned char>(k[i]));
            if (it == nd.children.end()) {
                if (nd.is_leaf())
                    throw std::logic_error("insert would violate prefix-freeness");
                leaf = new_node(u, std::string(k.substr(i)), multiplicity);
                nodes_.at(u).children[static_cast<unsigned char>(k[i])] = leaf;
                ++version_;
                ++leaf_total_;
                break;
            }
            NodeId chid = it->second;
            TrieNode& ch = nodes_.at(chid);
            std::size_t j = 0;
            while (j < ch.edge.size() && i < k.size() && ch.edge[j] == k[i]) {
                ++j;
                ++i;
            }
            if (j == ch.edge.size()) {
                u = chid;
                continue;
            }
            if (i == k.size())
                throw std::logic_error("insert would violate prefix-freeness");
            // Split the edge at offset j, then branch.
            NodeId mid = new_node(u, ch.edge.substr(0, j), 0);
            TrieNode& midn = nodes_.at(mid);
            midn.occ_count = ch.occ_count;
            midn.children[static_cast<unsigned char>(ch.edge[j])] = chid;
            nodes_.at(u).children[static_cast<unsigned char>(midn.edge[0])] = mid;
            ch.parent = mid;
            ch.edge.erase(0, j);
            leaf = new_node(mid, std::string(k.substr(i)), multiplicity);
            nodes_.at(mid).children[static_cast<unsigned char>(k[i])] = leaf;
            ++version_;
            ++leaf_total_;
            break;
        }
        // Propagate the count along the explicit path.
        TrieNode& lf = nodes_.at(leaf);
        lf.occ_count += multiplicity;
        for (NodeId v = lf.parent; v != kNoNode; v = nodes_.at(v).parent)
            nodes_.at(v).occ_count += multiplicity;
        return leaf;
    }

    // Decrements k's multiplicity; removes the leaf (and re-merges any
    // resulting unary node) when the count reaches zero.
    void remove_string(std::string_view k, std::uint64_t multiplicity = 1) {
        auto loc = locus(k);
        if (!loc || loc->above != 0 || !node(loc->node).is_leaf())
            throw std::invalid_argument("remove_string: string not present");
        NodeId leaf = loc->node;
        TrieNode& lf = nodes_.at(leaf);
        if (lf.leaf_mult < multiplicity)
            throw std::invalid_argument("remove_string: count underflow");
        lf.leaf_mult -= multiplicity;
        lf.occ_count -= multiplicity;
        for (NodeId v = lf.parent; v != kNoNode; v = nodes_.at(v).parent)
            nodes_.at(v).occ_count -= multiplicity;
        if (lf.leaf_mult > 0) return;

        NodeId parent = lf.parent;
        nodes_.at(parent).children.erase(static_cast<unsigned char>(lf.edge[0]));
        nodes_.erase(leaf);
        --leaf_total_;
        ++version_;
        // Re-merge a now-unary internal node with its only child.
        if (parent != root_) {
            TrieNode& pn = nodes_.at(parent);
            if (!pn.is_leaf() && pn.children.size() == 1) {
                NodeId only = pn.children.begin()->second;
                TrieNode& on = nodes_.at(only);
                on.edge = pn.edge + on.edge;
                on.parent = pn.parent;
                nodes_.at(pn.parent).children[static_cast<unsigned char>(on.edge[0])] = only;
                nodes_.erase(parent);
            }
        }
    }

    // Leaf multiset as (string, multiplicity) pairs, lexicographic order.
    std::vector<std::pair<std::string, std::uint64_t>> leaf_multiset() const {
        std::vector<std::pair<std::string, std::uint64_t>> out;
        collect_multiset(root_, std::string(), out);
        return out;
    }

    // Shape + labels + counts, ignoring node ids. Used by the fresh-rebuild
    // structural-equality oracle.
    bool structurally_equal(const CompactTrie& other) const {
        return canonical() == other.canonical();
    }

    std::string canonical() const {
        std::ostringstream os;
        canonical_rec(root_, os);
        return os.str();
    }

    // Deterministic DOT dump (children in symbol order), for golden tests.
    std::string to_dot() const {
        std::ostringstream os;
        os << "digraph trie {\n";
        std::vector<std::pair<NodeId, std::uint64_t>> order;
        dot_rec(root_, 0, os);
        os << "}\n";
        return os.str();
    }

    // Serialization: deterministic preorder, preserving node ids.
    void save(std::string& out) const {
        append_u64(out, next_id_);
        append_u64(out, nodes_.size());
        save_rec(root_, out);
    }

    static CompactTrie load(const std::string& in, std::size_t& off) {
        CompactTrie t;
        t.nodes_.clear();
        t.leaf_total_ = 0;
        t.next_id_ = read_u64(in, off);
        std::uint64_t count = read_u64(in, off);
        t.root_ = t.load_rec(in, off, kNoNode);
        if (t.nodes_.size() != count) throw std::runtime_error("trie load: node count mismatch");
        return t;
    }

private:
    NodeId new_node(NodeId parent, std::string edge, std::uint64_t leaf_mult) {
        NodeId id = next_id_++;
        TrieNode nd;
        nd.parent = parent;
        nd.edge = std::move(edge);
        nd.leaf_mult = leaf_mult;
        nodes_.emplace(id, std::move(nd));
        return id;
    }

    void collect_leaves(NodeId u, std::vector<NodeId>& out) const {
        const TrieNode& nd = node(u);
        if (nd.is_leaf()) out.push_back(u);
        for (auto& [c, ch] : nd.children) collect_leaves(ch, out);
    }

    void collect_multiset(NodeId u, std::string prefix,
                          std::vector<std::pair<std::string, std::uint64_t>>& out) const {
        const TrieNode& nd = node(u);
        prefix += nd.edge;
        if (nd.is_leaf()) out.emplace_back(prefix, nd.leaf_mult);
        for (auto& [c, ch] : nd.children) collect_multiset(ch, prefix, out);
    }

    void canonical_rec(NodeId u, std::ostringstream& os) const {
        const TrieNode& nd = node(u);
        os << '(' << nd.edge << '|' << nd.occ_count << '|' << nd.leaf_mult;
        for (auto& [c, ch] : nd.children) canonical_rec(ch, os);
        os << ')';
    }

    void dot_rec(NodeId u, int depth, std::ostringstream& os) const {
        const TrieNode& nd = node(u);
        for (auto& [c, ch] : nd.children) {
            const TrieNode& cn = node(ch);
            os << "  n" << u << " -> n" << ch << " [label=\"";
            for (char e : cn.edge) os << (e == '\0' ? '$' : e);
            os << "\"];\n";
            os << "  n" << ch << " [label=\"" << cn.occ_count
               << (cn.is_leaf() ? "L" : "") << "\"];\n";
            dot_rec(ch, depth + 1, os);
        }
    }

    static void append_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    static std::uint64_t read_u64(const std::string& in, std::size_t& off) {
        if (off + 8 > in.size()) throw std::runtime_error("truncated trie data");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
        off += 8;
        return v;
    }

    void save_rec(NodeId u, std::string& out) const {
        const TrieNode& nd = node(u);
        append_u64(out, u);
        append_u64(out, nd.edge.size());
        out += nd.edge;
        append_u64(out, nd.leaf_mult);
        append_u64(out, nd.occ_count);
        append_u64(out, nd.children.size());
        for (auto& [c, ch] : nd.children) save_rec(ch, out);
    }

    NodeId load_rec(const std::string& in, std::size_t& off, NodeId parent) {
        NodeId id = read_u64(in, off);
        TrieNode nd;
        nd.parent = parent;
        std::uint64_t elen = read_u64(in, off);
        if (off + elen > in.size()) throw std::runtime_error("truncated trie data");
        nd.edge = in.substr(off, elen);
        off += elen;
        nd.leaf_mult = read_u64(in, off);
        nd.occ_count = read_u64(in, off);
        std::uint64_t nchild = read_u64(in, off);
        if (nd.is_leaf()) ++leaf_total_;
        nodes_.emplace(id, std::move(nd));
        for (std::uint64_t i = 0; i < nchild; ++i) {
            NodeId ch = load_rec(in, off, id);
            TrieNode& chn = nodes_.at(ch);
            nodes_.at(id).children[static_cast<unsigned char>(chn.edge[0])] = ch;
        }
        return id;
    }

    std::unordered_map<NodeId, TrieNode> nodes_;
    NodeId root_ = kNoNode;
    NodeId next_id_ = 1;
    std::uint64_t version_ = 1;
    std::size_t leaf_total_ = 0;
};

}  // namespace tsti
