#pragma once

#include "ratio.hpp"

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace replitree {

// Thrown for malformed input files; carries a 1-based line number.
class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

class TreeQueryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using NodeIndex = int;
constexpr NodeIndex kNoNode = -1;

struct TreeNode {
    std::string id;
    bool is_client = false;

    // internal nodes
    long long capacity = 0;  // W_j, requests per time unit
    Ratio storage_cost{0};   // sc_j

    // clients
    long long requests = 0;           // r_i
    std::optional<Ratio> qos;         // nullopt = unbounded

    // edge to the parent (root has none)
    NodeIndex parent = kNoNode;
    Ratio comm{0};                    // time per request on the parent link
    std::optional<long long> bandwidth;  // nullopt = unbounded

    std::vector<NodeIndex> children;  // declaration order
    int depth = 0;
};

// A rooted distribution tree: internal nodes are candidate servers, leaves
// are clients. Immutable once parsed; all queries are const.
class DistributionTree {
  public:
    static DistributionTree parse(const std::string& text);
    std::string serialize() const;

    int size() const { return static_cast<int>(nodes_.size()); }
    NodeIndex root() const { return 0; }
    const TreeNode& node(NodeIndex k) const { return nodes_[static_cast<std::size_t>(k)]; }
    bool has_id(const std::string& id) const { return index_.count(id) != 0; }
    NodeIndex index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw TreeQueryError("unknown node id: " + id);
        return it->second;
    }

    const std::vector<NodeIndex>& internal_nodes() const { return internal_; }
    const std::vector<NodeIndex>& client_nodes() const { return clients_; }

    // Path from parent(k) up to the root, k excluded, bottom-up.
    std::vector<NodeIndex> ancestors(NodeIndex k) const {
        check_index(k);
        std::vector<NodeIndex> out;
        for (NodeIndex a = node(k).parent; a != kNoNode; a = node(a).parent) out.push_back(a);
        return out;
    }

    bool is_ancestor(NodeIndex anc, NodeIndex k) const {
        check_index(anc);
        check_index(k);
        for (NodeIndex a = node(k).parent; a != kNoNode; a = node(a).parent)
            if (a == anc) return true;
        return false;
    }

    // All clients inside subtree(j); includes j itself when j is a client.
    std::vector<NodeIndex> subtree_clients(NodeIndex j) const {
        check_index(j);
        std::vector<NodeIndex> out, stack{j};
        while (!stack.empty()) {
            NodeIndex k = stack.back();
            stack.pop_back();
            if (node(k).is_client) out.push_back(k);
            const auto& ch = node(k).children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    // Sum of comm over the links between i and an ancestor j of i.
    Ratio distance(NodeIndex i, NodeIndex j) const {
        check_index(i);
        check_index(j);
        Ratio d{0};
        for (NodeIndex k = i; k != j; k = node(k).parent) {
            if (node(k).parent == kNoNode)
                throw TreeQueryError(node(j).id + " is not an ancestor of " + node(i).id);
            d += node(k).comm;
        }
        return d;
    }

    long long total_requests() const {
        long long sum = 0;
        for (NodeIndex c : clients_) sum += node(c).requests;
        return sum;
    }

    long long total_capacity() const {
        long long sum = 0;
        for (NodeIndex j : internal_) sum += node(j).capacity;
        return sum;
    }

    // lambda = sum of requests / sum of capacities.
    Ratio load_lambda() const {
        long long cap = total_capacity();
        if (cap == 0) throw TreeQueryError("total server capacity is zero");
        return Ratio(total_requests(), cap);
    }

    // The common capacity W when all internal nodes agree, nullopt otherwise.
    std::optional<long long> uniform_capacity() const {
        long long w = node(internal_.front()).capacity;
        for (NodeIndex j : internal_)
            if (node(j).capacity != w) return std::nullopt;
        return w;
    }

  private:
    void check_index(NodeIndex k) const {
        if (k < 0 || k >= size()) throw TreeQueryError("node index out of range");
    }

    std::vector<TreeNode> nodes_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<NodeIndex> internal_, clients_;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

inline long long parse_int(const std::string& s, int line, const char* what) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, std::string("expected integer for ") + what + ", got '" + s + "'");
    }
}

inline Ratio parse_ratio(const std::string& s, int line, const char* what) {
    try {
        return ratio_from_decimal(s);
    } catch (const std::exception&) {
        throw ParseError(line, std::string("expected decimal for ") + what + ", got '" + s + "'");
    }
}

inline void expect_keyword(const std::vector<std::string>& toks, std::size_t pos,
                           const char* kw, int line) {
    if (pos >= toks.size() || toks[pos] != kw)
        throw ParseError(line, std::string("expected keyword '") + kw + "'");
}

}  // namespace detail

// Tree file format, one record per line, '#' starts a comment:
//   node <id> <capacity> <storage_cost>                      (root; first node line)
//   node <id> <capacity> <storage_cost> parent <pid> comm <c> bw <b>
//   client <id> requests <r> qos <q> parent <pid> comm <c> bw <b>
// <q> and <b> may be "inf". Parents must be declared before children.
inline DistributionTree DistributionTree::parse(const std::string& text) {
    DistributionTree tree;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;

        TreeNode n;
        bool has_parent_clause = false;
        std::string parent_id;
        if (toks[0] == "node") {
            if (toks.size() != 4 && toks.size() != 10)
                throw ParseError(lineno, "malformed node record");
            n.id = toks[1];
            n.capacity = detail::parse_int(toks[2], lineno, "capacity");
            n.storage_cost = detail::parse_ratio(toks[3], lineno, "storage_cost");
            if (n.capacity < 0) throw ParseError(lineno, "capacity must be >= 0");
            if (n.storage_cost < Ratio(0)) throw ParseError(lineno, "storage_cost must be >= 0");
            if (toks.size() == 10) {
                detail::expect_keyword(toks, 4, "parent", lineno);
                parent_id = toks[5];
                detail::expect_keyword(toks, 6, "comm", lineno);
                n.comm = detail::parse_ratio(toks[7], lineno, "comm");
                detail::expect_keyword(toks, 8, "bw", lineno);
                if (toks[9] != "inf") {
                    long long bw = detail::parse_int(toks[9], lineno, "bw");
                    if (bw <= 0) throw ParseError(lineno, "bw must be positive or inf");
                    n.bandwidth = bw;
                }
                has_parent_clause = true;
            }
        } else if (toks[0] == "client") {
            if (toks.size() != 12) throw ParseError(lineno, "malformed client record");
            n.is_client = true;
            n.id = toks[1];
            detail::expect_keyword(toks, 2, "requests", lineno);
            n.requests = detail::parse_int(toks[3], lineno, "requests");
            if (n.requests < 0) throw ParseError(lineno, "requests must be >= 0");
            detail::expect_keyword(toks, 4, "qos", lineno);
            if (toks[5] != "inf") {
                Ratio q = detail::parse_ratio(toks[5], lineno, "qos");
                if (q <= Ratio(0)) throw ParseError(lineno, "qos must be positive or inf");
                n.qos = q;
            }
            detail::expect_keyword(toks, 6, "parent", lineno);
            parent_id = toks[7];
            detail::expect_keyword(toks, 8, "comm", lineno);
            n.comm = detail::parse_ratio(toks[9], lineno, "comm");
            detail::expect_keyword(toks, 10, "bw", lineno);
            if (toks[11] != "inf") {
                long long bw = detail::parse_int(toks[11], lineno, "bw");
                if (bw <= 0) throw ParseError(lineno, "bw must be positive or inf");
                n.bandwidth = bw;
            }
            has_parent_clause = true;
        } else {
            throw ParseError(lineno, "unknown record '" + toks[0] + "'");
        }

        if (n.comm < Ratio(0)) throw ParseError(lineno, "comm must be >= 0");
        if (tree.index_.count(n.id)) throw ParseError(lineno, "duplicate id '" + n.id + "'");

        if (!has_parent_clause) {
            if (!tree.nodes_.empty())
                throw ParseError(lineno, "only the first node line may omit the parent");
        } else {
            if (tree.nodes_.empty())
                throw ParseError(lineno, "missing root: first record must be a parentless node");
            auto it = tree.index_.find(parent_id);
            if (it == tree.index_.end())
                throw ParseError(lineno, "unknown parent '" + parent_id +
                                             "' (parents must be declared first)");
            if (tree.nodes_[static_cast<std::size_t>(it->second)].is_client)
                throw ParseError(lineno, "client '" + parent_id + "' cannot have children");
            n.parent = it->second;
            n.depth = tree.nodes_[static_cast<std::size_t>(it->second)].depth + 1;
        }

        NodeIndex ix = static_cast<NodeIndex>(tree.nodes_.size());
        tree.index_.emplace(n.id, ix);
        if (n.parent != kNoNode) tree.nodes_[static_cast<std::size_t>(n.parent)].children.push_back(ix);
        (n.is_client ? tree.clients_ : tree.internal_).push_back(ix);
        tree.nodes_.push_back(std::move(n));
    }
    if (tree.nodes_.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "empty tree file");
    if (tree.clients_.empty()) throw ParseError(lineno, "tree has no clients");
    return tree;
}

inline std::string DistributionTree::serialize() const {
    std::ostringstream out;
    for (const TreeNode& n : nodes_) {
        if (n.is_client) {
            out << "client " << n.id << " requests " << n.requests << " qos "
                << (n.qos ? ratio_to_string(*n.qos) : "inf") << " parent "
                << node(n.parent).id << " comm " << ratio_to_string(n.comm) << " bw "
                << (n.bandwidth ? std::to_string(*n.bandwidth) : "inf") << "\n";
        } else if (n.parent == kNoNode) {
            out << "node " << n.id << " " << n.capacity << " " << ratio_to_string(n.storage_cost)
                << "\n";
        } else {
            out << "node " << n.id << " " << n.capacity << " " << ratio_to_string(n.storage_cost)
                << " parent " << node(n.parent).id << " comm " << ratio_to_string(n.comm)
                << " bw " << (n.bandwidth ? std::to_string(*n.bandwidth) : "inf") << "\n";
        }
    }
    return out.str();
}

inline DistributionTree parse_tree(const std::string& text) { return DistributionTree::parse(text); }
inline std::string serialize_tree(const DistributionTree& t) { return t.serialize(); }

}  // namespace replitree
