#pragma once

#include "tree.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace replitree {

// The replica set R.
struct Placement {
    std::vector<NodeIndex> replicas;  // sorted, unique

    void add(NodeIndex j) {
        auto it = std::lower_bound(replicas.begin(), replicas.end(), j);
        if (it == replicas.end() || *it != j) replicas.insert(it, j);
    }
    bool contains(NodeIndex j) const {
        return std::binary_search(replicas.begin(), replicas.end(), j);
    }
    std::size_t size() const { return replicas.size(); }
};

// r_{i,s}: requests of client i served by node s. Only strictly positive
// entries are stored; Servers(i) is derived, never stored.
struct Assignment {
    std::map<std::pair<NodeIndex, NodeIndex>, long long> served;  // (client, server) -> count

    void add(NodeIndex client, NodeIndex server, long long count) {
        if (count <= 0) return;
        served[{client, server}] += count;
    }
    long long total() const {
        long long sum = 0;
        for (const auto& [key, v] : served) sum += v;
        return sum;
    }
    long long served_of_client(NodeIndex client) const {
        long long sum = 0;
        auto it = served.lower_bound({client, kNoNode});
        for (; it != served.end() && it->first.first == client; ++it) sum += it->second;
        return sum;
    }
    // distinct servers with a positive share for this client
    std::vector<NodeIndex> servers_of(NodeIndex client) const {
        std::vector<NodeIndex> out;
        auto it = served.lower_bound({client, kNoNode});
        for (; it != served.end() && it->first.first == client; ++it) out.push_back(it->first.second);
        return out;
    }
};

// Objective value: sum of storage costs over the replica set.
inline Ratio placement_cost(const DistributionTree& tree, const Placement& placement) {
    Ratio cost{0};
    for (NodeIndex j : placement.replicas) cost += tree.node(j).storage_cost;
    return cost;
}

// Solution file format, '#' comments allowed:
//   replica <node-id>
//   assign <client-id> <server-id> <count>
inline std::string write_solution(const DistributionTree& tree, const Placement& placement,
                                  const Assignment& assignment) {
    std::ostringstream out;
    for (NodeIndex j : placement.replicas) out << "replica " << tree.node(j).id << "\n";
    for (const auto& [key, count] : assignment.served)
        out << "assign " << tree.node(key.first).id << " " << tree.node(key.second).id << " "
            << count << "\n";
    return out.str();
}

inline std::pair<Placement, Assignment> parse_solution(const DistributionTree& tree,
                                                       const std::string& text) {
    Placement placement;
    Assignment assignment;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "replica") {
            if (toks.size() != 2) throw ParseError(lineno, "malformed replica record");
            if (!tree.has_id(toks[1])) throw ParseError(lineno, "unknown node '" + toks[1] + "'");
            placement.add(tree.index_of(toks[1]));
        } else if (toks[0] == "assign") {
            if (toks.size() != 4) throw ParseError(lineno, "malformed assign record");
            if (!tree.has_id(toks[1])) throw ParseError(lineno, "unknown node '" + toks[1] + "'");
            if (!tree.has_id(toks[2])) throw ParseError(lineno, "unknown node '" + toks[2] + "'");
            long long count = detail::parse_int(toks[3], lineno, "count");
            if (count <= 0) throw ParseError(lineno, "count must be positive");
            assignment.add(tree.index_of(toks[1]), tree.index_of(toks[2]), count);
        } else {
            throw ParseError(lineno, "unknown record '" + toks[0] + "'");
        }
    }
    return {std::move(placement), std::move(assignment)};
}

}  // namespace replitree
