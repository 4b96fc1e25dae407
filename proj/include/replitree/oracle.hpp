#pragma once

#include "solution.hpp"
#include "tree.hpp"
#include "validate.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace replitree {

class OracleCapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    int max_internal = 16;
    int max_clients = 16;  // only enforced where the search depends on |C|
};

struct OracleResult {
    bool feasible = false;
    Ratio cost{0};  // meaningful only when feasible
    Placement placement;
    Assignment assignment;
};

namespace detail {

struct SubsetSearch {
    const DistributionTree& tree;
    std::vector<NodeIndex> internals;                  // declaration order
    std::vector<std::vector<NodeIndex>> client_paths;  // per client: ancestors bottom-up
    std::vector<NodeIndex> clients;

    explicit SubsetSearch(const DistributionTree& t) : tree(t) {
        internals = t.internal_nodes();
        clients = t.client_nodes();
        client_paths.reserve(clients.size());
        for (NodeIndex c : clients) client_paths.push_back(t.ancestors(c));
    }

    Placement to_placement(std::uint32_t mask) const {
        Placement p;
        for (std::size_t b = 0; b < internals.size(); ++b)
            if (mask & (1u << b)) p.add(internals[b]);
        return p;
    }

    // all masks ordered by increasing storage cost, ties by mask value
    std::vector<std::uint32_t> masks_by_cost() const {
        std::vector<std::pair<Ratio, std::uint32_t>> order;
        std::uint32_t count = 1u << internals.size();
        order.reserve(count);
        for (std::uint32_t m = 0; m < count; ++m) {
            Ratio cost{0};
            for (std::size_t b = 0; b < internals.size(); ++b)
                if (m & (1u << b)) cost += tree.node(internals[b]).storage_cost;
            order.emplace_back(cost, m);
        }
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::uint32_t> masks;
        masks.reserve(count);
        for (auto& [cost, m] : order) masks.push_back(m);
        return masks;
    }

    long long mask_capacity(std::uint32_t mask) const {
        long long cap = 0;
        for (std::size_t b = 0; b < internals.size(); ++b)
            if (mask & (1u << b)) cap += tree.node(internals[b]).capacity;
        return cap;
    }
};

}  // namespace detail

// Greedy bottom-up saturation: with only capacity constraints, serving
// requests as low as possible never hurts under Multiple, so a placement is
// feasible exactly when the residual flow at the root is zero.
inline bool feasible_multiple(const DistributionTree& tree, const Placement& placement) {
    std::vector<long long> flow(static_cast<std::size_t>(tree.size()), 0);
    // children are created after parents, so reverse index order is bottom-up
    for (NodeIndex k = tree.size() - 1; k >= 0; --k) {
        const TreeNode& n = tree.node(k);
        long long f = n.is_client ? n.requests : 0;
        for (NodeIndex c : n.children) f += flow[static_cast<std::size_t>(c)];
        if (!n.is_client && placement.contains(k)) f -= std::min(f, n.capacity);
        flow[static_cast<std::size_t>(k)] = f;
    }
    return flow[0] == 0;
}

namespace detail {

// pass3-style witness for a feasible Multiple placement
inline Assignment multiple_witness(const DistributionTree& tree, const Placement& placement) {
    struct Ctx {
        const DistributionTree& tree;
        const Placement& placement;
        std::vector<long long> remaining;
        Assignment assignment;
    } ctx{tree, placement, std::vector<long long>(static_cast<std::size_t>(tree.size()), 0), {}};
    for (NodeIndex c : tree.client_nodes())
        ctx.remaining[static_cast<std::size_t>(c)] = tree.node(c).requests;

    auto visit = [&](auto&& self, NodeIndex s) -> std::vector<NodeIndex> {
        std::vector<NodeIndex> pending;
        for (NodeIndex c : ctx.tree.node(s).children) {
            if (ctx.tree.node(c).is_client) {
                if (ctx.remaining[static_cast<std::size_t>(c)] > 0) pending.push_back(c);
            } else {
                auto sub = self(self, c);
                pending.insert(pending.end(), sub.begin(), sub.end());
            }
        }
        if (!ctx.tree.node(s).is_client && ctx.placement.contains(s)) {
            long long cap = ctx.tree.node(s).capacity, load = 0;
            std::vector<NodeIndex> left;
            for (NodeIndex i : pending) {
                long long r = ctx.remaining[static_cast<std::size_t>(i)];
                if (r <= cap - load) {
                    ctx.assignment.add(i, s, r);
                    ctx.remaining[static_cast<std::size_t>(i)] = 0;
                    load += r;
                } else {
                    left.push_back(i);
                }
            }
            if (!left.empty() && cap - load > 0) {
                NodeIndex i = left.front();
                long long x = cap - load;
                ctx.assignment.add(i, s, x);
                ctx.remaining[static_cast<std::size_t>(i)] -= x;
            }
            pending = std::move(left);
        }
        return pending;
    };
    visit(visit, tree.root());
    return std::move(ctx.assignment);
}

inline std::optional<Assignment> closest_assignment(const SubsetSearch& ss,
                                                    const Placement& placement) {
    std::vector<long long> load(static_cast<std::size_t>(ss.tree.size()), 0);
    Assignment a;
    for (std::size_t ci = 0; ci < ss.clients.size(); ++ci) {
        long long r = ss.tree.node(ss.clients[ci]).requests;
        if (r == 0) continue;
        NodeIndex server = kNoNode;
        for (NodeIndex anc : ss.client_paths[ci])
            if (placement.contains(anc)) {
                server = anc;
                break;
            }
        if (server == kNoNode) return std::nullopt;
        load[static_cast<std::size_t>(server)] += r;
        if (load[static_cast<std::size_t>(server)] > ss.tree.node(server).capacity)
            return std::nullopt;
        a.add(ss.clients[ci], server, r);
    }
    return a;
}

inline bool upwards_assign(const SubsetSearch& ss, const std::vector<std::size_t>& client_order,
                           std::size_t k, std::vector<long long>& rem, long long remaining_requests,
                           long long remaining_capacity, Assignment& a) {
    if (k == client_order.size()) return true;
    if (remaining_requests > remaining_capacity) return false;
    std::size_t ci = client_order[k];
    long long r = ss.tree.node(ss.clients[ci]).requests;
    for (NodeIndex anc : ss.client_paths[ci]) {
        long long& cap = rem[static_cast<std::size_t>(anc)];
        if (cap < r) continue;
        cap -= r;
        if (upwards_assign(ss, client_order, k + 1, rem, remaining_requests - r,
                           remaining_capacity - r, a)) {
            a.add(ss.clients[ci], anc, r);
            return true;
        }
        cap += r;
    }
    return false;
}

}  // namespace detail

// Exhaustive optimum under Closest: the assignment is forced per subset, so
// enumerate subsets by increasing cost and keep the first feasible one.
inline OracleResult exact_closest(const DistributionTree& tree, const OracleOptions& opt = {}) {
    if (static_cast<int>(tree.internal_nodes().size()) > opt.max_internal)
        throw OracleCapExceeded("instance too large for the closest oracle");
    detail::SubsetSearch ss(tree);
    long long need = tree.total_requests();
    for (std::uint32_t mask : ss.masks_by_cost()) {
        if (ss.mask_capacity(mask) < need) continue;
        Placement p = ss.to_placement(mask);
        if (auto a = detail::closest_assignment(ss, p))
            return {true, placement_cost(tree, p), std::move(p), std::move(*a)};
    }
    return {};
}

// Exhaustive optimum under Upwards: feasibility per subset is decided by
// backtracking over whole-client assignments, biggest clients first.
inline OracleResult exact_upwards(const DistributionTree& tree, const OracleOptions& opt = {}) {
    if (static_cast<int>(tree.internal_nodes().size()) > opt.max_internal)
        throw OracleCapExceeded("instance too large for the upwards oracle");
    if (static_cast<int>(tree.client_nodes().size()) > opt.max_clients)
        throw OracleCapExceeded("too many clients for the upwards oracle");
    detail::SubsetSearch ss(tree);
    long long need = tree.total_requests();

    std::vector<std::size_t> client_order;
    for (std::size_t ci = 0; ci < ss.clients.size(); ++ci)
        if (ss.tree.node(ss.clients[ci]).requests > 0) client_order.push_back(ci);
    std::sort(client_order.begin(), client_order.end(), [&](std::size_t a, std::size_t b) {
        return ss.tree.node(ss.clients[a]).requests > ss.tree.node(ss.clients[b]).requests;
    });

    for (std::uint32_t mask : ss.masks_by_cost()) {
        long long cap = ss.mask_capacity(mask);
        if (cap < need) continue;
        Placement p = ss.to_placement(mask);
        std::vector<long long> rem(static_cast<std::size_t>(tree.size()), 0);
        for (NodeIndex j : p.replicas) rem[static_cast<std::size_t>(j)] = tree.node(j).capacity;
        Assignment a;
        if (detail::upwards_assign(ss, client_order, 0, rem, need, cap, a))
            return {true, placement_cost(tree, p), std::move(p), std::move(a)};
    }
    return {};
}

// Exhaustive optimum under Multiple via the greedy saturation check.
inline OracleResult exact_multiple(const DistributionTree& tree, const OracleOptions& opt = {}) {
    if (static_cast<int>(tree.internal_nodes().size()) > opt.max_internal)
        throw OracleCapExceeded("instance too large for the multiple oracle");
    detail::SubsetSearch ss(tree);
    long long need = tree.total_requests();
    for (std::uint32_t mask : ss.masks_by_cost()) {
        if (ss.mask_capacity(mask) < need) continue;
        Placement p = ss.to_placement(mask);
        if (feasible_multiple(tree, p)) {
            Assignment a = detail::multiple_witness(tree, p);
            return {true, placement_cost(tree, p), std::move(p), std::move(a)};
        }
    }
    return {};
}

}  // namespace replitree
