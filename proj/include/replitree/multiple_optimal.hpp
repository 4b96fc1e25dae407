#pragma once

#include "solution.hpp"
#include "tree.hpp"
#include "validate.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <utility>
#include <vector>

namespace replitree {

// Flow bookkeeping for the optimal Multiple solver on homogeneous trees.
// flow[k]  - requests crossing the link to parent(k) that no replica below
//            (or at) k has absorbed yet
// tflow[k] - total requests issued inside subtree(k)
struct FlowState {
    std::vector<long long> flow;
    std::vector<long long> tflow;
    std::vector<char> in_repl;
    std::vector<std::pair<NodeIndex, long long>> selections;  // pass-2 picks (node, uflow)

    long long root_flow() const { return flow[0]; }
    std::vector<NodeIndex> replicas() const {
        std::vector<NodeIndex> out;
        for (NodeIndex j = 0; j < static_cast<NodeIndex>(in_repl.size()); ++j)
            if (in_repl[static_cast<std::size_t>(j)]) out.push_back(j);
        return out;
    }
};

// Canonical flow of the tree, independent of any placement. A node is
// saturated when the flow reaching it is at least W; it then absorbs
// exactly W. nsn[k] counts saturated nodes inside subtree(k).
struct CanonicalDiagnostics {
    std::vector<long long> cflow;
    std::vector<long long> nsn;
    std::vector<NodeIndex> saturated;  // SN, in depth-first discovery order
};

namespace detail {

inline void pass1_visit(const DistributionTree& tree, long long w, NodeIndex s, FlowState& st) {
    const TreeNode& n = tree.node(s);
    if (n.is_client) {
        st.flow[static_cast<std::size_t>(s)] = n.requests;
        st.tflow[static_cast<std::size_t>(s)] = n.requests;
        return;
    }
    long long flow = 0, tflow = 0;
    for (NodeIndex c : n.children) {
        pass1_visit(tree, w, c, st);
        flow += st.flow[static_cast<std::size_t>(c)];
        tflow += st.tflow[static_cast<std::size_t>(c)];
    }
    if (flow >= w) {
        flow -= w;
        st.in_repl[static_cast<std::size_t>(s)] = 1;
    }
    st.flow[static_cast<std::size_t>(s)] = flow;
    st.tflow[static_cast<std::size_t>(s)] = tflow;
}

inline void preorder_internal(const DistributionTree& tree, NodeIndex s,
                              std::vector<NodeIndex>& out) {
    if (tree.node(s).is_client) return;
    out.push_back(s);
    for (NodeIndex c : tree.node(s).children) preorder_internal(tree, c, out);
}

}  // namespace detail

// Pass 1: place saturated replicas as low as possible; each absorbs exactly
// W requests from the flow climbing the tree.
inline FlowState pass1(const DistributionTree& tree, long long w) {
    if (w <= 0) throw std::invalid_argument("capacity must be positive");
    FlowState st;
    st.flow.assign(static_cast<std::size_t>(tree.size()), 0);
    st.tflow.assign(static_cast<std::size_t>(tree.size()), 0);
    st.in_repl.assign(static_cast<std::size_t>(tree.size()), 0);
    detail::pass1_visit(tree, w, tree.root(), st);
    return st;
}

struct Pass2Result {
    bool feasible;
    long long residual;  // unabsorbed flow at the root when infeasible
};

// Pass 2: while requests still reach the root, pick the free node with the
// largest useful flow (the minimum flow along its path to the root) and give
// it a replica. Ties go to the first node in a depth-first traversal.
inline Pass2Result pass2(const DistributionTree& tree, long long w, FlowState& st) {
    (void)w;
    std::vector<NodeIndex> order;
    detail::preorder_internal(tree, tree.root(), order);
    std::vector<long long> uflow(static_cast<std::size_t>(tree.size()), 0);

    while (st.root_flow() != 0) {
        // uflow_j = min(flow_j, uflow_parent(j)); the root's own flow seeds it.
        uflow[0] = st.flow[0];
        for (NodeIndex j : order) {
            if (j == tree.root()) continue;
            NodeIndex p = tree.node(j).parent;
            uflow[static_cast<std::size_t>(j)] =
                std::min(st.flow[static_cast<std::size_t>(j)], uflow[static_cast<std::size_t>(p)]);
        }
        NodeIndex best = kNoNode;
        long long best_uflow = 0;
        for (NodeIndex j : order) {
            if (st.in_repl[static_cast<std::size_t>(j)]) continue;
            if (uflow[static_cast<std::size_t>(j)] > best_uflow) {
                best_uflow = uflow[static_cast<std::size_t>(j)];
                best = j;
            }
        }
        if (best == kNoNode) return {false, st.root_flow()};
        st.in_repl[static_cast<std::size_t>(best)] = 1;
        st.selections.emplace_back(best, best_uflow);
        for (NodeIndex j = best; j != kNoNode; j = tree.node(j).parent)
            st.flow[static_cast<std::size_t>(j)] -= best_uflow;
    }
    return {true, 0};
}

namespace detail {

struct Pass3Ctx {
    const DistributionTree& tree;
    long long w;
    const FlowState& st;
    std::vector<long long> remaining;  // r'_i
    Assignment assignment;
};

// Returns the clients of subtree(s) that still have unassigned requests,
// in left-to-right order.
inline std::vector<NodeIndex> pass3_visit(Pass3Ctx& ctx, NodeIndex s) {
    std::vector<NodeIndex> pending;
    for (NodeIndex c : ctx.tree.node(s).children) {
        if (ctx.tree.node(c).is_client) {
            if (ctx.remaining[static_cast<std::size_t>(c)] > 0) pending.push_back(c);
        } else {
            auto sub = pass3_visit(ctx, c);
            pending.insert(pending.end(), sub.begin(), sub.end());
        }
    }
    if (ctx.st.in_repl[static_cast<std::size_t>(s)]) {
        long long load = 0;
        std::vector<NodeIndex> left;
        for (NodeIndex i : pending) {
            long long r = ctx.remaining[static_cast<std::size_t>(i)];
            if (r <= ctx.w - load) {
                ctx.assignment.add(i, s, r);
                ctx.remaining[static_cast<std::size_t>(i)] = 0;
                load += r;
            } else {
                left.push_back(i);
            }
        }
        if (!left.empty() && ctx.w - load > 0) {
            // split the first pending client at the capacity boundary
            NodeIndex i = left.front();
            long long x = ctx.w - load;
            ctx.assignment.add(i, s, x);
            ctx.remaining[static_cast<std::size_t>(i)] -= x;
        }
        pending = std::move(left);
    }
    return pending;
}

}  // namespace detail

// Pass 3: distribute requests bottom-up, left to right; each replica absorbs
// whole clients while they fit and splits at most one at the boundary.
// Requires root_flow() == 0 with the replica set fixed.
inline Assignment pass3(const DistributionTree& tree, long long w, const FlowState& st) {
    detail::Pass3Ctx ctx{tree, w, st, std::vector<long long>(static_cast<std::size_t>(tree.size()), 0), {}};
    for (NodeIndex c : tree.client_nodes())
        ctx.remaining[static_cast<std::size_t>(c)] = tree.node(c).requests;
    auto leftover = detail::pass3_visit(ctx, tree.root());
    assert(leftover.empty());
    (void)leftover;
    return std::move(ctx.assignment);
}

struct MultipleOutcome {
    bool feasible = false;
    long long residual = 0;  // requests left at the root when infeasible
    Placement placement;
    Assignment assignment;
};

// Optimal Replica Counting under the Multiple policy on homogeneous trees:
// pass1, pass2 when needed, pass3.
inline MultipleOutcome solve_multiple_homogeneous(const DistributionTree& tree) {
    auto w = tree.uniform_capacity();
    if (!w) throw std::invalid_argument("tree is not homogeneous");
    if (*w <= 0) {
        if (tree.total_requests() == 0) return {true, 0, {}, {}};
        throw std::invalid_argument("capacity must be positive");
    }

    FlowState st = pass1(tree, *w);
    if (st.root_flow() != 0) {
        if (st.root_flow() <= *w && !st.in_repl[0]) {
            // the root can mop up the remainder; pass 2 is not needed
            st.in_repl[0] = 1;
            st.flow[0] = 0;
        } else {
            Pass2Result p2 = pass2(tree, *w, st);
            if (!p2.feasible) return {false, p2.residual, {}, {}};
        }
    }

    MultipleOutcome out;
    out.feasible = true;
    out.assignment = pass3(tree, *w, st);
    for (NodeIndex j : st.replicas()) out.placement.add(j);
    return out;
}

// Canonical flow, saturated set SN and per-subtree saturated counts.
inline CanonicalDiagnostics canonical_diagnostics(const DistributionTree& tree, long long w) {
    if (w <= 0) throw std::invalid_argument("capacity must be positive");
    CanonicalDiagnostics diag;
    diag.cflow.assign(static_cast<std::size_t>(tree.size()), 0);
    diag.nsn.assign(static_cast<std::size_t>(tree.size()), 0);

    // postorder over the whole tree
    std::vector<std::pair<NodeIndex, bool>> stack{{tree.root(), false}};
    std::vector<NodeIndex> postorder;
    while (!stack.empty()) {
        auto [k, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            postorder.push_back(k);
            continue;
        }
        stack.emplace_back(k, true);
        const auto& ch = tree.node(k).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, false);
    }
    for (NodeIndex k : postorder) {
        const TreeNode& n = tree.node(k);
        if (n.is_client) {
            diag.cflow[static_cast<std::size_t>(k)] = n.requests;
            continue;
        }
        long long f = 0, x = 0;
        for (NodeIndex c : n.children) {
            f += diag.cflow[static_cast<std::size_t>(c)];
            x += diag.nsn[static_cast<std::size_t>(c)];
        }
        if (f >= w) {
            diag.cflow[static_cast<std::size_t>(k)] = f - w;
            diag.nsn[static_cast<std::size_t>(k)] = x + 1;
        } else {
            diag.cflow[static_cast<std::size_t>(k)] = f;
            diag.nsn[static_cast<std::size_t>(k)] = x;
        }
    }
    std::vector<NodeIndex> dfs;
    detail::preorder_internal(tree, tree.root(), dfs);
    for (NodeIndex j : dfs) {
        long long f = 0;
        for (NodeIndex c : tree.node(j).children) f += diag.cflow[static_cast<std::size_t>(c)];
        if (f >= w) diag.saturated.push_back(j);
    }
    return diag;
}

}  // namespace replitree
