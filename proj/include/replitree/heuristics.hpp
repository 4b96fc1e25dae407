#pragma once

#include "solution.hpp"
#include "tree.hpp"
#include "validate.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

namespace replitree {

enum class HeuristicKind { Ctda, Ctdlf, Cbu, Utd, Ubcf, Mtd, Mbu, Mg, MixedBest };

inline const char* heuristic_name(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::Ctda: return "ctda";
        case HeuristicKind::Ctdlf: return "ctdlf";
        case HeuristicKind::Cbu: return "cbu";
        case HeuristicKind::Utd: return "utd";
        case HeuristicKind::Ubcf: return "ubcf";
        case HeuristicKind::Mtd: return "mtd";
        case HeuristicKind::Mbu: return "mbu";
        case HeuristicKind::Mg: return "mg";
        default: return "mixedbest";
    }
}

inline Policy heuristic_policy(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::Ctda:
        case HeuristicKind::Ctdlf:
        case HeuristicKind::Cbu: return Policy::Closest;
        case HeuristicKind::Utd:
        case HeuristicKind::Ubcf: return Policy::Upwards;
        default: return Policy::Multiple;
    }
}

inline const std::vector<HeuristicKind>& all_heuristic_kinds() {
    static const std::vector<HeuristicKind> kinds = {
        HeuristicKind::Ctda, HeuristicKind::Ctdlf, HeuristicKind::Cbu,
        HeuristicKind::Utd,  HeuristicKind::Ubcf,  HeuristicKind::Mtd,
        HeuristicKind::Mbu,  HeuristicKind::Mg};
    return kinds;
}

struct HeuristicResult {
    std::string name;
    Policy policy = Policy::Multiple;
    bool success = false;
    long long residual = 0;  // pending requests at the root on failure
    Placement placement;
    Assignment assignment;
    unsigned long long steps = 0;  // basic-operation count, for complexity checks
};

namespace detail {

// Mutable working state shared by the heuristics: per-client remaining
// requests r'_i and per-node pending subtree requests inreq_j.
struct HeurState {
    const DistributionTree& tree;
    std::vector<long long> remaining;
    std::vector<long long> inreq;
    std::vector<char> replica;
    Assignment assignment;
    unsigned long long steps = 0;

    explicit HeurState(const DistributionTree& t)
        : tree(t),
          remaining(static_cast<std::size_t>(t.size()), 0),
          inreq(static_cast<std::size_t>(t.size()), 0),
          replica(static_cast<std::size_t>(t.size()), 0) {
        for (NodeIndex c : t.client_nodes()) {
            long long r = t.node(c).requests;
            remaining[static_cast<std::size_t>(c)] = r;
            for (NodeIndex a = c; a != kNoNode; a = t.node(a).parent) {
                if (!t.node(a).is_client) inreq[static_cast<std::size_t>(a)] += r;
                ++steps;
            }
        }
    }

    // serve x requests of client i at server s, propagating the deletion
    void serve(NodeIndex i, NodeIndex s, long long x) {
        if (x <= 0) return;
        assignment.add(i, s, x);
        remaining[static_cast<std::size_t>(i)] -= x;
        for (NodeIndex a = i; a != kNoNode; a = tree.node(a).parent) {
            if (!tree.node(a).is_client) inreq[static_cast<std::size_t>(a)] -= x;
            ++steps;
        }
    }

    // pending clients of subtree(s), left to right
    std::vector<NodeIndex> pending_clients(NodeIndex s) {
        std::vector<NodeIndex> out, stack{s};
        while (!stack.empty()) {
            NodeIndex k = stack.back();
            stack.pop_back();
            ++steps;
            if (tree.node(k).is_client) {
                if (remaining[static_cast<std::size_t>(k)] > 0) out.push_back(k);
                continue;
            }
            const auto& ch = tree.node(k).children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    // serve the whole pending subtree of s at s (Closest-style absorption)
    void absorb_subtree(NodeIndex s) {
        for (NodeIndex i : pending_clients(s)) serve(i, s, remaining[static_cast<std::size_t>(i)]);
    }

    HeuristicResult finish(HeuristicKind kind) {
        HeuristicResult res;
        res.name = heuristic_name(kind);
        res.policy = heuristic_policy(kind);
        res.residual = inreq[static_cast<std::size_t>(tree.root())];
        res.success = res.residual == 0;
        for (NodeIndex j = 0; j < tree.size(); ++j)
            if (replica[static_cast<std::size_t>(j)]) res.placement.add(j);
        res.assignment = std::move(assignment);
        res.steps = steps;
        return res;
    }
};

inline bool client_before(const HeurState& st, NodeIndex a, NodeIndex b, bool ascending) {
    long long ra = st.remaining[static_cast<std::size_t>(a)];
    long long rb = st.remaining[static_cast<std::size_t>(b)];
    if (ra != rb) return ascending ? ra < rb : ra > rb;
    return st.tree.node(a).id < st.tree.node(b).id;  // lexicographic tie-break
}

// Upwards-style deletion: whole clients only, biggest first; clients that
// do not fit in the leftover budget are skipped.
inline void delete_whole_desc(HeurState& st, NodeIndex s, long long budget) {
    auto list = st.pending_clients(s);
    std::sort(list.begin(), list.end(),
              [&](NodeIndex a, NodeIndex b) { return client_before(st, a, b, false); });
    for (NodeIndex i : list) {
        ++st.steps;
        long long r = st.remaining[static_cast<std::size_t>(i)];
        if (r <= budget) {
            st.serve(i, s, r);
            budget -= r;
            if (budget == 0) return;
        }
    }
}

// Multiple-style deletion: whole clients in the given order until one no
// longer fits, then a partial deletion from that client uses up the budget.
inline void delete_split(HeurState& st, NodeIndex s, long long budget, bool ascending) {
    auto list = st.pending_clients(s);
    std::sort(list.begin(), list.end(),
              [&](NodeIndex a, NodeIndex b) { return client_before(st, a, b, ascending); });
    for (NodeIndex i : list) {
        ++st.steps;
        long long r = st.remaining[static_cast<std::size_t>(i)];
        if (r <= budget) {
            st.serve(i, s, r);
            budget -= r;
            if (budget == 0) return;
        } else {
            st.serve(i, s, budget);
            return;
        }
    }
}

inline std::vector<NodeIndex> postorder_internal(const DistributionTree& tree) {
    std::vector<std::pair<NodeIndex, bool>> stack{{tree.root(), false}};
    std::vector<NodeIndex> out;
    while (!stack.empty()) {
        auto [k, expanded] = stack.back();
        stack.pop_back();
        if (tree.node(k).is_client) continue;
        if (expanded) {
            out.push_back(k);
            continue;
        }
        stack.emplace_back(k, true);
        const auto& ch = tree.node(k).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, false);
    }
    return out;
}

}  // namespace detail

// Closest Top Down All: breadth-first sweeps; any node that can absorb its
// whole pending subtree becomes a replica and closes that subtree. Sweeps
// repeat until one adds no server.
inline HeuristicResult ctda(const DistributionTree& tree) {
    detail::HeurState st(tree);
    bool added = true;
    while (added) {
        added = false;
        std::deque<NodeIndex> fifo{tree.root()};
        while (!fifo.empty()) {
            NodeIndex s = fifo.front();
            fifo.pop_front();
            ++st.steps;
            if (st.replica[static_cast<std::size_t>(s)]) continue;
            long long in = st.inreq[static_cast<std::size_t>(s)];
            if (in > 0 && in <= tree.node(s).capacity) {
                st.replica[static_cast<std::size_t>(s)] = 1;
                st.absorb_subtree(s);
                added = true;
            } else {
                for (NodeIndex c : tree.node(s).children)
                    if (!tree.node(c).is_client) fifo.push_back(c);
            }
        }
    }
    return st.finish(HeuristicKind::Ctda);
}

// Closest Top Down Largest First: like ctda but the heaviest subtree is
// explored first and the traversal restarts after every placement.
inline HeuristicResult ctdlf(const DistributionTree& tree) {
    detail::HeurState st(tree);
    bool added = true;
    while (added) {
        added = false;
        std::deque<NodeIndex> fifo{tree.root()};
        while (!fifo.empty()) {
            NodeIndex s = fifo.front();
            fifo.pop_front();
            ++st.steps;
            if (st.replica[static_cast<std::size_t>(s)]) continue;
            long long in = st.inreq[static_cast<std::size_t>(s)];
            if (in > 0 && in <= tree.node(s).capacity) {
                st.replica[static_cast<std::size_t>(s)] = 1;
                st.absorb_subtree(s);
                added = true;
                break;  // restart the traversal
            }
            std::vector<NodeIndex> kids;
            for (NodeIndex c : tree.node(s).children)
                if (!tree.node(c).is_client) kids.push_back(c);
            std::stable_sort(kids.begin(), kids.end(), [&](NodeIndex a, NodeIndex b) {
                return st.inreq[static_cast<std::size_t>(a)] > st.inreq[static_cast<std::size_t>(b)];
            });
            for (NodeIndex c : kids) fifo.push_back(c);
        }
    }
    return st.finish(HeuristicKind::Ctdlf);
}

// Closest Bottom Up: postorder; a node that can absorb its whole pending
// subtree becomes a replica.
inline HeuristicResult cbu(const DistributionTree& tree) {
    detail::HeurState st(tree);
    for (NodeIndex s : detail::postorder_internal(tree)) {
        ++st.steps;
        long long in = st.inreq[static_cast<std::size_t>(s)];
        if (in > 0 && in <= tree.node(s).capacity) {
            st.replica[static_cast<std::size_t>(s)] = 1;
            st.absorb_subtree(s);
        }
    }
    return st.finish(HeuristicKind::Cbu);
}

namespace detail {

template <typename Delete>
void top_down_first_pass(HeurState& st, NodeIndex s, Delete&& del) {
    ++st.steps;
    long long in = st.inreq[static_cast<std::size_t>(s)];
    if (in > 0 && in >= st.tree.node(s).capacity) {
        st.replica[static_cast<std::size_t>(s)] = 1;
        del(st, s, st.tree.node(s).capacity);
    }
    for (NodeIndex c : st.tree.node(s).children)
        if (!st.tree.node(c).is_client) top_down_first_pass(st, c, del);
}

template <typename Delete>
void top_down_second_pass(HeurState& st, NodeIndex s, Delete&& del) {
    ++st.steps;
    if (!st.replica[static_cast<std::size_t>(s)] && st.inreq[static_cast<std::size_t>(s)] > 0) {
        st.replica[static_cast<std::size_t>(s)] = 1;
        del(st, s, st.inreq[static_cast<std::size_t>(s)]);
        return;
    }
    for (NodeIndex c : st.tree.node(s).children)
        if (!st.tree.node(c).is_client && st.inreq[static_cast<std::size_t>(c)] > 0)
            top_down_second_pass(st, c, del);
}

}  // namespace detail

// Upwards Top Down: first pass places a replica on every exhausted node
// (inreq >= W) and deletes whole clients, biggest first; the second pass
// adds non-exhausted servers for whatever is left.
inline HeuristicResult utd(const DistributionTree& tree) {
    detail::HeurState st(tree);
    auto del = [](detail::HeurState& s, NodeIndex n, long long b) { detail::delete_whole_desc(s, n, b); };
    detail::top_down_first_pass(st, tree.root(), del);
    detail::top_down_second_pass(st, tree.root(), del);
    return st.finish(HeuristicKind::Utd);
}

// Upwards Big Client First: clients in non-increasing request order; each is
// assigned the ancestor with the least remaining capacity that still fits it
// (ties: the ancestor nearest to the client).
inline HeuristicResult ubcf(const DistributionTree& tree) {
    detail::HeurState st(tree);
    std::vector<NodeIndex> clients;
    for (NodeIndex c : tree.client_nodes())
        if (tree.node(c).requests > 0) clients.push_back(c);
    std::sort(clients.begin(), clients.end(),
              [&](NodeIndex a, NodeIndex b) { return detail::client_before(st, a, b, false); });

    std::vector<long long> cap(static_cast<std::size_t>(tree.size()), 0);
    for (NodeIndex j : tree.internal_nodes()) cap[static_cast<std::size_t>(j)] = tree.node(j).capacity;

    for (NodeIndex i : clients) {
        long long r = tree.node(i).requests;
        NodeIndex best = kNoNode;
        for (NodeIndex a = tree.node(i).parent; a != kNoNode; a = tree.node(a).parent) {
            ++st.steps;
            if (cap[static_cast<std::size_t>(a)] >= r &&
                (best == kNoNode || cap[static_cast<std::size_t>(a)] < cap[static_cast<std::size_t>(best)]))
                best = a;
        }
        if (best == kNoNode) return st.finish(HeuristicKind::Ubcf);  // failure, requests pending
        st.replica[static_cast<std::size_t>(best)] = 1;
        cap[static_cast<std::size_t>(best)] -= r;
        st.serve(i, best, r);
    }
    return st.finish(HeuristicKind::Ubcf);
}

// Multiple Top Down: utd's skeleton with the splitting delete procedure, so
// a server's leftover capacity is taken from the largest remaining client.
inline HeuristicResult mtd(const DistributionTree& tree) {
    detail::HeurState st(tree);
    auto del = [](detail::HeurState& s, NodeIndex n, long long b) { detail::delete_split(s, n, b, false); };
    detail::top_down_first_pass(st, tree.root(), del);
    detail::top_down_second_pass(st, tree.root(), del);
    return st.finish(HeuristicKind::Mtd);
}

// Multiple Bottom Up: postorder first pass over exhausted nodes, deleting
// small clients first with a final partial deletion; top-down second pass.
inline HeuristicResult mbu(const DistributionTree& tree) {
    detail::HeurState st(tree);
    auto del = [](detail::HeurState& s, NodeIndex n, long long b) { detail::delete_split(s, n, b, true); };
    for (NodeIndex s : detail::postorder_internal(tree)) {
        ++st.steps;
        long long in = st.inreq[static_cast<std::size_t>(s)];
        if (in > 0 && in >= tree.node(s).capacity) {
            st.replica[static_cast<std::size_t>(s)] = 1;
            del(st, s, tree.node(s).capacity);
        }
    }
    detail::top_down_second_pass(st, tree.root(), del);
    return st.finish(HeuristicKind::Mbu);
}

// Multiple Greedy: bottom-up maximal absorption, whole clients left to right
// plus one boundary split per node; every absorbing node becomes a replica.
// Finds a solution whenever the instance is feasible under Multiple.
inline HeuristicResult mg(const DistributionTree& tree) {
    detail::HeurState st(tree);
    for (NodeIndex s : detail::postorder_internal(tree)) {
        ++st.steps;
        long long cap = tree.node(s).capacity, load = 0;
        std::vector<NodeIndex> left;
        for (NodeIndex i : st.pending_clients(s)) {
            ++st.steps;
            long long r = st.remaining[static_cast<std::size_t>(i)];
            if (r <= cap - load) {
                st.serve(i, s, r);
                load += r;
            } else {
                left.push_back(i);
            }
        }
        if (!left.empty() && cap - load > 0) {
            st.serve(left.front(), s, cap - load);
            load = cap;
        }
        if (load > 0) st.replica[static_cast<std::size_t>(s)] = 1;
    }
    return st.finish(HeuristicKind::Mg);
}

inline HeuristicResult run_heuristic(HeuristicKind kind, const DistributionTree& tree);

// MixedBest: run all eight heuristics and keep the cheapest success; any
// Closest or Upwards solution is also a Multiple solution.
inline HeuristicResult mixed_best(const DistributionTree& tree) {
    HeuristicResult best;
    best.name = heuristic_name(HeuristicKind::MixedBest);
    best.policy = Policy::Multiple;
    unsigned long long steps = 0;
    bool have = false;
    Ratio best_cost{0};
    long long mg_residual = 0;
    for (HeuristicKind kind : all_heuristic_kinds()) {
        HeuristicResult r = run_heuristic(kind, tree);
        steps += r.steps;
        if (kind == HeuristicKind::Mg) mg_residual = r.residual;
        if (!r.success) continue;
        Ratio cost = placement_cost(tree, r.placement);
        if (!have || cost < best_cost) {
            have = true;
            best_cost = cost;
            best.success = true;
            best.residual = 0;
            best.placement = std::move(r.placement);
            best.assignment = std::move(r.assignment);
        }
    }
    if (!have) best.residual = mg_residual;
    best.steps = steps;
    return best;
}

inline HeuristicResult run_heuristic(HeuristicKind kind, const DistributionTree& tree) {
    switch (kind) {
        case HeuristicKind::Ctda: return ctda(tree);
        case HeuristicKind::Ctdlf: return ctdlf(tree);
        case HeuristicKind::Cbu: return cbu(tree);
        case HeuristicKind::Utd: return utd(tree);
        case HeuristicKind::Ubcf: return ubcf(tree);
        case HeuristicKind::Mtd: return mtd(tree);
        case HeuristicKind::Mbu: return mbu(tree);
        case HeuristicKind::Mg: return mg(tree);
        default: return mixed_best(tree);
    }
}

}  // namespace replitree
