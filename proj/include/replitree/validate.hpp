#pragma once

#include "solution.hpp"
#include "tree.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace replitree {

// Closest: all requests of a client go to the first replica on its path to
// the root. Upwards: a single replica anywhere on that path. Multiple: the
// requests may be split among several replicas on the path.
enum class Policy { Closest, Upwards, Multiple };

inline const char* policy_name(Policy p) {
    switch (p) {
        case Policy::Closest: return "closest";
        case Policy::Upwards: return "upwards";
        default: return "multiple";
    }
}

// Which optional constraint families are active for an instance.
struct ConstraintProfile {
    bool qos_active = false;
    bool bandwidth_active = false;
};

enum class ViolationKind { Structure, Completeness, Capacity, Policy, QoS, Bandwidth };

inline const char* violation_kind_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::Structure: return "structure";
        case ViolationKind::Completeness: return "completeness";
        case ViolationKind::Capacity: return "capacity";
        case ViolationKind::Policy: return "policy";
        case ViolationKind::QoS: return "qos";
        default: return "bandwidth";
    }
}

struct Violation {
    ViolationKind kind;
    std::string location;  // node / client / link id
    std::string measured;
    std::string limit;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    void add(ViolationKind kind, std::string location, std::string measured, std::string limit,
             std::string detail) {
        violations.push_back({kind, std::move(location), std::move(measured), std::move(limit),
                              std::move(detail)});
    }
    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    }
};

namespace detail {

inline std::map<NodeIndex, long long> server_loads(const Assignment& assignment) {
    std::map<NodeIndex, long long> loads;
    for (const auto& [key, count] : assignment.served) loads[key.second] += count;
    return loads;
}

}  // namespace detail

// Servers must be internal nodes, members of the placement, and lie on the
// client's path to the root.
inline ValidationReport check_structure(const DistributionTree& tree, const Placement& placement,
                                        const Assignment& assignment) {
    ValidationReport report;
    for (NodeIndex j : placement.replicas) {
        if (tree.node(j).is_client)
            report.add(ViolationKind::Structure, tree.node(j).id, "client", "internal node",
                       "replica placed on a client");
    }
    for (const auto& [key, count] : assignment.served) {
        auto [client, server] = key;
        const std::string& cid = tree.node(client).id;
        const std::string& sid = tree.node(server).id;
        if (!tree.node(client).is_client)
            report.add(ViolationKind::Structure, cid, "internal", "client",
                       "assignment source is not a client");
        if (tree.node(server).is_client)
            report.add(ViolationKind::Structure, sid, "client", "internal node",
                       "assignment target is not an internal node");
        else if (tree.node(client).is_client && !tree.is_ancestor(server, client))
            report.add(ViolationKind::Structure, cid, sid, "ancestor of " + cid,
                       "server is not on the client's path to the root");
        if (!placement.contains(server))
            report.add(ViolationKind::Structure, sid, "not in placement", "replica",
                       "assignment uses a node without a replica");
        (void)count;
    }
    return report;
}

// No server capacity can be exceeded.
inline ValidationReport check_capacity(const DistributionTree& tree, const Placement& placement,
                                       const Assignment& assignment) {
    (void)placement;
    ValidationReport report;
    for (const auto& [server, load] : detail::server_loads(assignment)) {
        if (tree.node(server).is_client) continue;  // reported by check_structure
        if (load > tree.node(server).capacity)
            report.add(ViolationKind::Capacity, tree.node(server).id, std::to_string(load),
                       std::to_string(tree.node(server).capacity), "server capacity exceeded");
    }
    return report;
}

// Communication time from client to each of its servers within q_i.
inline ValidationReport check_qos(const DistributionTree& tree, const Assignment& assignment) {
    ValidationReport report;
    for (const auto& [key, count] : assignment.served) {
        auto [client, server] = key;
        if (count <= 0) continue;
        if (!tree.node(client).is_client || !tree.node(client).qos) continue;
        if (!tree.is_ancestor(server, client)) continue;  // structural, reported elsewhere
        Ratio d = tree.distance(client, server);
        if (d > *tree.node(client).qos)
            report.add(ViolationKind::QoS, tree.node(client).id + "->" + tree.node(server).id,
                       ratio_to_string(d), ratio_to_string(*tree.node(client).qos),
                       "QoS bound exceeded");
    }
    return report;
}

// Total traffic crossing each link within its bandwidth.
inline ValidationReport check_bandwidth(const DistributionTree& tree,
                                        const Assignment& assignment) {
    ValidationReport report;
    std::map<NodeIndex, long long> traffic;  // keyed by the lower endpoint of the link
    for (const auto& [key, count] : assignment.served) {
        auto [client, server] = key;
        if (!tree.node(client).is_client || !tree.is_ancestor(server, client)) continue;
        for (NodeIndex k = client; k != server; k = tree.node(k).parent) traffic[k] += count;
    }
    for (const auto& [child, load] : traffic) {
        const TreeNode& n = tree.node(child);
        if (n.bandwidth && load > *n.bandwidth)
            report.add(ViolationKind::Bandwidth, n.id + "->" + tree.node(n.parent).id,
                       std::to_string(load), std::to_string(*n.bandwidth),
                       "link bandwidth exceeded");
    }
    return report;
}

// Multiple: completeness only. Upwards: additionally one server per client.
// Closest: additionally that server is the first replica on the path to the
// root. Clients with zero requests need no server under any policy.
inline ValidationReport check_policy(const DistributionTree& tree, const Placement& placement,
                                     const Assignment& assignment, Policy policy) {
    ValidationReport report;
    for (NodeIndex client : tree.client_nodes()) {
        const TreeNode& c = tree.node(client);
        long long served = assignment.served_of_client(client);
        if (served != c.requests)
            report.add(ViolationKind::Completeness, c.id, std::to_string(served),
                       std::to_string(c.requests), "client requests not fully served");
        if (policy == Policy::Multiple || c.requests == 0) continue;

        auto servers = assignment.servers_of(client);
        if (servers.size() != 1) {
            report.add(ViolationKind::Policy, c.id, std::to_string(servers.size()), "1",
                       "single-server policy requires exactly one server");
            continue;
        }
        if (policy == Policy::Closest) {
            NodeIndex server = servers.front();
            if (!tree.is_ancestor(server, client)) continue;  // reported by check_structure
            for (NodeIndex a = tree.node(client).parent; a != kNoNode; a = tree.node(a).parent) {
                if (a == server) break;
                if (placement.contains(a)) {
                    report.add(ViolationKind::Policy, c.id, tree.node(server).id, tree.node(a).id,
                               "a closer replica exists on the path");
                    break;
                }
            }
        }
    }
    return report;
}

// Conjunction of all checks; QoS and bandwidth only when active in the
// profile. Errors never throw here, they become violations.
inline ValidationReport validate_all(const DistributionTree& tree, const Placement& placement,
                                     const Assignment& assignment, Policy policy,
                                     const ConstraintProfile& profile) {
    ValidationReport report = check_structure(tree, placement, assignment);
    report.merge(check_capacity(tree, placement, assignment));
    report.merge(check_policy(tree, placement, assignment, policy));
    if (profile.qos_active) report.merge(check_qos(tree, assignment));
    if (profile.bandwidth_active) report.merge(check_bandwidth(tree, assignment));
    return report;
}

}  // namespace replitree
