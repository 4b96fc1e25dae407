#pragma once

#include "tree.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace replitree {

struct GeneratorParams {
    Ratio target_lambda{1, 2};  // total requests / total capacity
    int size_min = 15;          // s = |C| + |N|
    int size_max = 400;
    int internal_min = 0;       // 0 = derive from size (30%..70% internal)
    int internal_max = 0;
    bool heterogeneous = false;
    long long capacity = 100;   // homogeneous W; sc_j = 1
    long long capacity_min = 10;  // heterogeneous draw range; sc_j = W_j
    long long capacity_max = 200;
    int branch_min = 1;         // per-node budget of internal children
    int branch_max = 4;
    std::uint64_t seed = 0;
};

namespace detail {

// Unbiased enough for experiment purposes and, unlike the std
// distributions, identical across standard libraries.
inline std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline long long rng_range(std::mt19937_64& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(rng_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace detail

// Random instance generation: sequential attachment of internal nodes under
// a per-node branching budget, clients attached uniformly, request volumes
// rescaled so the load matches target_lambda as closely as integer requests
// allow. A fixed seed reproduces the tree exactly.
inline DistributionTree generate_tree(const GeneratorParams& p) {
    if (p.size_min < 2 || p.size_max < p.size_min)
        throw std::invalid_argument("size range must allow one node and one client");
    if (p.branch_min < 1 || p.branch_max < p.branch_min)
        throw std::invalid_argument("branching range must be positive");
    if (p.target_lambda <= Ratio(0)) throw std::invalid_argument("target lambda must be positive");
    if (p.heterogeneous && (p.capacity_min < 1 || p.capacity_max < p.capacity_min))
        throw std::invalid_argument("bad capacity range");
    if (!p.heterogeneous && p.capacity < 1) throw std::invalid_argument("bad capacity");

    std::mt19937_64 rng(p.seed);
    int s = static_cast<int>(detail::rng_range(rng, p.size_min, p.size_max));
    int n_internal;
    if (p.internal_min > 0) {
        if (p.internal_max < p.internal_min) throw std::invalid_argument("bad internal range");
        n_internal = static_cast<int>(detail::rng_range(rng, p.internal_min, p.internal_max));
        n_internal = std::min(n_internal, s - 1);
    } else {
        int lo = std::max(1, s * 3 / 10), hi = std::max(lo, s * 7 / 10);
        n_internal = static_cast<int>(detail::rng_range(rng, lo, hi));
    }
    n_internal = std::max(1, std::min(n_internal, s - 1));
    int n_clients = s - n_internal;

    // topology
    std::vector<int> parent(static_cast<std::size_t>(n_internal), -1);
    std::vector<int> budget(static_cast<std::size_t>(n_internal), 0);
    std::vector<int> internal_kids(static_cast<std::size_t>(n_internal), 0);
    for (int k = 0; k < n_internal; ++k)
        budget[static_cast<std::size_t>(k)] =
            static_cast<int>(detail::rng_range(rng, p.branch_min, p.branch_max));
    for (int k = 1; k < n_internal; ++k) {
        std::vector<int> open;
        for (int j = 0; j < k; ++j)
            if (internal_kids[static_cast<std::size_t>(j)] < budget[static_cast<std::size_t>(j)])
                open.push_back(j);
        if (open.empty()) throw std::invalid_argument("branching budget cannot host the tree");
        int pick = open[detail::rng_below(rng, open.size())];
        parent[static_cast<std::size_t>(k)] = pick;
        ++internal_kids[static_cast<std::size_t>(pick)];
    }
    std::vector<int> client_parent(static_cast<std::size_t>(n_clients), 0);
    for (int c = 0; c < n_clients; ++c)
        client_parent[static_cast<std::size_t>(c)] =
            static_cast<int>(detail::rng_below(rng, static_cast<std::uint64_t>(n_internal)));

    // capacities
    std::vector<long long> cap(static_cast<std::size_t>(n_internal), p.capacity);
    if (p.heterogeneous)
        for (auto& w : cap) w = detail::rng_range(rng, p.capacity_min, p.capacity_max);
    long long total_cap = std::accumulate(cap.begin(), cap.end(), 0LL);

    // requests: raw draws rescaled to the target load
    std::vector<long long> raw(static_cast<std::size_t>(n_clients), 0);
    for (auto& r : raw) r = detail::rng_range(rng, 1, 100);
    long long raw_sum = std::accumulate(raw.begin(), raw.end(), 0LL);
    Ratio target_total = p.target_lambda * Ratio(total_cap);
    long long want = (2 * target_total.numerator() + target_total.denominator()) /
                     (2 * target_total.denominator());  // round to nearest
    std::vector<long long> req(static_cast<std::size_t>(n_clients), 0);
    std::vector<std::pair<long long, int>> frac;  // (remainder, client) for residual +1s
    long long assigned = 0;
    for (int c = 0; c < n_clients; ++c) {
        long long num = raw[static_cast<std::size_t>(c)] * want;
        req[static_cast<std::size_t>(c)] = num / raw_sum;
        assigned += req[static_cast<std::size_t>(c)];
        frac.emplace_back(num % raw_sum, c);
    }
    std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long long k = 0; k < want - assigned && k < n_clients; ++k)
        ++req[static_cast<std::size_t>(frac[static_cast<std::size_t>(k)].second)];

    std::ostringstream out;
    for (int k = 0; k < n_internal; ++k) {
        out << "node n" << (k + 1) << " " << cap[static_cast<std::size_t>(k)] << " "
            << (p.heterogeneous ? std::to_string(cap[static_cast<std::size_t>(k)]) : "1");
        if (k > 0) out << " parent n" << (parent[static_cast<std::size_t>(k)] + 1) << " comm 1 bw inf";
        out << "\n";
    }
    for (int c = 0; c < n_clients; ++c)
        out << "client c" << (c + 1) << " requests " << req[static_cast<std::size_t>(c)]
            << " qos inf parent n" << (client_parent[static_cast<std::size_t>(c)] + 1)
            << " comm 1 bw inf\n";
    return parse_tree(out.str());
}

}  // namespace replitree
