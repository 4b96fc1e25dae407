#pragma once

#include <replitree/generate.hpp>
#include <replitree/tree.hpp>

#include <random>
#include <sstream>
#include <string>

namespace fixtures {

using replitree::DistributionTree;

// Two stacked nodes s2 (root) and s1, capacity 1 each. Variant (a): one
// client with one request; (b): two clients with one request each;
// (c): one client with two requests.
inline DistributionTree fig1(char variant) {
    std::string text =
        "node s2 1 1\n"
        "node s1 1 1 parent s2 comm 1 bw inf\n";
    if (variant == 'a') text += "client c1 requests 1 qos inf parent s1 comm 1 bw inf\n";
    if (variant == 'b')
        text +=
            "client c1 requests 1 qos inf parent s1 comm 1 bw inf\n"
            "client c2 requests 1 qos inf parent s1 comm 1 bw inf\n";
    if (variant == 'c') text += "client c1 requests 2 qos inf parent s1 comm 1 bw inf\n";
    return replitree::parse_tree(text);
}

// Upwards-vs-Closest separation family: the root s_{2n+2} has a client and
// one child s_{2n+1}, which fans out to 2n nodes s_1..s_2n, each shielding
// a single unit client. All capacities are n. Optimal: Upwards 3 replicas,
// Closest n+2.
inline DistributionTree fig2(int n) {
    std::ostringstream out;
    out << "node s" << (2 * n + 2) << " " << n << " 1\n";
    out << "client c0 requests 1 qos inf parent s" << (2 * n + 2) << " comm 1 bw inf\n";
    out << "node s" << (2 * n + 1) << " " << n << " 1 parent s" << (2 * n + 2)
        << " comm 1 bw inf\n";
    for (int j = 1; j <= 2 * n; ++j) {
        out << "node s" << j << " " << n << " 1 parent s" << (2 * n + 1) << " comm 1 bw inf\n";
        out << "client c" << j << " requests 1 qos inf parent s" << j << " comm 1 bw inf\n";
    }
    return replitree::parse_tree(out.str());
}

// Multiple-vs-Upwards homogeneous family: root with a client of n requests
// and n children s_j; each s_j has children v_j and w_j shielding clients
// of n and n+1 requests. Capacities 2n. Optimal: Multiple n+1, Upwards 2n.
inline DistributionTree fig3(int n) {
    std::ostringstream out;
    long long w = 2 * n;
    out << "node r " << w << " 1\n";
    for (int j = 1; j <= n; ++j) {
        out << "node s" << j << " " << w << " 1 parent r comm 1 bw inf\n";
        out << "node v" << j << " " << w << " 1 parent s" << j << " comm 1 bw inf\n";
        out << "node w" << j << " " << w << " 1 parent s" << j << " comm 1 bw inf\n";
        out << "client cv" << j << " requests " << n << " qos inf parent v" << j
            << " comm 1 bw inf\n";
        out << "client cw" << j << " requests " << (n + 1) << " qos inf parent w" << j
            << " comm 1 bw inf\n";
    }
    out << "client cr requests " << n << " qos inf parent r comm 1 bw inf\n";
    return replitree::parse_tree(out.str());
}

// Multiple-vs-Upwards heterogeneous family (storage cost = capacity):
// root s1 (capacity n) holds a client of n-1 requests; below it s2
// (capacity n) and s3 (capacity K*n) shield a client of n+1 requests.
// Optimal: Multiple 2n via {s1,s2}, Upwards (K+1)n via {s1,s3}.
inline DistributionTree fig4(int n, int k = 3) {
    std::ostringstream out;
    out << "node s1 " << n << " " << n << "\n";
    out << "client c1 requests " << (n - 1) << " qos inf parent s1 comm 1 bw inf\n";
    out << "node s2 " << n << " " << n << " parent s1 comm 1 bw inf\n";
    out << "node s3 " << (static_cast<long long>(k) * n) << " "
        << (static_cast<long long>(k) * n) << " parent s2 comm 1 bw inf\n";
    out << "client c2 requests " << (n + 1) << " qos inf parent s3 comm 1 bw inf\n";
    return replitree::parse_tree(out.str());
}

// Lower-bound family: the root holds a client of W requests and n children
// s_j, each shielding a client of W/n requests. Every policy needs n+1
// replicas while ceil(total/W) = 2. W must be divisible by n.
inline DistributionTree fig5(int n, long long w = 6) {
    std::ostringstream out;
    out << "node r " << w << " 1\n";
    out << "client c0 requests " << w << " qos inf parent r comm 1 bw inf\n";
    for (int j = 1; j <= n; ++j) {
        out << "node s" << j << " " << w << " 1 parent r comm 1 bw inf\n";
        out << "client c" << j << " requests " << (w / n) << " qos inf parent s" << j
            << " comm 1 bw inf\n";
    }
    return replitree::parse_tree(out.str());
}

// Worked example for the optimal Multiple algorithm, W = 10. Pass 1
// saturates n10, n3 and the root n1 (link flows 2/4/6, 3/4/7/5/5, 7, 8);
// pass 2 picks n4 (useful flow 7) then n2 (useful flow 1); pass 3 splits
// the 12-request client 10/2 between n10 and n2 and leaves 5 at the root.
inline DistributionTree fig6() {
    return replitree::parse_tree(
        "node n1 10 1\n"
        "node n2 10 1 parent n1 comm 1 bw inf\n"
        "node n10 10 1 parent n2 comm 1 bw inf\n"
        "client c12 requests 12 qos inf parent n10 comm 1 bw inf\n"
        "node n9 10 1 parent n2 comm 1 bw inf\n"
        "client ca requests 4 qos inf parent n9 comm 1 bw inf\n"
        "node n3 10 1 parent n1 comm 1 bw inf\n"
        "node n5 10 1 parent n3 comm 1 bw inf\n"
        "node n7 10 1 parent n5 comm 1 bw inf\n"
        "client cb requests 3 qos inf parent n7 comm 1 bw inf\n"
        "node n8 10 1 parent n5 comm 1 bw inf\n"
        "client cc requests 4 qos inf parent n8 comm 1 bw inf\n"
        "node n6 10 1 parent n3 comm 1 bw inf\n"
        "client cd requests 5 qos inf parent n6 comm 1 bw inf\n"
        "client ce requests 3 qos inf parent n3 comm 1 bw inf\n"
        "node n4 10 1 parent n1 comm 1 bw inf\n"
        "client cf requests 7 qos inf parent n4 comm 1 bw inf\n");
}

// chain of n_internal nodes, one unit client per node
inline DistributionTree chain(int n_internal, long long w, long long r = 1) {
    std::ostringstream out;
    out << "node n1 " << w << " 1\n";
    out << "client c1 requests " << r << " qos inf parent n1 comm 1 bw inf\n";
    for (int j = 2; j <= n_internal; ++j) {
        out << "node n" << j << " " << w << " 1 parent n" << (j - 1) << " comm 1 bw inf\n";
        out << "client c" << j << " requests " << r << " qos inf parent n" << j
            << " comm 1 bw inf\n";
    }
    return replitree::parse_tree(out.str());
}

// root plus (n_internal - 1) children, one unit client per child node
inline DistributionTree star(int n_internal, long long w, long long r = 1) {
    std::ostringstream out;
    out << "node n1 " << w << " 1\n";
    for (int j = 2; j <= n_internal; ++j) {
        out << "node n" << j << " " << w << " 1 parent n1 comm 1 bw inf\n";
        out << "client c" << j << " requests " << r << " qos inf parent n" << j
            << " comm 1 bw inf\n";
    }
    return replitree::parse_tree(out.str());
}

// Small random instances for oracle cross-checks; independent of the
// library's campaign generator on purpose.
struct SmallRandom {
    int max_internal = 8;
    int max_clients = 10;
    bool heterogeneous = false;
    long long cap_min = 1, cap_max = 8;
    long long req_min = 0, req_max = 6;
};

inline DistributionTree small_random_tree(std::mt19937_64& rng, const SmallRandom& opt = {}) {
    auto below = [&](std::uint64_t n) {
        return static_cast<long long>((static_cast<unsigned __int128>(rng()) * n) >> 64);
    };
    int n_internal = 1 + static_cast<int>(below(static_cast<std::uint64_t>(opt.max_internal)));
    int n_clients = 1 + static_cast<int>(below(static_cast<std::uint64_t>(opt.max_clients)));
    long long w = opt.cap_min + below(static_cast<std::uint64_t>(opt.cap_max - opt.cap_min + 1));
    std::ostringstream out;
    for (int j = 1; j <= n_internal; ++j) {
        long long cap =
            opt.heterogeneous
                ? opt.cap_min + below(static_cast<std::uint64_t>(opt.cap_max - opt.cap_min + 1))
                : w;
        out << "node n" << j << " " << cap << " " << (opt.heterogeneous ? cap : 1);
        if (j > 1) out << " parent n" << (1 + below(static_cast<std::uint64_t>(j - 1))) << " comm 1 bw inf";
        out << "\n";
    }
    for (int c = 1; c <= n_clients; ++c) {
        long long r = opt.req_min + below(static_cast<std::uint64_t>(opt.req_max - opt.req_min + 1));
        out << "client c" << c << " requests " << r << " qos inf parent n"
            << (1 + below(static_cast<std::uint64_t>(n_internal))) << " comm 1 bw inf\n";
    }
    return replitree::parse_tree(out.str());
}

}  // namespace fixtures
