#pragma once

#include "generate.hpp"
#include "heuristics.hpp"
#include "lp.hpp"
#include "oracle.hpp"
#include "tree.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace replitree {

// Reference costs come either from the built-in exact Multiple oracle (desk
// scale) or from a directory of imported solver solutions, one file per
// instance id, in the solver output exchange format.
struct CampaignConfig {
    std::vector<std::string> lambda_labels;
    std::vector<Ratio> lambdas;
    int trees_per_lambda = 30;
    GeneratorParams generator;  // target_lambda and seed are set per instance
    std::vector<HeuristicKind> heuristics = {
        HeuristicKind::Ctda, HeuristicKind::Ctdlf, HeuristicKind::Cbu,
        HeuristicKind::Utd,  HeuristicKind::Ubcf,  HeuristicKind::Mtd,
        HeuristicKind::Mbu,  HeuristicKind::Mg,    HeuristicKind::MixedBest};
    bool reference_is_oracle = true;
    std::string reference_dir;
    int oracle_cap = 16;
    int workers = 1;
    std::uint64_t seed = 1;
};

struct CampaignCell {
    std::string lambda;
    std::string heuristic;
    int instances = 0;
    int successes = 0;
    double success_pct = 0;
    double rcost = 0;
};

struct CampaignReport {
    std::vector<CampaignCell> cells;  // lambda-major, heuristic order as configured
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct InstanceOutcome {
    bool reference_feasible = false;
    double reference_cost = 0;
    std::vector<char> success;    // per configured heuristic
    std::vector<double> cost;     // valid when success
};

}  // namespace detail

inline std::string campaign_instance_id(const std::string& lambda_label, int index) {
    return "lam" + lambda_label + "_t" + std::to_string(index + 1);
}

// key = value configuration, '#' comments:
//   lambdas = 0.1,0.2,0.3      trees_per_lambda = 30
//   size_min/size_max, internal_min/internal_max, mode = homogeneous|heterogeneous
//   capacity (homogeneous), capacity_min/capacity_max (heterogeneous)
//   branch_min/branch_max, seed, workers, oracle_cap
//   heuristics = ctda,ctdlf,... (default: all eight plus mixedbest)
//   reference = oracle | <directory of solution files>
inline CampaignConfig parse_campaign_config(const std::string& text) {
    CampaignConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (!blank) throw ParseError(lineno, "expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(lineno, "expected key = value");
        kv[key] = value;
    }

    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(s);
        while (std::getline(ss, item, ',')) {
            while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.erase(0, 1);
            while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.pop_back();
            if (!item.empty()) out.push_back(item);
        }
        return out;
    };
    auto get_int = [&](const char* key, long long dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        return static_cast<long long>(std::stoll(it->second));
    };

    if (kv.count("lambdas")) {
        for (const std::string& label : split_list(kv["lambdas"])) {
            cfg.lambda_labels.push_back(label);
            cfg.lambdas.push_back(ratio_from_decimal(label));
        }
    } else {
        for (const char* label : {"0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"}) {
            cfg.lambda_labels.push_back(label);
            cfg.lambdas.push_back(ratio_from_decimal(label));
        }
    }
    cfg.trees_per_lambda = static_cast<int>(get_int("trees_per_lambda", 30));
    cfg.generator.size_min = static_cast<int>(get_int("size_min", 15));
    cfg.generator.size_max = static_cast<int>(get_int("size_max", 400));
    cfg.generator.internal_min = static_cast<int>(get_int("internal_min", 0));
    cfg.generator.internal_max = static_cast<int>(get_int("internal_max", 0));
    cfg.generator.capacity = get_int("capacity", 100);
    cfg.generator.capacity_min = get_int("capacity_min", 10);
    cfg.generator.capacity_max = get_int("capacity_max", 200);
    cfg.generator.branch_min = static_cast<int>(get_int("branch_min", 1));
    cfg.generator.branch_max = static_cast<int>(get_int("branch_max", 4));
    cfg.seed = static_cast<std::uint64_t>(get_int("seed", 1));
    cfg.workers = static_cast<int>(get_int("workers", 1));
    cfg.oracle_cap = static_cast<int>(get_int("oracle_cap", 16));
    if (kv.count("mode")) {
        if (kv["mode"] == "heterogeneous") cfg.generator.heterogeneous = true;
        else if (kv["mode"] == "homogeneous") cfg.generator.heterogeneous = false;
        else throw std::invalid_argument("mode must be homogeneous or heterogeneous");
    }
    if (kv.count("heuristics")) {
        cfg.heuristics.clear();
        for (const std::string& name : split_list(kv["heuristics"])) {
            bool found = false;
            for (HeuristicKind k : all_heuristic_kinds())
                if (name == heuristic_name(k)) {
                    cfg.heuristics.push_back(k);
                    found = true;
                }
            if (name == "mixedbest") {
                cfg.heuristics.push_back(HeuristicKind::MixedBest);
                found = true;
            }
            if (!found) throw std::invalid_argument("unknown heuristic '" + name + "'");
        }
    }
    if (kv.count("reference") && kv["reference"] != "oracle") {
        cfg.reference_is_oracle = false;
        cfg.reference_dir = kv["reference"];
    }
    return cfg;
}

namespace detail {

inline InstanceOutcome evaluate_instance(const CampaignConfig& cfg, std::size_t lambda_ix,
                                         int tree_ix) {
    GeneratorParams params = cfg.generator;
    params.target_lambda = cfg.lambdas[lambda_ix];
    params.seed = splitmix64(cfg.seed ^ splitmix64((lambda_ix + 1) * 0x51ED2700c3ull + tree_ix));
    DistributionTree tree = generate_tree(params);

    InstanceOutcome out;
    if (cfg.reference_is_oracle) {
        OracleOptions opt;
        opt.max_internal = cfg.oracle_cap;
        OracleResult ref = exact_multiple(tree, opt);
        out.reference_feasible = ref.feasible;
        if (ref.feasible) out.reference_cost = ratio_to_double(ref.cost);
    } else {
        std::string id = campaign_instance_id(cfg.lambda_labels[lambda_ix], tree_ix);
        std::ifstream in(cfg.reference_dir + "/" + id + ".sol");
        if (!in) throw std::runtime_error("missing reference solution for instance " + id);
        std::stringstream buf;
        buf << in.rdbuf();
        SolverSolution sol = parse_solver_output(buf.str());
        if (sol.status != SolutionStatus::Infeasible) {
            if (!sol.declared_objective)
                throw std::runtime_error("reference for " + id + " lacks an objective");
            out.reference_feasible = true;
            out.reference_cost = *sol.declared_objective;
        }
    }
    for (HeuristicKind kind : cfg.heuristics) {
        HeuristicResult r = run_heuristic(kind, tree);
        out.success.push_back(r.success ? 1 : 0);
        out.cost.push_back(r.success ? ratio_to_double(placement_cost(tree, r.placement)) : 0.0);
    }
    return out;
}

}  // namespace detail

// Runs every configured heuristic over trees_per_lambda instances per
// lambda. Success is counted over all instances; rcost averages
// reference/heuristic cost over the instances the reference could solve,
// with failed runs contributing zero.
inline CampaignReport run_campaign(const CampaignConfig& cfg) {
    std::vector<detail::InstanceOutcome> outcomes(
        cfg.lambdas.size() * static_cast<std::size_t>(cfg.trees_per_lambda));

    auto work = [&](int worker) {
        for (std::size_t flat = static_cast<std::size_t>(worker); flat < outcomes.size();
             flat += static_cast<std::size_t>(std::max(1, cfg.workers))) {
            std::size_t lambda_ix = flat / static_cast<std::size_t>(cfg.trees_per_lambda);
            int tree_ix = static_cast<int>(flat % static_cast<std::size_t>(cfg.trees_per_lambda));
            outcomes[flat] = detail::evaluate_instance(cfg, lambda_ix, tree_ix);
        }
    };
    if (cfg.workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    CampaignReport report;
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        int solvable = 0;
        for (int t = 0; t < cfg.trees_per_lambda; ++t)
            if (outcomes[li * cfg.trees_per_lambda + t].reference_feasible) ++solvable;
        for (std::size_t hi = 0; hi < cfg.heuristics.size(); ++hi) {
            CampaignCell cell;
            cell.lambda = cfg.lambda_labels[li];
            cell.heuristic = heuristic_name(cfg.heuristics[hi]);
            cell.instances = cfg.trees_per_lambda;
            double rcost_sum = 0;
            for (int t = 0; t < cfg.trees_per_lambda; ++t) {
                const auto& oc = outcomes[li * cfg.trees_per_lambda + t];
                if (oc.success[hi]) ++cell.successes;
                if (oc.reference_feasible && oc.success[hi] && oc.cost[hi] > 0)
                    rcost_sum += oc.reference_cost / oc.cost[hi];
            }
            cell.success_pct =
                cell.instances == 0 ? 0 : 100.0 * cell.successes / cell.instances;
            cell.rcost = solvable == 0 ? 0 : rcost_sum / solvable;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

// One row per (lambda, heuristic); fixed columns, deterministic values.
inline std::string emit_csv(const CampaignReport& report) {
    std::string out = "lambda,heuristic,instances,successes,success_pct,rcost\n";
    char buf[64];
    for (const CampaignCell& c : report.cells) {
        out += c.lambda + "," + c.heuristic + "," + std::to_string(c.instances) + "," +
               std::to_string(c.successes) + ",";
        std::snprintf(buf, sizeof buf, "%.6f", c.success_pct);
        out += buf;
        std::snprintf(buf, sizeof buf, ",%.6f", c.rcost);
        out += buf;
        out += "\n";
    }
    return out;
}

}  // namespace replitree
