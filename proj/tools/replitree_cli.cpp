// replitree command line front end.
//
// Exit codes: 0 success, 1 infeasible instance or invalid solution,
// 2 usage or parse errors. Machine-readable output goes to stdout,
// diagnostics to stderr.

#include <replitree/replitree.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

replitree::Policy parse_policy(const std::string& name) {
    if (name == "closest") return replitree::Policy::Closest;
    if (name == "upwards") return replitree::Policy::Upwards;
    if (name == "multiple") return replitree::Policy::Multiple;
    throw CLI::ValidationError("--policy must be closest, upwards or multiple");
}

replitree::ConstraintProfile parse_profile(const std::string& name) {
    replitree::ConstraintProfile profile;
    if (name == "none") return profile;
    if (name == "qos") {
        profile.qos_active = true;
    } else if (name == "bw") {
        profile.bandwidth_active = true;
    } else if (name == "qos+bw") {
        profile.qos_active = profile.bandwidth_active = true;
    } else {
        throw CLI::ValidationError("--profile must be none, qos, bw or qos+bw");
    }
    return profile;
}

void print_report(const replitree::ValidationReport& report) {
    for (const auto& v : report.violations)
        std::cout << "violation " << replitree::violation_kind_name(v.kind) << " " << v.location
                  << " measured=" << v.measured << " limit=" << v.limit << " # " << v.detail
                  << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"replica placement on distribution trees"};
    app.require_subcommand(1);

    std::string tree_path, solution_path, out_path, algo = "optimal-multiple";
    std::string policy_name = "multiple", profile_name = "none", relax_name = "int";
    std::string config_path;
    int oracle_cap = 16, workers = 1;
    std::uint64_t seed = 0;
    replitree::GeneratorParams gen;
    std::string lambda_text = "0.5";

    auto* solve = app.add_subcommand("solve", "run a heuristic or the optimal Multiple algorithm");
    solve->add_option("--tree", tree_path, "tree file")->required();
    solve->add_option("--algo", algo,
                      "optimal-multiple | ctda | ctdlf | cbu | utd | ubcf | mtd | mbu | mg | "
                      "mixedbest");
    solve->add_option("--out", out_path, "solution file (default stdout)");

    auto* validate = app.add_subcommand("validate", "grade a solution file");
    validate->add_option("--tree", tree_path, "tree file")->required();
    validate->add_option("--solution", solution_path, "solution file")->required();
    validate->add_option("--policy", policy_name, "closest | upwards | multiple")->required();
    validate->add_option("--profile", profile_name, "none | qos | bw | qos+bw");

    auto* oracle = app.add_subcommand("oracle", "exact optimum by exhaustive search");
    oracle->add_option("--tree", tree_path, "tree file")->required();
    oracle->add_option("--policy", policy_name, "closest | upwards | multiple")->required();
    oracle->add_option("--cap", oracle_cap, "max internal nodes the search accepts");
    oracle->add_option("--out", out_path, "witness solution file (default stdout)");

    auto* lower = app.add_subcommand("lower-bound", "ceil(requests / W) for homogeneous trees");
    lower->add_option("--tree", tree_path, "tree file")->required();

    auto* exportlp = app.add_subcommand("export-lp", "write the ILP in CPLEX LP format");
    exportlp->add_option("--tree", tree_path, "tree file")->required();
    exportlp->add_option("--policy", policy_name, "closest | upwards | multiple")->required();
    exportlp->add_option("--profile", profile_name, "none | qos | bw | qos+bw");
    exportlp->add_option("--relax", relax_name, "int | rational | refined-x");
    exportlp->add_option("--out", out_path, "LP file (default stdout)");

    auto* import = app.add_subcommand("import-solution", "read a solver's solution back");
    import->add_option("--tree", tree_path, "tree file")->required();
    import->add_option("--policy", policy_name, "closest | upwards | multiple")->required();
    import->add_option("--profile", profile_name, "none | qos | bw | qos+bw");
    import->add_option("--relax", relax_name, "int | rational | refined-x");
    import->add_option("--solution", solution_path, "solver output file")->required();

    auto* generate = app.add_subcommand("generate", "random instance generation");
    generate->add_option("--seed", seed, "generator seed")->required();
    generate->add_option("--lambda", lambda_text, "target load");
    generate->add_option("--size-min", gen.size_min, "min |C|+|N|");
    generate->add_option("--size-max", gen.size_max, "max |C|+|N|");
    generate->add_option("--internal-min", gen.internal_min, "min internal nodes");
    generate->add_option("--internal-max", gen.internal_max, "max internal nodes");
    generate->add_flag("--heterogeneous", gen.heterogeneous, "draw capacities, sc_j = W_j");
    generate->add_option("--capacity", gen.capacity, "homogeneous capacity");
    generate->add_option("--capacity-min", gen.capacity_min, "heterogeneous capacity range");
    generate->add_option("--capacity-max", gen.capacity_max, "heterogeneous capacity range");
    generate->add_option("--branch-min", gen.branch_min, "branching budget range");
    generate->add_option("--branch-max", gen.branch_max, "branching budget range");
    generate->add_option("--out", out_path, "tree file (default stdout)");

    auto* campaign = app.add_subcommand("campaign", "run an experiment campaign, emit CSV");
    campaign->add_option("--config", config_path, "campaign configuration file")->required();
    campaign->add_option("--workers", workers, "parallel instance evaluations");
    campaign->add_option("--out", out_path, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            auto tree = replitree::parse_tree(slurp(tree_path));
            replitree::Placement placement;
            replitree::Assignment assignment;
            if (algo == "optimal-multiple") {
                auto outcome = replitree::solve_multiple_homogeneous(tree);
                if (!outcome.feasible) {
                    std::cerr << "no solution: residual " << outcome.residual
                              << " requests at root\n";
                    return kExitInfeasible;
                }
                placement = std::move(outcome.placement);
                assignment = std::move(outcome.assignment);
            } else {
                std::optional<replitree::HeuristicKind> kind;
                for (replitree::HeuristicKind k : replitree::all_heuristic_kinds())
                    if (algo == replitree::heuristic_name(k)) kind = k;
                if (algo == "mixedbest") kind = replitree::HeuristicKind::MixedBest;
                if (!kind) {
                    std::cerr << "unknown algorithm '" << algo << "'\n";
                    return kExitUsage;
                }
                auto result = replitree::run_heuristic(*kind, tree);
                if (!result.success) {
                    std::cerr << "no solution: residual " << result.residual
                              << " requests at root\n";
                    return kExitInfeasible;
                }
                placement = std::move(result.placement);
                assignment = std::move(result.assignment);
            }
            std::string text = "# cost " +
                               replitree::ratio_to_string(replitree::placement_cost(tree, placement)) +
                               "\n" + replitree::write_solution(tree, placement, assignment);
            emit(text, out_path);
            return kExitOk;
        }

        if (validate->parsed()) {
            auto tree = replitree::parse_tree(slurp(tree_path));
            auto [placement, assignment] = replitree::parse_solution(tree, slurp(solution_path));
            auto report = replitree::validate_all(tree, placement, assignment,
                                                  parse_policy(policy_name),
                                                  parse_profile(profile_name));
            print_report(report);
            std::cout << (report.ok() ? "valid" : "invalid") << " cost "
                      << replitree::ratio_to_string(replitree::placement_cost(tree, placement))
                      << "\n";
            return report.ok() ? kExitOk : kExitInfeasible;
        }

        if (oracle->parsed()) {
            auto tree = replitree::parse_tree(slurp(tree_path));
            replitree::OracleOptions opt;
            opt.max_internal = oracle_cap;
            opt.max_clients = std::max(oracle_cap, 16);
            replitree::Policy policy = parse_policy(policy_name);
            replitree::OracleResult result;
            if (policy == replitree::Policy::Closest) result = replitree::exact_closest(tree, opt);
            else if (policy == replitree::Policy::Upwards) result = replitree::exact_upwards(tree, opt);
            else result = replitree::exact_multiple(tree, opt);
            if (!result.feasible) {
                std::cerr << "infeasible under " << policy_name << "\n";
                return kExitInfeasible;
            }
            std::string text = "# cost " + replitree::ratio_to_string(result.cost) + "\n" +
                               replitree::write_solution(tree, result.placement, result.assignment);
            emit(text, out_path);
            return kExitOk;
        }

        if (lower->parsed()) {
            auto tree = replitree::parse_tree(slurp(tree_path));
            std::cout << replitree::naive_lower_bound(tree) << "\n";
            return kExitOk;
        }

        if (exportlp->parsed() || import->parsed()) {
            auto tree = replitree::parse_tree(slurp(tree_path));
            auto model = replitree::build_ilp(tree, parse_policy(policy_name),
                                              parse_profile(profile_name));
            replitree::RelaxationMode mode;
            if (relax_name == "int") mode = replitree::RelaxationMode::ExactInteger;
            else if (relax_name == "rational") mode = replitree::RelaxationMode::FullyRational;
            else if (relax_name == "refined-x") mode = replitree::RelaxationMode::RefinedXInteger;
            else throw CLI::ValidationError("--relax must be int, rational or refined-x");
            model = replitree::apply_relaxation(std::move(model), mode);

            if (exportlp->parsed()) {
                emit(replitree::write_lp_file(model), out_path);
                return kExitOk;
            }
            auto imported = replitree::read_solution(slurp(solution_path), model, tree);
            if (imported.raw.status == replitree::SolutionStatus::Infeasible) {
                std::cout << "status infeasible\n";
                return kExitInfeasible;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", imported.objective);
            std::cout << "objective " << buf << "\n";
            if (imported.placement) {
                print_report(imported.report);
                std::cout << (imported.report.ok() ? "valid" : "invalid") << "\n";
                return imported.report.ok() ? kExitOk : kExitInfeasible;
            }
            return kExitOk;
        }

        if (generate->parsed()) {
            gen.seed = seed;
            gen.target_lambda = replitree::ratio_from_decimal(lambda_text);
            auto tree = replitree::generate_tree(gen);
            emit(tree.serialize(), out_path);
            return kExitOk;
        }

        if (campaign->parsed()) {
            auto cfg = replitree::parse_campaign_config(slurp(config_path));
            if (workers > 1) cfg.workers = workers;
            auto report = replitree::run_campaign(cfg);
            emit(replitree::emit_csv(report), out_path);
            return kExitOk;
        }
    } catch (const replitree::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const replitree::SolutionImportError& e) {
        std::cerr << "import error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
