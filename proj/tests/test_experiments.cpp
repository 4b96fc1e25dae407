#include <replitree/campaign.hpp>
#include <replitree/generate.hpp>

#include "support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace replitree;

TEST_CASE("generator determinism") {
    GeneratorParams p;
    p.seed = 1234;
    p.size_min = 15;
    p.size_max = 60;
    REQUIRE(generate_tree(p).serialize() == generate_tree(p).serialize());
    p.heterogeneous = true;
    REQUIRE(generate_tree(p).serialize() == generate_tree(p).serialize());
    GeneratorParams q = p;
    q.seed = 1235;
    REQUIRE(generate_tree(p).serialize() != generate_tree(q).serialize());
}

TEST_CASE("generated load stays within five percent of the target") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GeneratorParams p;
        p.seed = seed;
        p.size_min = 15;
        p.size_max = 120;
        p.target_lambda = Ratio(1, 2);
        p.heterogeneous = seed % 2 == 0;
        auto tree = generate_tree(p);
        Ratio lambda = tree.load_lambda();
        REQUIRE(lambda >= Ratio(475, 1000));
        REQUIRE(lambda <= Ratio(525, 1000));
    }
}

TEST_CASE("sizes stay in range over one hundred seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GeneratorParams p;
        p.seed = seed;
        p.size_min = 15;
        p.size_max = 400;
        auto tree = generate_tree(p);
        int s = tree.size();
        REQUIRE(s >= 15);
        REQUIRE(s <= 400);
        REQUIRE(tree.client_nodes().size() >= 1);
        REQUIRE(tree.internal_nodes().size() >= 1);
    }
}

TEST_CASE("generator modes and validation") {
    SECTION("homogeneous trees carry unit storage costs") {
        GeneratorParams p;
        p.seed = 7;
        p.size_min = 20;
        p.size_max = 20;
        auto tree = generate_tree(p);
        REQUIRE(tree.uniform_capacity().has_value());
        for (NodeIndex j : tree.internal_nodes()) REQUIRE(tree.node(j).storage_cost == Ratio(1));
    }
    SECTION("heterogeneous trees price replicas at their capacity") {
        GeneratorParams p;
        p.seed = 7;
        p.size_min = 20;
        p.size_max = 20;
        p.heterogeneous = true;
        auto tree = generate_tree(p);
        for (NodeIndex j : tree.internal_nodes()) {
            REQUIRE(tree.node(j).storage_cost == Ratio(tree.node(j).capacity));
            REQUIRE(tree.node(j).capacity >= p.capacity_min);
            REQUIRE(tree.node(j).capacity <= p.capacity_max);
        }
    }
    SECTION("bad parameter combinations are rejected") {
        GeneratorParams p;
        p.size_min = 1;
        p.size_max = 1;
        REQUIRE_THROWS_AS(generate_tree(p), std::invalid_argument);
        GeneratorParams q;
        q.branch_min = 0;
        q.branch_max = 0;
        REQUIRE_THROWS_AS(generate_tree(q), std::invalid_argument);
        GeneratorParams r;
        r.target_lambda = Ratio(0);
        REQUIRE_THROWS_AS(generate_tree(r), std::invalid_argument);
    }
    SECTION("internal range is honored") {
        GeneratorParams p;
        p.seed = 3;
        p.size_min = 12;
        p.size_max = 16;
        p.internal_min = 2;
        p.internal_max = 6;
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            p.seed = seed;
            auto tree = generate_tree(p);
            REQUIRE(tree.internal_nodes().size() >= 2);
            REQUIRE(tree.internal_nodes().size() <= 6);
        }
    }
}

TEST_CASE("campaign config parsing") {
    auto cfg = parse_campaign_config(
        "# demo\n"
        "lambdas = 0.2, 0.8\n"
        "trees_per_lambda = 5\n"
        "size_min = 8\n"
        "size_max = 12\n"
        "internal_min = 2\n"
        "internal_max = 6\n"
        "capacity = 10\n"
        "seed = 99\n"
        "heuristics = mg, mixedbest\n");
    REQUIRE(cfg.lambda_labels == std::vector<std::string>{"0.2", "0.8"});
    REQUIRE(cfg.lambdas[1] == Ratio(4, 5));
    REQUIRE(cfg.trees_per_lambda == 5);
    REQUIRE(cfg.heuristics ==
            std::vector<HeuristicKind>{HeuristicKind::Mg, HeuristicKind::MixedBest});
    REQUIRE(cfg.reference_is_oracle);
    REQUIRE_THROWS_AS(parse_campaign_config("nonsense\n"), ParseError);
    REQUIRE_THROWS_AS(parse_campaign_config("heuristics = bogus\n"), std::invalid_argument);
}

namespace {

CampaignConfig small_campaign() {
    CampaignConfig cfg;
    cfg.lambda_labels = {"0.3", "0.7"};
    cfg.lambdas = {Ratio(3, 10), Ratio(7, 10)};
    cfg.trees_per_lambda = 6;
    cfg.generator.size_min = 8;
    cfg.generator.size_max = 12;
    cfg.generator.internal_min = 2;
    cfg.generator.internal_max = 6;
    cfg.generator.capacity = 10;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("campaign runs deterministically and keeps its invariants") {
    auto cfg = small_campaign();
    auto report = run_campaign(cfg);
    REQUIRE(report.cells.size() == 2 * 9);  // eight heuristics + mixedbest per lambda

    std::string csv = emit_csv(report);
    REQUIRE(csv == emit_csv(run_campaign(cfg)));
    REQUIRE(csv.substr(0, csv.find('\n')) ==
            "lambda,heuristic,instances,successes,success_pct,rcost");

    // workers only change the schedule, not the numbers
    auto parallel = cfg;
    parallel.workers = 4;
    REQUIRE(csv == emit_csv(run_campaign(parallel)));

    std::map<std::pair<std::string, std::string>, CampaignCell> cells;
    for (const auto& cell : report.cells) cells[{cell.lambda, cell.heuristic}] = cell;
    for (const std::string& lambda : cfg.lambda_labels) {
        const auto& mg_cell = cells.at({lambda, "mg"});
        const auto& mixed = cells.at({lambda, "mixedbest"});
        // mg never fails when a solution exists, so mixedbest matches it
        REQUIRE(mixed.successes == mg_cell.successes);
        for (HeuristicKind k : all_heuristic_kinds()) {
            const auto& cell = cells.at({lambda, heuristic_name(k)});
            REQUIRE(cell.rcost >= 0.0);
            REQUIRE(cell.rcost <= 1.0 + 1e-9);
            REQUIRE(mixed.rcost >= cell.rcost - 1e-9);
            REQUIRE(cell.successes <= mg_cell.successes);
        }
    }
}

TEST_CASE("an overloaded grid fails everywhere") {
    CampaignConfig cfg = small_campaign();
    cfg.lambda_labels = {"1.5"};
    cfg.lambdas = {Ratio(3, 2)};
    cfg.trees_per_lambda = 4;
    auto report = run_campaign(cfg);
    for (const auto& cell : report.cells) {
        REQUIRE(cell.successes == 0);
        REQUIRE(cell.rcost == 0.0);
    }
}

TEST_CASE("directory reference source") {
    namespace fs = std::filesystem;
    CampaignConfig cfg = small_campaign();
    cfg.lambda_labels = {"0.4"};
    cfg.lambdas = {Ratio(2, 5)};
    cfg.trees_per_lambda = 2;
    cfg.heuristics = {HeuristicKind::Mg};

    // first run against the oracle to learn the reference costs
    auto oracle_report = run_campaign(cfg);

    fs::path dir = fs::temp_directory_path() / "replitree_refs";
    fs::create_directories(dir);
    // write reference files that claim cost 1 for both instances
    for (int t = 0; t < cfg.trees_per_lambda; ++t) {
        std::ofstream out(dir / (campaign_instance_id("0.4", t) + ".sol"));
        out << "objective 1\n";
    }
    cfg.reference_is_oracle = false;
    cfg.reference_dir = dir.string();
    auto report = run_campaign(cfg);
    REQUIRE(report.cells[0].successes == oracle_report.cells[0].successes);
    // reference cost 1 shrinks every rcost term to 1/cost
    REQUIRE(report.cells[0].rcost <= oracle_report.cells[0].rcost);

    cfg.trees_per_lambda = 3;  // the third file is missing
    REQUIRE_THROWS_AS(run_campaign(cfg), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("csv shapes") {
    CampaignReport empty;
    REQUIRE(emit_csv(empty) == "lambda,heuristic,instances,successes,success_pct,rcost\n");
    CampaignReport one;
    one.cells.push_back({"0.5", "mg", 30, 30, 100.0, 0.875});
    REQUIRE(emit_csv(one) ==
            "lambda,heuristic,instances,successes,success_pct,rcost\n"
            "0.5,mg,30,30,100.000000,0.875000\n");
}
