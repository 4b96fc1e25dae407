#include <replitree/lp.hpp>
#include <replitree/oracle.hpp>

#include "support/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace replitree;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string data(const std::string& rel) { return std::string(REPLITREE_TEST_DATA) + "/" + rel; }

int count_vars(const IlpModel& m, char type) {
    int n = 0;
    for (const auto& v : m.vars) n += v.role.type == type;
    return n;
}

// counts rows of one LP file section ("Subject To" rows = constraints;
// "Generals" + "Binaries" + bounds-only continuous rows = variables)
int lp_section_rows(const std::string& text, const std::string& section) {
    std::istringstream in(text);
    std::string line;
    bool active = false;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line == section) {
            active = true;
            continue;
        }
        if (active && !line.empty() && line[0] != ' ') active = false;
        if (active && !line.empty()) ++rows;
    }
    return rows;
}

}  // namespace

TEST_CASE("fig1a multiple model matches the hand count") {
    auto tree = fixtures::fig1('a');
    auto model = build_ilp(tree, Policy::Multiple, {});
    REQUIRE(count_vars(model, 'x') == 2);
    REQUIRE(count_vars(model, 'y') == 2);
    REQUIRE(count_vars(model, 'z') == 2);
    REQUIRE(model.constraints.size() == 5);  // 1 asg + 1 lnk + 1 flw + 2 cap

    // the LP text round-trips through its own section counts: 5 rows,
    // 4 integer y/z variables, 2 binary x variables
    std::string text = write_lp_file(model);
    REQUIRE(lp_section_rows(text, "Subject To") == 5);
    REQUIRE(lp_section_rows(text, "Generals") == 4);
    REQUIRE(lp_section_rows(text, "Binaries") == 2);
    REQUIRE(lp_section_rows(text, "Bounds") == 4);
}

TEST_CASE("fig1b closest model carries the exclusion rows") {
    auto tree = fixtures::fig1('b');
    auto model = build_ilp(tree, Policy::Closest, {});
    int cls = 0;
    for (const auto& c : model.constraints)
        if (c.name.rfind("cls_", 0) == 0) ++cls;
    // both clients under s1, against both subtree clients
    REQUIRE(cls == 4);
    bool found = false;
    for (const auto& c : model.constraints)
        if (c.name == "cls_c1_s1_c2") found = true;
    REQUIRE(found);
    REQUIRE(model.constraints.size() == 12);
}

TEST_CASE("variable count formulas on random trees") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 25; ++round) {
        auto tree = fixtures::small_random_tree(rng);
        auto model = build_ilp(tree, round % 2 ? Policy::Multiple : Policy::Upwards, {});
        std::size_t anc_sum = 0;
        for (NodeIndex c : tree.client_nodes()) anc_sum += tree.ancestors(c).size();
        REQUIRE(count_vars(model, 'x') == static_cast<int>(tree.internal_nodes().size()));
        REQUIRE(count_vars(model, 'y') == static_cast<int>(anc_sum));
        REQUIRE(count_vars(model, 'z') == static_cast<int>(anc_sum));
    }
}

TEST_CASE("golden lp files") {
    IlpModel minimal;
    int x = minimal.add_var("x_n1", VarKind::Binary, Ratio(0), Ratio(1), {'x', 0, kNoNode});
    minimal.objective.emplace_back(x, Ratio(1));
    REQUIRE(write_lp_file(minimal) == read_file(data("golden/minimal.lp")));

    auto fig1a = fixtures::fig1('a');
    REQUIRE(write_lp_file(build_ilp(fig1a, Policy::Multiple, {})) ==
            read_file(data("golden/fig1a_multiple.lp")));

    auto fig1b = fixtures::fig1('b');
    REQUIRE(write_lp_file(build_ilp(fig1b, Policy::Closest, {})) ==
            read_file(data("golden/fig1b_closest.lp")));
}

TEST_CASE("relaxation modes") {
    auto tree = fixtures::fig1('c');
    auto model = build_ilp(tree, Policy::Multiple, {});

    auto same = apply_relaxation(model, RelaxationMode::ExactInteger);
    for (std::size_t k = 0; k < model.vars.size(); ++k)
        REQUIRE(same.vars[k].kind == model.vars[k].kind);

    auto refined = apply_relaxation(model, RelaxationMode::RefinedXInteger);
    for (const auto& v : refined.vars) {
        if (v.role.type == 'x') REQUIRE(v.kind == VarKind::Binary);
        else REQUIRE(v.kind == VarKind::Continuous);
    }

    auto rational = apply_relaxation(model, RelaxationMode::FullyRational);
    for (const auto& v : rational.vars) REQUIRE(v.kind == VarKind::Continuous);
}

TEST_CASE("qos enters the model per policy") {
    auto tree = parse_tree(
        "node a 5 1\n"
        "node b 5 1 parent a comm 1 bw inf\n"
        "client c requests 3 qos 1 parent b comm 1 bw inf\n");
    ConstraintProfile profile{.qos_active = true, .bandwidth_active = false};

    auto single = build_ilp(tree, Policy::Upwards, profile);
    int qos_rows = 0;
    for (const auto& cst : single.constraints)
        if (cst.name.rfind("qos_", 0) == 0) ++qos_rows;
    REQUIRE(qos_rows == 2);  // one per ancestor

    // Multiple uses the support form: the out-of-reach y is pinned to zero
    auto multi = build_ilp(tree, Policy::Multiple, profile);
    REQUIRE(multi.vars[static_cast<std::size_t>(multi.var_index.at("y_c_a"))].upper == Ratio(0));
    REQUIRE(multi.vars[static_cast<std::size_t>(multi.var_index.at("y_c_b"))].upper == Ratio(3));
    for (const auto& cst : multi.constraints) REQUIRE(cst.name.rfind("qos_", 0) != 0);
}

TEST_CASE("bandwidth rows only when active and finite") {
    auto tree = parse_tree(
        "node a 5 1\n"
        "node b 5 1 parent a comm 1 bw 2\n"
        "client c requests 3 qos inf parent b comm 1 bw inf\n");
    auto off = build_ilp(tree, Policy::Multiple, {});
    for (const auto& cst : off.constraints) REQUIRE(cst.name.rfind("bw_", 0) != 0);

    auto on = build_ilp(tree, Policy::Multiple, {.qos_active = false, .bandwidth_active = true});
    int bw_rows = 0;
    for (const auto& cst : on.constraints)
        if (cst.name.rfind("bw_", 0) == 0) {
            ++bw_rows;
            REQUIRE(cst.name == "bw_b");
            REQUIRE(cst.rhs == Ratio(2));
        }
    REQUIRE(bw_rows == 1);
}

TEST_CASE("read_solution") {
    auto tree = fixtures::fig1('a');
    auto model = build_ilp(tree, Policy::Multiple, {});

    SECTION("hand-written optimum imports, validates, objective 1") {
        std::string text =
            "objective 1\n"
            "x_s1 1\n"
            "y_c1_s1 1\n"
            "z_c1_c1 1\n";
        auto imported = read_solution(text, model, tree);
        REQUIRE(imported.objective == Catch::Approx(1.0));
        REQUIRE(imported.placement.has_value());
        REQUIRE(imported.placement->size() == 1);
        REQUIRE(imported.report.ok());
        REQUIRE(placement_cost(tree, *imported.placement) == Ratio(1));
    }
    SECTION("fractional binary is an integrality error") {
        REQUIRE_THROWS_AS(read_solution("x_s1 0.5\ny_c1_s1 0.5\ny_c1_s2 0.5\nz_c1_c1 1\nz_c1_s1 0.5\n",
                                        model, tree),
                          SolutionImportError);
    }
    SECTION("empty file is a parse error") {
        REQUIRE_THROWS_AS(read_solution("", model, tree), ParseError);
    }
    SECTION("unknown variable is rejected") {
        REQUIRE_THROWS_AS(read_solution("x_s9 1\n", model, tree), SolutionImportError);
    }
    SECTION("declared objective must match the values") {
        REQUIRE_THROWS_AS(read_solution("objective 7\nx_s1 1\ny_c1_s1 1\nz_c1_c1 1\n", model, tree),
                          SolutionImportError);
    }
    SECTION("invalid integral solutions are reported by the validator") {
        // claims both requests on s1 without opening s2
        auto fig1c = fixtures::fig1('c');
        auto m = build_ilp(fig1c, Policy::Multiple, {});
        auto imported =
            read_solution("x_s1 1\ny_c1_s1 2\nz_c1_c1 2\n", m, fig1c);
        REQUIRE(imported.placement.has_value());
        REQUIRE_FALSE(imported.report.ok());
    }
    SECTION("relaxed models skip conversion") {
        auto relaxed = apply_relaxation(model, RelaxationMode::FullyRational);
        auto imported = read_solution("x_s1 0.5\nx_s2 0.5\ny_c1_s1 0.5\ny_c1_s2 0.5\n"
                                      "z_c1_c1 1\nz_c1_s1 0.5\n",
                                      relaxed, tree);
        REQUIRE_FALSE(imported.placement.has_value());
        REQUIRE(imported.objective == Catch::Approx(1.0));
    }
}

TEST_CASE("relaxation bound chain on checked-in solver assets") {
    struct Case {
        char variant;
        Policy policy;
        const char* stem;
    };
    for (const Case& c : {Case{'a', Policy::Multiple, "fig1a_multiple"},
                          Case{'b', Policy::Multiple, "fig1b_multiple"},
                          Case{'c', Policy::Multiple, "fig1c_multiple"},
                          Case{'c', Policy::Upwards, "fig1c_upwards"}}) {
        auto tree = fixtures::fig1(c.variant);
        auto base = build_ilp(tree, c.policy, {});
        auto rational = read_solution(
            read_file(data(std::string("solver/") + c.stem + "_rational.sol")),
            apply_relaxation(base, RelaxationMode::FullyRational), tree);
        auto refined = read_solution(
            read_file(data(std::string("solver/") + c.stem + "_refined.sol")),
            apply_relaxation(base, RelaxationMode::RefinedXInteger), tree);
        REQUIRE(rational.objective <= refined.objective + kSolutionTolerance);
        OracleResult exact = c.policy == Policy::Multiple ? exact_multiple(tree)
                                                          : exact_upwards(tree);
        if (exact.feasible)
            REQUIRE(refined.objective <= ratio_to_double(exact.cost) + kSolutionTolerance);
    }
}

namespace {

// plugs a single-server solution into a model's variables and evaluates
// every constraint
bool satisfies_model(const IlpModel& model, const DistributionTree& tree,
                     const Placement& placement, const Assignment& assignment) {
    std::map<std::string, Ratio> value;
    for (const auto& v : model.vars) value[v.name] = Ratio(0);
    for (NodeIndex j : placement.replicas) value["x_" + tree.node(j).id] = Ratio(1);
    for (const auto& [key, count] : assignment.served) {
        auto [client, server] = key;
        value["y_" + tree.node(client).id + "_" + tree.node(server).id] = Ratio(1);
        for (NodeIndex k = client; k != server; k = tree.node(k).parent)
            value["z_" + tree.node(client).id + "_" + tree.node(k).id] = Ratio(1);
        (void)count;
    }
    for (const auto& c : model.constraints) {
        Ratio lhs{0};
        for (const auto& [ix, coeff] : c.terms)
            lhs += coeff * value.at(model.vars[static_cast<std::size_t>(ix)].name);
        if (c.rel == Rel::Eq && lhs != c.rhs) return false;
        if (c.rel == Rel::Le && lhs > c.rhs) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("valid closest solutions satisfy the closest model by substitution") {
    for (auto make : {+[] { return fixtures::fig1('a'); }, +[] { return fixtures::fig2(1); },
                      +[] { return fixtures::fig2(2); }, +[] { return fixtures::fig5(2, 6); }}) {
        auto tree = make();
        auto witness = exact_closest(tree);
        REQUIRE(witness.feasible);
        auto model = build_ilp(tree, Policy::Closest, {});
        REQUIRE(satisfies_model(model, tree, witness.placement, witness.assignment));
    }
    // and a solution where one client passes over a serving replica breaks
    // the exclusion rows: on fig1b, s1 serves c1 while c2 goes to the root
    auto fig1b = fixtures::fig1('b');
    Placement both;
    both.add(fig1b.index_of("s1"));
    both.add(fig1b.index_of("s2"));
    Assignment skip;
    skip.add(fig1b.index_of("c1"), fig1b.index_of("s1"), 1);
    skip.add(fig1b.index_of("c2"), fig1b.index_of("s2"), 1);
    auto model = build_ilp(fig1b, Policy::Closest, {});
    REQUIRE_FALSE(satisfies_model(model, fig1b, both, skip));
}

TEST_CASE("integral solutions recover the exact placement cost") {
    // objective recomputed from x values equals placement_cost exactly
    auto tree = fixtures::fig1('b');
    auto model = build_ilp(tree, Policy::Upwards, {});
    std::string text =
        "x_s1 1\nx_s2 1\n"
        "y_c1_s1 1\ny_c2_s2 1\n"
        "z_c1_c1 1\nz_c2_c2 1\nz_c2_s1 1\n";
    auto imported = read_solution(text, model, tree);
    REQUIRE(imported.report.ok());
    REQUIRE(Ratio(2) == placement_cost(tree, *imported.placement));
    REQUIRE(imported.objective == Catch::Approx(2.0));
}

TEST_CASE("zero-request client model is trivially optimal at zero") {
    auto tree = parse_tree(
        "node n1 4 1\n"
        "client c1 requests 0 qos inf parent n1 comm 1 bw inf\n");
    auto model = build_ilp(tree, Policy::Multiple, {});
    auto imported = read_solution("objective 0\n x_n1 0\n", model, tree);
    REQUIRE(imported.report.ok());
    REQUIRE(imported.objective == Catch::Approx(0.0));
}

TEST_CASE("naive lower bound") {
    REQUIRE(naive_lower_bound(fixtures::fig5(3, 6)) == 2);
    auto zero = parse_tree(
        "node n1 5 1\n"
        "client c1 requests 0 qos inf parent n1 comm 1 bw inf\n");
    REQUIRE(naive_lower_bound(zero) == 0);
    auto uneven = parse_tree(
        "node n1 4 1\n"
        "client c1 requests 13 qos inf parent n1 comm 1 bw inf\n");  // 3W+1
    REQUIRE(naive_lower_bound(uneven) == 4);
    auto nocap = parse_tree(
        "node n1 0 1\n"
        "client c1 requests 1 qos inf parent n1 comm 1 bw inf\n");
    REQUIRE_THROWS_AS(naive_lower_bound(nocap), std::invalid_argument);
    REQUIRE_THROWS_AS(naive_lower_bound(fixtures::fig4(2, 3)), std::invalid_argument);
}
