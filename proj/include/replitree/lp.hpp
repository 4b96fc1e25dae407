#pragma once

#include "solution.hpp"
#include "tree.hpp"
#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace replitree {

enum class VarKind { Binary, Integer, Continuous };
enum class RelaxationMode { ExactInteger, FullyRational, RefinedXInteger };

inline const char* relaxation_name(RelaxationMode m) {
    switch (m) {
        case RelaxationMode::ExactInteger: return "int";
        case RelaxationMode::FullyRational: return "rational";
        default: return "refined-x";
    }
}

// Variable roles tie model columns back to tree elements so integral
// solutions can be converted into a (Placement, Assignment) pair.
//   x: placement indicator of node `a`
//   y: requests of client `a` served at node `b`
//   z: requests of client `a` crossing the link whose lower endpoint is `b`
struct VarRole {
    char type;
    NodeIndex a = kNoNode;
    NodeIndex b = kNoNode;
};

struct IlpVariable {
    std::string name;
    VarKind kind;
    Ratio lower{0};
    Ratio upper{0};
    VarRole role;
};

enum class Rel { Le, Eq };

struct IlpConstraint {
    std::string name;
    std::vector<std::pair<int, Ratio>> terms;  // (variable index, coefficient)
    Rel rel;
    Ratio rhs;
};

struct IlpModel {
    Policy policy = Policy::Multiple;
    ConstraintProfile profile;
    std::vector<IlpVariable> vars;
    std::map<std::string, int> var_index;
    std::vector<IlpConstraint> constraints;
    std::vector<std::pair<int, Ratio>> objective;  // minimize

    int add_var(std::string name, VarKind kind, Ratio lo, Ratio hi, VarRole role) {
        int ix = static_cast<int>(vars.size());
        var_index.emplace(name, ix);
        vars.push_back({std::move(name), kind, lo, hi, role});
        return ix;
    }
};

// Builds the integer linear program for one policy. Variables: x_j for every
// internal node, y_{i,j} for every client/ancestor pair, z_{i,l} for every
// link on a client's path to the root. Under single-server policies y and z
// are binary; under Multiple they count requests.
inline IlpModel build_ilp(const DistributionTree& tree, Policy policy,
                          const ConstraintProfile& profile) {
    IlpModel model;
    model.policy = policy;
    model.profile = profile;
    bool multiple = policy == Policy::Multiple;

    std::vector<int> xvar(static_cast<std::size_t>(tree.size()), -1);
    for (NodeIndex j : tree.internal_nodes()) {
        int ix = model.add_var("x_" + tree.node(j).id, VarKind::Binary, Ratio(0), Ratio(1),
                               {'x', j, kNoNode});
        xvar[static_cast<std::size_t>(j)] = ix;
        model.objective.emplace_back(ix, tree.node(j).storage_cost);
    }

    // y[(i,j)] and z[(i,child)] variable indices
    std::map<std::pair<NodeIndex, NodeIndex>, int> yvar, zvar;
    for (NodeIndex i : tree.client_nodes()) {
        long long r = tree.node(i).requests;
        Ratio ylimit = multiple ? Ratio(r) : Ratio(1);
        VarKind kind = multiple ? VarKind::Integer : VarKind::Binary;
        const std::string& cid = tree.node(i).id;
        for (NodeIndex j : tree.ancestors(i)) {
            Ratio hi = ylimit;
            if (multiple && profile.qos_active && tree.node(i).qos &&
                tree.distance(i, j) > *tree.node(i).qos)
                hi = Ratio(0);  // QoS support form: this server is out of reach
            yvar[{i, j}] = model.add_var("y_" + cid + "_" + tree.node(j).id, kind, Ratio(0), hi,
                                         {'y', i, j});
        }
        for (NodeIndex k = i; k != tree.root(); k = tree.node(k).parent)
            zvar[{i, k}] = model.add_var("z_" + cid + "_" + tree.node(k).id, kind, Ratio(0),
                                         ylimit, {'z', i, k});
    }

    // assignment completeness and link flow recursion, one client at a time
    for (NodeIndex i : tree.client_nodes()) {
        const std::string& cid = tree.node(i).id;
        long long r = tree.node(i).requests;
        auto path = tree.ancestors(i);

        IlpConstraint asg{"asg_" + cid, {}, Rel::Eq, multiple ? Ratio(r) : Ratio(1)};
        for (NodeIndex j : path) asg.terms.emplace_back(yvar.at({i, j}), Ratio(1));
        model.constraints.push_back(std::move(asg));

        // all requests from i use the link to its parent
        model.constraints.push_back(
            {"lnk_" + cid, {{zvar.at({i, i}), Ratio(1)}}, Rel::Eq, multiple ? Ratio(r) : Ratio(1)});

        // z_{i,succ(l)} = z_{i,l} - y_{i,j'} for every link l: j -> j', j' below the root
        NodeIndex lower = i;
        for (NodeIndex j : path) {
            if (j == tree.root()) break;
            model.constraints.push_back({"flw_" + cid + "_" + tree.node(j).id,
                                         {{zvar.at({i, j}), Ratio(1)},
                                          {zvar.at({i, lower}), Ratio(-1)},
                                          {yvar.at({i, j}), Ratio(1)}},
                                         Rel::Eq,
                                         Ratio(0)});
            lower = j;
        }
    }

    // server capacities: sum of served requests <= W_j x_j
    for (NodeIndex j : tree.internal_nodes()) {
        IlpConstraint cap{"cap_" + tree.node(j).id, {}, Rel::Le, Ratio(0)};
        for (NodeIndex i : tree.subtree_clients(j)) {
            Ratio coeff = multiple ? Ratio(1) : Ratio(tree.node(i).requests);
            cap.terms.emplace_back(yvar.at({i, j}), coeff);
        }
        cap.terms.emplace_back(xvar[static_cast<std::size_t>(j)], -Ratio(tree.node(j).capacity));
        model.constraints.push_back(std::move(cap));
    }

    if (profile.bandwidth_active) {
        for (NodeIndex k = 0; k < tree.size(); ++k) {
            const TreeNode& n = tree.node(k);
            if (n.parent == kNoNode || !n.bandwidth) continue;
            IlpConstraint bw{"bw_" + n.id, {}, Rel::Le, Ratio(*n.bandwidth)};
            for (NodeIndex i : tree.subtree_clients(k)) {
                Ratio coeff = multiple ? Ratio(1) : Ratio(tree.node(i).requests);
                auto it = zvar.find({i, k});
                if (it != zvar.end()) bw.terms.emplace_back(it->second, coeff);
            }
            model.constraints.push_back(std::move(bw));
        }
    }

    if (profile.qos_active && !multiple) {
        // dist(i,j) y_{i,j} <= q_i
        for (NodeIndex i : tree.client_nodes()) {
            if (!tree.node(i).qos) continue;
            for (NodeIndex j : tree.ancestors(i)) {
                model.constraints.push_back({"qos_" + tree.node(i).id + "_" + tree.node(j).id,
                                             {{yvar.at({i, j}), tree.distance(i, j)}},
                                             Rel::Le,
                                             *tree.node(i).qos});
            }
        }
    }

    if (policy == Policy::Closest) {
        // if j serves i, no client of subtree(j) may send requests above j:
        // y_{i,j} + z_{i',l_j} <= 1 for the link l_j: j -> parent(j)
        for (NodeIndex i : tree.client_nodes()) {
            const std::string& cid = tree.node(i).id;
            for (NodeIndex j : tree.ancestors(i)) {
                if (j == tree.root()) continue;
                for (NodeIndex i2 : tree.subtree_clients(j)) {
                    model.constraints.push_back(
                        {"cls_" + cid + "_" + tree.node(j).id + "_" + tree.node(i2).id,
                         {{yvar.at({i, j}), Ratio(1)}, {zvar.at({i2, j}), Ratio(1)}},
                         Rel::Le,
                         Ratio(1)});
                }
            }
        }
    }
    return model;
}

// ExactInteger keeps the model as built; FullyRational drops every
// integrality requirement; RefinedXInteger keeps only the x_j integral.
inline IlpModel apply_relaxation(IlpModel model, RelaxationMode mode) {
    if (mode == RelaxationMode::ExactInteger) return model;
    for (IlpVariable& v : model.vars) {
        if (mode == RelaxationMode::FullyRational || v.role.type != 'x')
            v.kind = VarKind::Continuous;
    }
    return model;
}

namespace detail {

inline std::string lp_number(const Ratio& r) {
    std::string s = ratio_to_string(r < Ratio(0) ? -r : r);
    if (s.find('/') != std::string::npos)
        throw std::logic_error("non-decimal coefficient in LP output: " + s);
    return s;
}

inline void lp_terms(std::ostringstream& out, const std::vector<std::pair<int, Ratio>>& terms,
                     const std::vector<IlpVariable>& vars) {
    bool first = true;
    for (const auto& [ix, coeff] : terms) {
        if (coeff == Ratio(0)) continue;
        bool neg = coeff < Ratio(0);
        Ratio mag = neg ? -coeff : coeff;
        if (first) {
            if (neg) out << "- ";
            first = false;
        } else {
            out << (neg ? " - " : " + ");
        }
        if (mag != Ratio(1)) out << lp_number(mag) << " ";
        out << vars[static_cast<std::size_t>(ix)].name;
    }
    if (first) out << "0 " << vars.front().name;  // empty expression guard
}

}  // namespace detail

// CPLEX LP text format. Variable listings (objective, bounds, generals,
// binaries) are sorted by name; constraints keep their build order.
inline std::string write_lp_file(const IlpModel& model) {
    std::ostringstream out;
    out << "\\ replitree model: policy=" << policy_name(model.policy)
        << " qos=" << (model.profile.qos_active ? 1 : 0)
        << " bw=" << (model.profile.bandwidth_active ? 1 : 0) << "\n";

    std::vector<std::pair<int, Ratio>> obj = model.objective;
    std::sort(obj.begin(), obj.end(), [&](const auto& a, const auto& b) {
        return model.vars[static_cast<std::size_t>(a.first)].name <
               model.vars[static_cast<std::size_t>(b.first)].name;
    });
    out << "Minimize\n obj: ";
    detail::lp_terms(out, obj, model.vars);
    out << "\nSubject To\n";
    for (const IlpConstraint& c : model.constraints) {
        out << " " << c.name << ": ";
        detail::lp_terms(out, c.terms, model.vars);
        out << (c.rel == Rel::Le ? " <= " : " = ") << (c.rhs < Ratio(0) ? "-" : "")
            << detail::lp_number(c.rhs) << "\n";
    }

    std::vector<int> by_name(model.vars.size());
    for (std::size_t k = 0; k < by_name.size(); ++k) by_name[k] = static_cast<int>(k);
    std::sort(by_name.begin(), by_name.end(), [&](int a, int b) {
        return model.vars[static_cast<std::size_t>(a)].name <
               model.vars[static_cast<std::size_t>(b)].name;
    });

    std::ostringstream bounds, generals, binaries;
    for (int ix : by_name) {
        const IlpVariable& v = model.vars[static_cast<std::size_t>(ix)];
        if (v.kind == VarKind::Binary) {
            binaries << " " << v.name << "\n";
        } else {
            bounds << " " << detail::lp_number(v.lower) << " <= " << v.name
                   << " <= " << detail::lp_number(v.upper) << "\n";
            if (v.kind == VarKind::Integer) generals << " " << v.name << "\n";
        }
    }
    if (!bounds.str().empty()) out << "Bounds\n" << bounds.str();
    if (!generals.str().empty()) out << "Generals\n" << generals.str();
    if (!binaries.str().empty()) out << "Binaries\n" << binaries.str();
    out << "End\n";
    return out.str();
}

enum class SolutionStatus { Optimal, Infeasible, Unknown };

struct SolverSolution {
    SolutionStatus status = SolutionStatus::Optimal;
    std::optional<double> declared_objective;
    std::map<std::string, double> values;  // missing variables are zero
};

// Solver output exchange format: optional "status <s>" and "objective <v>"
// header lines followed by "name value" pairs, one per line, '#' comments.
inline SolverSolution parse_solver_output(const std::string& text) {
    SolverSolution sol;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        any = true;
        if (toks[0] == "status" && toks.size() == 2) {
            if (toks[1] == "optimal") sol.status = SolutionStatus::Optimal;
            else if (toks[1] == "infeasible") sol.status = SolutionStatus::Infeasible;
            else if (toks[1] == "unknown") sol.status = SolutionStatus::Unknown;
            else throw ParseError(lineno, "unknown status '" + toks[1] + "'");
            continue;
        }
        if (toks.size() != 2) throw ParseError(lineno, "expected 'name value'");
        try {
            std::size_t used = 0;
            double v = std::stod(toks[1], &used);
            if (used != toks[1].size()) throw std::invalid_argument(toks[1]);
            if (toks[0] == "objective") sol.declared_objective = v;
            else sol.values[toks[0]] = v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad value '" + toks[1] + "'");
        }
    }
    if (!any) throw ParseError(lineno == 0 ? 1 : lineno, "empty solution file");
    return sol;
}

constexpr double kSolutionTolerance = 1e-6;

struct ImportedSolution {
    SolverSolution raw;
    double objective = 0;  // recomputed from the variable values
    // present only for fully integral models
    std::optional<Placement> placement;
    std::optional<Assignment> assignment;
    ValidationReport report;
};

class SolutionImportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Matches a solver's output against a model. Unknown variables are
// rejected; for fully integral models the values are converted into a
// placement and assignment and run through the validator.
inline ImportedSolution read_solution(const std::string& text, const IlpModel& model,
                                      const DistributionTree& tree) {
    ImportedSolution imported;
    imported.raw = parse_solver_output(text);
    for (const auto& [name, value] : imported.raw.values) {
        if (!model.var_index.count(name))
            throw SolutionImportError("solution references unknown variable '" + name + "'");
        (void)value;
    }
    if (imported.raw.status == SolutionStatus::Infeasible) return imported;

    auto value_of = [&](int ix) {
        auto it = imported.raw.values.find(model.vars[static_cast<std::size_t>(ix)].name);
        return it == imported.raw.values.end() ? 0.0 : it->second;
    };

    double obj = 0;
    for (const auto& [ix, coeff] : model.objective) obj += ratio_to_double(coeff) * value_of(ix);
    imported.objective = obj;
    if (imported.raw.declared_objective &&
        std::abs(*imported.raw.declared_objective - obj) > kSolutionTolerance)
        throw SolutionImportError("declared objective disagrees with variable values");

    bool integral_model = true;
    for (const IlpVariable& v : model.vars)
        if (v.kind == VarKind::Continuous) integral_model = false;
    if (!integral_model) return imported;

    Placement placement;
    Assignment assignment;
    for (std::size_t k = 0; k < model.vars.size(); ++k) {
        const IlpVariable& v = model.vars[k];
        double val = value_of(static_cast<int>(k));
        double rounded = std::round(val);
        if (std::abs(val - rounded) > kSolutionTolerance)
            throw SolutionImportError("variable '" + v.name + "' violates integrality: " +
                                      std::to_string(val));
        long long iv = static_cast<long long>(rounded);
        if (v.role.type == 'x' && iv == 1) placement.add(v.role.a);
        if (v.role.type == 'y' && iv > 0) {
            long long count = model.policy == Policy::Multiple ? iv : tree.node(v.role.a).requests;
            assignment.add(v.role.a, v.role.b, count);
        }
    }
    imported.report = validate_all(tree, placement, assignment, model.policy, model.profile);
    imported.placement = std::move(placement);
    imported.assignment = std::move(assignment);
    return imported;
}

// ceil(total requests / W) for homogeneous trees: no placement can beat it.
inline long long naive_lower_bound(const DistributionTree& tree) {
    auto w = tree.uniform_capacity();
    if (!w) throw std::invalid_argument("naive lower bound needs a homogeneous tree");
    if (*w == 0) throw std::invalid_argument("capacity is zero");
    long long total = tree.total_requests();
    return (total + *w - 1) / *w;
}

}  // namespace replitree
