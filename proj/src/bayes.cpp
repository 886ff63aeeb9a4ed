#include "dcmd/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "dcmd/errors.hpp"

namespace dcmd {

int Variable::state_index(std::string_view label) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == label) return static_cast<int>(i);
    return -1;
}

Factor::Factor(std::vector<Variable> scope, std::vector<double> values)
    : scope_(std::move(scope)), values_(std::move(values)) {
    size_t expect = 1;
    for (const Variable& v : scope_) expect *= v.states.size();
    if (values_.size() != expect)
        throw InferenceError("factor table size " + std::to_string(values_.size()) +
                             " does not match scope cardinality " + std::to_string(expect));
    for (double d : values_)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw InferenceError("factor entries must be finite and non-negative");
}

int Factor::scope_index(std::string_view var) const {
    for (size_t i = 0; i < scope_.size(); ++i)
        if (scope_[i].name == var) return static_cast<int>(i);
    return -1;
}

double Factor::at(const std::vector<int>& states) const {
    size_t idx = 0;
    for (size_t i = 0; i < scope_.size(); ++i) idx = idx * scope_[i].states.size() + states[i];
    return values_[idx];
}

Factor Factor::restricted(std::string_view var, int state) const {
    int pos = scope_index(var);
    if (pos < 0) throw InferenceError("variable '" + std::string(var) + "' not in factor scope");
    std::vector<Variable> new_scope;
    for (size_t i = 0; i < scope_.size(); ++i)
        if (static_cast<int>(i) != pos) new_scope.push_back(scope_[i]);

    std::vector<double> out;
    out.reserve(values_.size() / scope_[pos].states.size());
    std::vector<int> idx(scope_.size(), 0);
    for (size_t flat = 0; flat < values_.size(); ++flat) {
        if (idx[pos] == state) out.push_back(values_[flat]);
        // odometer increment, last variable fastest
        for (int i = static_cast<int>(scope_.size()) - 1; i >= 0; --i) {
            if (++idx[i] < static_cast<int>(scope_[i].states.size())) break;
            idx[i] = 0;
        }
    }
    return Factor(std::move(new_scope), std::move(out));
}

Factor factor_product(const Factor& a, const Factor& b) {
    std::vector<Variable> scope = a.scope();
    for (const Variable& v : b.scope()) {
        int pos = a.scope_index(v.name);
        if (pos >= 0) {
            if (a.scope()[pos].states != v.states)
                throw InferenceError("state mismatch for shared variable '" + v.name + "'");
        } else {
            scope.push_back(v);
        }
    }

    std::vector<int> a_pos(scope.size()), b_pos(scope.size());
    for (size_t i = 0; i < scope.size(); ++i) {
        a_pos[i] = a.scope_index(scope[i].name);
        b_pos[i] = b.scope_index(scope[i].name);
    }

    size_t total = 1;
    for (const Variable& v : scope) total *= v.states.size();
    std::vector<double> values(total);
    std::vector<int> idx(scope.size(), 0);
    std::vector<int> ia(a.scope().size(), 0), ib(b.scope().size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
        for (size_t i = 0; i < scope.size(); ++i) {
            if (a_pos[i] >= 0) ia[a_pos[i]] = idx[i];
            if (b_pos[i] >= 0) ib[b_pos[i]] = idx[i];
        }
        values[flat] = a.at(ia) * b.at(ib);
        for (int i = static_cast<int>(scope.size()) - 1; i >= 0; --i) {
            if (++idx[i] < static_cast<int>(scope[i].states.size())) break;
            idx[i] = 0;
        }
    }
    return Factor(std::move(scope), std::move(values));
}

Factor sum_out(const Factor& f, std::string_view var) {
    int pos = f.scope_index(var);
    if (pos < 0) throw InferenceError("variable '" + std::string(var) + "' not in factor scope");

    std::vector<Variable> new_scope;
    for (size_t i = 0; i < f.scope().size(); ++i)
        if (static_cast<int>(i) != pos) new_scope.push_back(f.scope()[i]);

    size_t total = 1;
    for (const Variable& v : new_scope) total *= v.states.size();
    std::vector<double> values(total, 0.0);

    std::vector<int> idx(f.scope().size(), 0);
    std::vector<int> out_idx(new_scope.size(), 0);
    for (size_t flat = 0; flat < f.values().size(); ++flat) {
        size_t k = 0;
        size_t out_flat = 0;
        for (size_t i = 0; i < f.scope().size(); ++i) {
            if (static_cast<int>(i) == pos) continue;
            out_idx[k] = idx[i];
            out_flat = out_flat * new_scope[k].states.size() + out_idx[k];
            ++k;
        }
        values[out_flat] += f.values()[flat];
        for (int i = static_cast<int>(f.scope().size()) - 1; i >= 0; --i) {
            if (++idx[i] < static_cast<int>(f.scope()[i].states.size())) break;
            idx[i] = 0;
        }
    }
    return Factor(std::move(new_scope), std::move(values));
}

const Variable* BayesNet::find_variable(std::string_view name) const {
    for (const Variable& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

const Variable& BayesNet::variable(std::string_view name) const {
    const Variable* v = find_variable(name);
    if (!v) throw InferenceError("unknown variable '" + std::string(name) + "'");
    return *v;
}

std::vector<std::string> BayesNet::validate(double tol) const {
    std::vector<std::string> issues;
    std::set<std::string> names;
    for (const Variable& v : variables) {
        if (!names.insert(v.name).second) issues.push_back("duplicate variable '" + v.name + "'");
        if (v.states.size() < 2) issues.push_back("variable '" + v.name + "' has fewer than 2 states");
        std::set<std::string> labels(v.states.begin(), v.states.end());
        if (labels.size() != v.states.size())
            issues.push_back("variable '" + v.name + "' repeats a state label");
    }

    // Parent references and acyclicity (DFS coloring).
    for (const auto& [child, ps] : parents) {
        if (!find_variable(child)) issues.push_back("parents listed for unknown '" + child + "'");
        for (const auto& p : ps)
            if (!find_variable(p))
                issues.push_back("variable '" + child + "' has unknown parent '" + p + "'");
    }
    {
        std::map<std::string, int> color;  // 0 new, 1 active, 2 done
        bool cyclic = false;
        std::function<void(const std::string&)> visit = [&](const std::string& v) {
            if (cyclic) return;
            int& c = color[v];
            if (c == 1) {
                cyclic = true;
                return;
            }
            if (c == 2) return;
            c = 1;
            auto it = parents.find(v);
            if (it != parents.end())
                for (const auto& p : it->second)
                    if (find_variable(p)) visit(p);
            c = 2;
        };
        for (const Variable& v : variables) visit(v.name);
        if (cyclic) issues.push_back("parent graph contains a cycle");
    }

    // One CPT per variable with the expected scope and normalized rows.
    for (const Variable& v : variables) {
        auto it = cpts.find(v.name);
        if (it == cpts.end()) {
            issues.push_back("missing CPT for '" + v.name + "'");
            continue;
        }
        const Factor& f = it->second;
        std::vector<std::string> expected;
        auto pit = parents.find(v.name);
        if (pit != parents.end()) expected = pit->second;
        expected.push_back(v.name);
        if (f.scope().size() != expected.size()) {
            issues.push_back("CPT scope size mismatch for '" + v.name + "'");
            continue;
        }
        bool scope_ok = true;
        for (size_t i = 0; i < expected.size(); ++i)
            if (f.scope()[i].name != expected[i]) scope_ok = false;
        if (!scope_ok) {
            issues.push_back("CPT scope order mismatch for '" + v.name + "' (parents..., child)");
            continue;
        }
        size_t child_card = v.states.size();
        size_t rows = f.values().size() / child_card;
        for (size_t row = 0; row < rows; ++row) {
            double sum = 0;
            for (size_t s = 0; s < child_card; ++s) sum += f.values()[row * child_card + s];
            if (std::abs(sum - 1.0) > tol)
                issues.push_back("CPT row " + std::to_string(row) + " of '" + v.name +
                                 "' sums to " + std::to_string(sum));
        }
    }
    return issues;
}

void BayesNet::require_valid(double tol) const {
    auto issues = validate(tol);
    if (!issues.empty()) throw InferenceError("invalid network '" + name + "': " + issues.front());
}

double Distribution::operator[](std::string_view state) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == state) return probs[i];
    throw InferenceError("unknown state '" + std::string(state) + "'");
}

double Distribution::max_abs_diff(const Distribution& other) const {
    double m = 0;
    for (size_t i = 0; i < probs.size() && i < other.probs.size(); ++i)
        m = std::max(m, std::abs(probs[i] - other.probs[i]));
    return m;
}

namespace {

void check_query_evidence(const BayesNet& net, std::string_view query, const Evidence& evidence) {
    net.variable(query);
    for (const auto& [var, state] : evidence) {
        const Variable& v = net.variable(var);
        if (v.state_index(state) < 0)
            throw InferenceError("evidence state '" + state + "' invalid for '" + var + "'");
    }
    if (evidence.observed.count(std::string(query)))
        throw InferenceError("query variable '" + std::string(query) + "' is in the evidence");
}

const std::map<std::string, std::string>& obs(const Evidence& e) { return e.observed; }

// CPT factors with evidence variables sliced out.
std::vector<Factor> restricted_cpts(const BayesNet& net, const Evidence& evidence) {
    std::vector<Factor> out;
    for (const Variable& v : net.variables) {
        Factor f = net.cpts.at(v.name);
        for (const auto& [var, state] : obs(evidence)) {
            int pos = f.scope_index(var);
            if (pos >= 0) f = f.restricted(var, net.variable(var).state_index(state));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

std::vector<std::string> elimination_order(const BayesNet& net, std::string_view query,
                                           const Evidence& evidence) {
    check_query_evidence(net, query, evidence);

    // Interaction graph over evidence-reduced factor scopes.
    std::map<std::string, std::set<std::string>> adj;
    for (const Variable& v : net.variables)
        if (!obs(evidence).count(v.name)) adj[v.name];
    for (const Factor& f : restricted_cpts(net, evidence)) {
        const auto& scope = f.scope();
        for (size_t i = 0; i < scope.size(); ++i)
            for (size_t j = i + 1; j < scope.size(); ++j) {
                adj[scope[i].name].insert(scope[j].name);
                adj[scope[j].name].insert(scope[i].name);
            }
    }

    std::set<std::string> to_eliminate;
    for (const auto& [v, _] : adj)
        if (v != query) to_eliminate.insert(v);

    std::vector<std::string> order;
    while (!to_eliminate.empty()) {
        std::string best;
        int best_fill = -1;
        for (const auto& v : to_eliminate) {  // set iteration = name order, so ties pick first
            const auto& nbrs = adj[v];
            std::vector<std::string> n(nbrs.begin(), nbrs.end());
            int fill = 0;
            for (size_t i = 0; i < n.size(); ++i)
                for (size_t j = i + 1; j < n.size(); ++j)
                    if (!adj[n[i]].count(n[j])) ++fill;
            if (best_fill < 0 || fill < best_fill) {
                best_fill = fill;
                best = v;
            }
        }
        // Connect neighbours, remove the variable.
        std::vector<std::string> nbrs(adj[best].begin(), adj[best].end());
        for (size_t i = 0; i < nbrs.size(); ++i)
            for (size_t j = i + 1; j < nbrs.size(); ++j) {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        for (const auto& n : nbrs) adj[n].erase(best);
        adj.erase(best);
        to_eliminate.erase(best);
        order.push_back(best);
    }
    return order;
}

Distribution posterior_with_order(const BayesNet& net, std::string_view query,
                                  const Evidence& evidence,
                                  const std::vector<std::string>& order) {
    check_query_evidence(net, query, evidence);
    std::vector<Factor> factors = restricted_cpts(net, evidence);

    for (const std::string& var : order) {
        std::vector<Factor> holding;
        Factor combined;  // unit
        bool any = false;
        for (Factor& f : factors) {
            if (f.scope_index(var) >= 0) {
                combined = any ? factor_product(combined, f) : std::move(f);
                any = true;
            } else {
                holding.push_back(std::move(f));
            }
        }
        if (any) holding.push_back(sum_out(combined, var));
        factors = std::move(holding);
    }

    Factor result;
    for (const Factor& f : factors) result = factor_product(result, f);

    const Variable& qv = net.variable(query);
    if (result.scope().size() != 1 || result.scope()[0].name != qv.name)
        throw InferenceError("elimination order did not reduce to the query variable");

    double norm = 0;
    for (double d : result.values()) norm += d;
    if (norm <= 0.0)
        throw ImpossibleEvidenceError("evidence has zero probability under the network");

    Distribution dist;
    dist.states = qv.states;
    dist.probs.resize(qv.states.size());
    for (size_t i = 0; i < dist.probs.size(); ++i) dist.probs[i] = result.values()[i] / norm;
    return dist;
}

Distribution posterior(const BayesNet& net, std::string_view query, const Evidence& evidence) {
    return posterior_with_order(net, query, evidence, elimination_order(net, query, evidence));
}

Distribution brute_force_posterior(const BayesNet& net, std::string_view query,
                                   const Evidence& evidence) {
    check_query_evidence(net, query, evidence);

    size_t joint = 1;
    for (const Variable& v : net.variables) {
        joint *= v.states.size();
        if (joint > (1u << 24))
            throw JointTooLargeError("joint distribution exceeds 2^24 entries");
    }

    // Positions and fixed evidence states.
    std::map<std::string, size_t> var_pos;
    for (size_t i = 0; i < net.variables.size(); ++i) var_pos[net.variables[i].name] = i;
    std::vector<int> fixed(net.variables.size(), -1);
    for (const auto& [var, state] : obs(evidence))
        fixed[var_pos.at(var)] = net.variable(var).state_index(state);
    size_t qpos = var_pos.at(std::string(query));
    const Variable& qv = net.variables[qpos];

    // Per-CPT raw strides, bypassing the Factor op machinery.
    struct RawCpt {
        const std::vector<double>* values;
        std::vector<size_t> member_pos;   // positions (into assignment) of scope variables
        std::vector<size_t> member_card;
    };
    std::vector<RawCpt> raw;
    for (const Variable& v : net.variables) {
        const Factor& f = net.cpts.at(v.name);
        RawCpt rc;
        rc.values = &f.values();
        for (const Variable& sv : f.scope()) {
            rc.member_pos.push_back(var_pos.at(sv.name));
            rc.member_card.push_back(sv.states.size());
        }
        raw.push_back(std::move(rc));
    }

    std::vector<double> buckets(qv.states.size(), 0.0);
    std::vector<int> assign(net.variables.size(), 0);
    while (true) {
        bool consistent = true;
        for (size_t i = 0; i < assign.size(); ++i)
            if (fixed[i] >= 0 && assign[i] != fixed[i]) {
                consistent = false;
                break;
            }
        if (consistent) {
            double p = 1.0;
            for (const RawCpt& rc : raw) {
                size_t idx = 0;
                for (size_t k = 0; k < rc.member_pos.size(); ++k)
                    idx = idx * rc.member_card[k] + assign[rc.member_pos[k]];
                p *= (*rc.values)[idx];
                if (p == 0.0) break;
            }
            buckets[assign[qpos]] += p;
        }
        // next assignment
        int i = static_cast<int>(assign.size()) - 1;
        for (; i >= 0; --i) {
            if (++assign[i] < static_cast<int>(net.variables[i].states.size())) break;
            assign[i] = 0;
        }
        if (i < 0) break;
    }

    double norm = 0;
    for (double d : buckets) norm += d;
    if (norm <= 0.0)
        throw ImpossibleEvidenceError("evidence has zero probability under the network");
    Distribution dist;
    dist.states = qv.states;
    for (double d : buckets) dist.probs.push_back(d / norm);
    return dist;
}

}  // namespace dcmd
