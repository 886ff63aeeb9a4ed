#pragma once
// Discrete Bayesian networks with exact posterior computation by Variable
// Elimination. A joint-enumeration oracle (brute_force_posterior) provides an
// independent check of the VE path.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dcmd {

struct Variable {
    std::string name;
    std::vector<std::string> states;  // >= 2, unique labels

    int state_index(std::string_view label) const;  // -1 when unknown
    bool operator==(const Variable&) const = default;
};

// Dense non-negative table over an ordered scope. Values are row-major with
// the first scope variable slowest-varying.
class Factor {
public:
    Factor() : values_{1.0} {}  // unit factor over the empty scope
    Factor(std::vector<Variable> scope, std::vector<double> values);

    const std::vector<Variable>& scope() const { return scope_; }
    const std::vector<double>& values() const { return values_; }
    size_t size() const { return values_.size(); }

    int scope_index(std::string_view var) const;  // -1 when absent

    double at(const std::vector<int>& states) const;
    Factor restricted(std::string_view var, int state) const;

    bool operator==(const Factor&) const = default;

private:
    std::vector<Variable> scope_;
    std::vector<double> values_;
};

// Pointwise product over the union scope; shared variables are aligned by
// name. Throws InferenceError when a shared variable disagrees on states.
Factor factor_product(const Factor& a, const Factor& b);

// Sums the variable out of the scope. Throws when var is not in scope.
Factor sum_out(const Factor& f, std::string_view var);

struct Evidence {
    std::map<std::string, std::string> observed;  // variable -> state label
};

struct BayesNet {
    std::string name;
    std::vector<Variable> variables;                        // declaration order
    std::map<std::string, std::vector<std::string>> parents;
    std::map<std::string, Factor> cpts;  // scope = [parents..., child]

    const Variable* find_variable(std::string_view name) const;
    const Variable& variable(std::string_view name) const;  // throws

    // Structural and numeric checks: acyclic parent graph, CPT scopes, and
    // row sums within `tol` of 1.
    std::vector<std::string> validate(double tol = 1e-9) const;
    void require_valid(double tol = 1e-9) const;  // throws InferenceError
};

struct Distribution {
    std::vector<std::string> states;
    std::vector<double> probs;

    double operator[](std::string_view state) const;
    double max_abs_diff(const Distribution& other) const;
};

// Min-fill ordering over the evidence-reduced interaction graph, ties broken
// by variable name. Returns every non-query, non-evidence variable.
std::vector<std::string> elimination_order(const BayesNet& net, std::string_view query,
                                           const Evidence& evidence);

Distribution posterior(const BayesNet& net, std::string_view query, const Evidence& evidence);
Distribution posterior_with_order(const BayesNet& net, std::string_view query,
                                  const Evidence& evidence,
                                  const std::vector<std::string>& order);

// Exact posterior by full joint enumeration; independent of the factor-ops
// path. Throws JointTooLargeError above 2^24 joint entries.
Distribution brute_force_posterior(const BayesNet& net, std::string_view query,
                                   const Evidence& evidence);

// Network file: one or more nets, each declaring variables and CPT rows keyed
// by parent configuration. Checksum is FNV-1a over the file bytes.
struct NetworkFile {
    std::map<std::string, BayesNet> nets;
    uint64_t checksum = 0;
};

NetworkFile parse_networks(std::string_view text);
NetworkFile load_networks(const std::string& path);

}  // namespace dcmd
