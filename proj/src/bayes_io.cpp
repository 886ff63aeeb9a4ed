// Network/CPT file parser. Grammar:
//   net <name> {
//     variable <name> states <s1>, <s2> [, ...] ;
//     cpt <name> [ given <p1> [, <p2> ...] ] { <p-state>, ... : v1, v2 ; ... }
//     cpt <name> : v1, v2 [, ...] ;          # no parents
//   }
// '#' starts a comment. Every parent configuration must appear exactly once.

#include <fstream>
#include <sstream>

#include "dcmd/bayes.hpp"
#include "dcmd/errors.hpp"
#include "dcmd/ontology.hpp"  // fnv1a64
#include "scan.hpp"

namespace dcmd {

namespace {

using detail::Scanner;

std::vector<std::string> parse_name_list(Scanner& sc, const std::string& context) {
    std::vector<std::string> names;
    names.push_back(sc.expect_ident(context));
    while (sc.try_symbol(',')) names.push_back(sc.expect_ident(context));
    return names;
}

std::vector<double> parse_number_list(Scanner& sc, const std::string& context) {
    std::vector<double> nums;
    nums.push_back(sc.expect_number(context));
    while (sc.try_symbol(',')) nums.push_back(sc.expect_number(context));
    return nums;
}

void parse_cpt(Scanner& sc, BayesNet& net) {
    int line = sc.line(), col = sc.column();
    std::string child = sc.expect_ident("cpt declaration");
    const Variable* cv = net.find_variable(child);
    if (!cv) throw ParseError("cpt for unknown variable '" + child + "'", line, col);
    if (net.cpts.count(child)) throw ParseError("duplicate cpt for '" + child + "'", line, col);

    std::vector<std::string> parent_names;
    if (sc.peek() != ':' && sc.peek() != '{') {
        sc.expect_keyword("given", "cpt declaration");
        parent_names = parse_name_list(sc, "cpt parent list");
    }
    std::vector<const Variable*> parent_vars;
    for (const auto& p : parent_names) {
        const Variable* pv = net.find_variable(p);
        if (!pv) throw ParseError("cpt parent '" + p + "' is not a variable", line, col);
        parent_vars.push_back(pv);
    }

    std::vector<Variable> scope;
    for (const Variable* pv : parent_vars) scope.push_back(*pv);
    scope.push_back(*cv);

    size_t child_card = cv->states.size();
    size_t rows = 1;
    for (const Variable* pv : parent_vars) rows *= pv->states.size();
    std::vector<double> table(rows * child_card, -1.0);

    if (parent_vars.empty()) {
        sc.expect_symbol(':', "cpt declaration");
        auto nums = parse_number_list(sc, "cpt values");
        sc.expect_symbol(';', "cpt declaration");
        if (nums.size() != child_card)
            throw ParseError("cpt for '" + child + "' needs " + std::to_string(child_card) +
                                 " values, got " + std::to_string(nums.size()),
                             line, col);
        table = nums;
    } else {
        sc.expect_symbol('{', "cpt declaration");
        size_t filled = 0;
        while (!sc.try_symbol('}')) {
            int rline = sc.line(), rcol = sc.column();
            auto config = parse_name_list(sc, "cpt row configuration");
            sc.expect_symbol(':', "cpt row");
            auto nums = parse_number_list(sc, "cpt row values");
            sc.expect_symbol(';', "cpt row");
            if (config.size() != parent_vars.size())
                throw ParseError("cpt row lists " + std::to_string(config.size()) +
                                     " parent states, expected " +
                                     std::to_string(parent_vars.size()),
                                 rline, rcol);
            if (nums.size() != child_card)
                throw ParseError("cpt row needs " + std::to_string(child_card) + " values",
                                 rline, rcol);
            size_t row = 0;
            for (size_t i = 0; i < parent_vars.size(); ++i) {
                int s = parent_vars[i]->state_index(config[i]);
                if (s < 0)
                    throw ParseError("state '" + config[i] + "' invalid for parent '" +
                                         parent_vars[i]->name + "'",
                                     rline, rcol);
                row = row * parent_vars[i]->states.size() + s;
            }
            if (table[row * child_card] >= 0)
                throw ParseError("duplicate cpt row for '" + child + "'", rline, rcol);
            for (size_t s = 0; s < child_card; ++s) table[row * child_card + s] = nums[s];
            ++filled;
        }
        if (filled != rows)
            throw ParseError("cpt for '" + child + "' covers " + std::to_string(filled) + " of " +
                                 std::to_string(rows) + " parent configurations",
                             line, col);
    }

    net.parents[child] = parent_names;
    net.cpts.emplace(child, Factor(std::move(scope), std::move(table)));
}

BayesNet parse_net(Scanner& sc) {
    BayesNet net;
    net.name = sc.expect_ident("net declaration");
    sc.expect_symbol('{', "net declaration");
    while (!sc.try_symbol('}')) {
        int line = sc.line(), col = sc.column();
        std::string kw = sc.expect_ident("net body");
        if (kw == "variable") {
            Variable v;
            v.name = sc.expect_ident("variable declaration");
            sc.expect_keyword("states", "variable declaration");
            v.states = parse_name_list(sc, "state list");
            sc.expect_symbol(';', "variable declaration");
            if (v.states.size() < 2)
                throw ParseError("variable '" + v.name + "' needs at least 2 states", line, col);
            if (net.find_variable(v.name))
                throw ParseError("duplicate variable '" + v.name + "'", line, col);
            net.variables.push_back(std::move(v));
        } else if (kw == "cpt") {
            parse_cpt(sc, net);
        } else {
            throw ParseError("unexpected token '" + kw + "' in net body", line, col,
                             "'variable' or 'cpt'");
        }
    }
    auto issues = net.validate(1e-9);
    if (!issues.empty())
        throw ParseError("net '" + net.name + "': " + issues.front(), 1, 1);
    return net;
}

}  // namespace

NetworkFile parse_networks(std::string_view text) {
    NetworkFile file;
    file.checksum = fnv1a64(text);
    Scanner sc(text);
    while (!sc.at_end()) {
        int line = sc.line(), col = sc.column();
        sc.expect_keyword("net", "network file");
        BayesNet net = parse_net(sc);
        if (file.nets.count(net.name))
            throw ParseError("duplicate net '" + net.name + "'", line, col);
        file.nets.emplace(net.name, std::move(net));
    }
    return file;
}

NetworkFile load_networks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open network file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_networks(ss.str());
}

}  // namespace dcmd
