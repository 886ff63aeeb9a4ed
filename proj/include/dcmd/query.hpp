#pragma once
// Minimal textual query language over the graphstore:
//   query  := "match" statement+ ("fetch" $var [, $var]... ";" | "insert" statement+)
//   statement := $var "isa" type ("," "has" attr (value | $var))* ";"
//              | $var "(" role ":" $var ["," role ":" $var]... ")" "isa" type ";"
// Values are quoted strings, numbers, or the literals true/false. Datetime
// attributes accept quoted strings in the datetime format.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dcmd/graphstore.hpp"

namespace dcmd {

struct QueryValue {
    enum class Kind { constant, variable };
    Kind kind = Kind::constant;
    AttrValue constant;   // literal as written; strings stay strings until
    std::string var;      // execution resolves the attribute's value kind

    bool operator==(const QueryValue&) const = default;
};

struct HasClause {
    std::string attr;
    QueryValue value;
    bool operator==(const HasClause&) const = default;
};

struct IsaStatement {
    std::string var;
    std::string type;
    std::vector<HasClause> has;
    bool operator==(const IsaStatement&) const = default;
};

struct RelStatement {
    std::string var;
    std::vector<std::pair<std::string, std::string>> role_players;  // role -> var
    std::string type;
    bool operator==(const RelStatement&) const = default;
};

using Statement = std::variant<IsaStatement, RelStatement>;

struct QueryAst {
    enum class Kind { match_read, match_insert };
    Kind kind = Kind::match_read;
    std::vector<Statement> match_statements;
    std::vector<std::string> fetch_vars;       // match_read
    std::vector<Statement> insert_statements;  // match_insert

    bool operator==(const QueryAst&) const = default;
};

// Throws ParseError with line/column and the expected-token set. Also rejects
// insert statements that reference variables neither matched nor introduced.
QueryAst parse_query(std::string_view text);

// Canonical text; parse_query(unparse(q)) == q up to whitespace.
std::string unparse(const QueryAst& ast);

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<std::vector<BindingValue>> rows;
};

// match_read: pattern bindings projected onto the fetch variables.
// match_insert: one insert batch per binding, each batch atomic.
ResultSet execute(Store& store, const QueryAst& ast);

// The store pattern equivalent of the match clause (used by tests to compare
// execute() against Store::match()).
Pattern compile_pattern(const QueryAst& ast, const SchemaDef& schema);

}  // namespace dcmd
