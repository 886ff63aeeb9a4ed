#include "dcmd/query.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "dcmd/errors.hpp"
#include "scan.hpp"

namespace dcmd {

namespace {

using detail::Scanner;

std::string expect_var(Scanner& sc, const std::string& context) {
    if (!sc.try_symbol('$'))
        throw ParseError("unexpected " + sc.describe_here() + " in " + context, sc.line(),
                         sc.column(), "'$'");
    return sc.expect_ident(context);
}

QueryValue parse_value(Scanner& sc) {
    QueryValue v;
    if (sc.peek() == '$') {
        sc.try_symbol('$');
        v.kind = QueryValue::Kind::variable;
        v.var = sc.expect_ident("attribute value");
        return v;
    }
    std::string s;
    if (sc.try_string(s)) {
        v.constant = AttrValue::of_string(std::move(s));
        return v;
    }
    double d;
    if (sc.try_number(d)) {
        v.constant = AttrValue::of_double(d);
        return v;
    }
    std::string ident;
    int line = sc.line(), col = sc.column();
    if (sc.try_ident(ident)) {
        if (ident == "true") {
            v.constant = AttrValue::of_bool(true);
            return v;
        }
        if (ident == "false") {
            v.constant = AttrValue::of_bool(false);
            return v;
        }
        throw ParseError("unexpected token '" + ident + "' as attribute value", line, col,
                         "string, number, true, false or $var");
    }
    throw ParseError("unexpected " + sc.describe_here() + " as attribute value", sc.line(),
                     sc.column(), "string, number, true, false or $var");
}

Statement parse_statement(Scanner& sc) {
    std::string var = expect_var(sc, "statement");
    if (sc.peek() == '(') {
        RelStatement rel;
        rel.var = std::move(var);
        sc.expect_symbol('(', "relation statement");
        while (true) {
            std::string role = sc.expect_ident("role list");
            sc.expect_symbol(':', "role list");
            std::string player = expect_var(sc, "role list");
            rel.role_players.emplace_back(std::move(role), std::move(player));
            if (!sc.try_symbol(',')) break;
        }
        sc.expect_symbol(')', "relation statement");
        sc.expect_keyword("isa", "relation statement");
        rel.type = sc.expect_ident("relation statement");
        sc.expect_symbol(';', "relation statement");
        return rel;
    }
    IsaStatement isa;
    isa.var = std::move(var);
    sc.expect_keyword("isa", "statement");
    isa.type = sc.expect_ident("statement");
    while (sc.try_symbol(',')) {
        sc.expect_keyword("has", "has clause");
        HasClause h;
        h.attr = sc.expect_ident("has clause");
        h.value = parse_value(sc);
        isa.has.push_back(std::move(h));
    }
    sc.expect_symbol(';', "statement");
    return isa;
}

void collect_vars(const Statement& st, std::set<std::string>& introduced,
                  std::set<std::string>& referenced) {
    if (const auto* isa = std::get_if<IsaStatement>(&st)) {
        introduced.insert(isa->var);
        for (const HasClause& h : isa->has)
            if (h.value.kind == QueryValue::Kind::variable) referenced.insert(h.value.var);
    } else {
        const auto& rel = std::get<RelStatement>(st);
        introduced.insert(rel.var);
        for (const auto& [role, player] : rel.role_players) referenced.insert(player);
    }
}

}  // namespace

QueryAst parse_query(std::string_view text) {
    Scanner sc(text);
    QueryAst ast;
    sc.expect_keyword("match", "query");
    while (sc.peek() == '$') ast.match_statements.push_back(parse_statement(sc));
    if (ast.match_statements.empty())
        throw ParseError("match clause needs at least one statement", sc.line(), sc.column(),
                         "'$'");

    int line = sc.line(), col = sc.column();
    std::string kw = sc.expect_ident("query");
    if (kw == "fetch") {
        ast.kind = QueryAst::Kind::match_read;
        ast.fetch_vars.push_back(expect_var(sc, "fetch clause"));
        while (sc.try_symbol(',')) ast.fetch_vars.push_back(expect_var(sc, "fetch clause"));
        sc.expect_symbol(';', "fetch clause");
    } else if (kw == "insert") {
        ast.kind = QueryAst::Kind::match_insert;
        while (sc.peek() == '$') ast.insert_statements.push_back(parse_statement(sc));
        if (ast.insert_statements.empty())
            throw ParseError("insert clause needs at least one statement", sc.line(), sc.column(),
                             "'$'");
    } else {
        throw ParseError("unexpected token '" + kw + "'", line, col, "'fetch' or 'insert'");
    }
    if (!sc.at_end())
        throw ParseError("unexpected " + sc.describe_here() + " after query", sc.line(),
                         sc.column(), "end of input");

    // Variable discipline.
    std::set<std::string> matched, match_refs;
    for (const Statement& st : ast.match_statements) collect_vars(st, matched, match_refs);
    for (const auto& v : match_refs)
        if (!matched.count(v))
            throw ParseError("variable $" + v + " is referenced but never bound", 1, 1);

    if (ast.kind == QueryAst::Kind::match_read) {
        for (const auto& v : ast.fetch_vars)
            if (!matched.count(v) && !match_refs.count(v))
                throw ParseError("fetch variable $" + v + " is not bound by the match clause", 1,
                                 1);
    } else {
        std::set<std::string> available = matched;
        for (const auto& v : match_refs) available.insert(v);
        for (const Statement& st : ast.insert_statements) {
            std::set<std::string> introduced, referenced;
            collect_vars(st, introduced, referenced);
            for (const auto& v : referenced)
                if (!available.count(v))
                    throw ParseError("unbound variable $" + v + " in insert clause", 1, 1);
            const std::string& own =
                std::holds_alternative<IsaStatement>(st) ? std::get<IsaStatement>(st).var
                                                         : std::get<RelStatement>(st).var;
            if (matched.count(own))
                throw ParseError("insert variable $" + own + " is already bound by match", 1, 1);
            available.insert(own);
        }
    }
    return ast;
}

namespace {

std::string value_text(const QueryValue& v) {
    if (v.kind == QueryValue::Kind::variable) return "$" + v.var;
    switch (v.constant.kind()) {
        case ValueKind::string_v: {
            std::string out = "\"";
            for (char c : v.constant.as_string()) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            return out + "\"";
        }
        case ValueKind::boolean_v: return v.constant.as_bool() ? "true" : "false";
        default: return v.constant.to_display();
    }
}

void unparse_statement(std::ostringstream& out, const Statement& st) {
    if (const auto* isa = std::get_if<IsaStatement>(&st)) {
        out << "$" << isa->var << " isa " << isa->type;
        for (const HasClause& h : isa->has) out << ", has " << h.attr << " " << value_text(h.value);
        out << "; ";
    } else {
        const auto& rel = std::get<RelStatement>(st);
        out << "$" << rel.var << " (";
        for (size_t i = 0; i < rel.role_players.size(); ++i) {
            if (i) out << ", ";
            out << rel.role_players[i].first << ": $" << rel.role_players[i].second;
        }
        out << ") isa " << rel.type << "; ";
    }
}

}  // namespace

std::string unparse(const QueryAst& ast) {
    std::ostringstream out;
    out << "match ";
    for (const Statement& st : ast.match_statements) unparse_statement(out, st);
    if (ast.kind == QueryAst::Kind::match_read) {
        out << "fetch ";
        for (size_t i = 0; i < ast.fetch_vars.size(); ++i) {
            if (i) out << ", ";
            out << "$" << ast.fetch_vars[i];
        }
        out << ";";
    } else {
        out << "insert ";
        for (const Statement& st : ast.insert_statements) unparse_statement(out, st);
    }
    std::string s = out.str();
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

namespace {

// Literal coerced to the attribute's declared kind; quoted strings feed
// datetime attributes.
AttrValue coerce_constant(const SchemaDef& schema, const std::string& attr, const AttrValue& raw) {
    const AttributeDecl* decl = schema.attribute(attr);
    if (!decl)
        throw StoreError(StoreError::Kind::unknown_attribute, "unknown attribute '" + attr + "'");
    if (decl->value_kind == ValueKind::datetime_v && raw.kind() == ValueKind::string_v) {
        auto dt = DateTime::try_parse(raw.as_string());
        if (!dt)
            throw StoreError(StoreError::Kind::value_kind_mismatch,
                             "attribute '" + attr + "' expects a datetime literal");
        return AttrValue::of_datetime(*dt);
    }
    return raw;
}

}  // namespace

Pattern compile_pattern(const QueryAst& ast, const SchemaDef& schema) {
    Pattern p;
    for (const Statement& st : ast.match_statements) {
        if (const auto* isa = std::get_if<IsaStatement>(&st)) {
            p.clauses.push_back(TypeClause{isa->var, isa->type});
            for (const HasClause& h : isa->has) {
                if (h.value.kind == QueryValue::Kind::variable)
                    p.clauses.push_back(AttrBindClause{isa->var, h.attr, h.value.var});
                else
                    p.clauses.push_back(
                        AttrEqClause{isa->var, h.attr, coerce_constant(schema, h.attr, h.value.constant)});
            }
        } else {
            const auto& rel = std::get<RelStatement>(st);
            p.clauses.push_back(TypeClause{rel.var, rel.type});
            for (const auto& [role, player] : rel.role_players)
                p.clauses.push_back(RoleClause{rel.var, role, player});
        }
    }
    return p;
}

ResultSet execute(Store& store, const QueryAst& ast) {
    Pattern pattern = compile_pattern(ast, store.schema());
    std::vector<BindingRow> rows = store.match(pattern);

    if (ast.kind == QueryAst::Kind::match_read) {
        ResultSet rs;
        rs.columns = ast.fetch_vars;
        for (const BindingRow& row : rows) {
            std::vector<BindingValue> out;
            for (const auto& var : ast.fetch_vars) {
                auto it = row.find(var);
                if (it == row.end())
                    throw StoreError(StoreError::Kind::bad_pattern,
                                     "fetch variable $" + var + " missing from bindings");
                out.push_back(it->second);
            }
            rs.rows.push_back(std::move(out));
        }
        return rs;
    }

    // match_insert: one batch per binding, atomic per batch.
    ResultSet rs;
    rs.columns = {"inserted"};
    for (const BindingRow& row : rows) {
        ThingId mark = store.next_id();
        std::map<std::string, ThingId> created;
        auto resolve = [&](const std::string& var) -> ThingId {
            auto cit = created.find(var);
            if (cit != created.end()) return cit->second;
            auto rit = row.find(var);
            if (rit != row.end() && rit->second.is_thing) return rit->second.id;
            throw StoreError(StoreError::Kind::bad_pattern,
                             "variable $" + var + " does not name an instance");
        };
        size_t batch_count = 0;
        try {
            for (const Statement& st : ast.insert_statements) {
                if (const auto* isa = std::get_if<IsaStatement>(&st)) {
                    AttrMap attrs;
                    for (const HasClause& h : isa->has) {
                        AttrValue v;
                        if (h.value.kind == QueryValue::Kind::variable) {
                            auto rit = row.find(h.value.var);
                            if (rit == row.end() || rit->second.is_thing)
                                throw StoreError(StoreError::Kind::bad_pattern,
                                                 "variable $" + h.value.var +
                                                     " does not carry an attribute value");
                            v = rit->second.value;
                        } else {
                            v = coerce_constant(store.schema(), h.attr, h.value.constant);
                        }
                        attrs.emplace(h.attr, std::move(v));
                    }
                    created[isa->var] = store.insert_thing(isa->type, std::move(attrs));
                } else {
                    const auto& rel = std::get<RelStatement>(st);
                    RoleMap roles;
                    for (const auto& [role, player] : rel.role_players)
                        roles[role].push_back(resolve(player));
                    created[rel.var] = store.insert_thing(rel.type, {}, std::move(roles));
                }
                ++batch_count;
            }
        } catch (...) {
            store.rollback_to_mark(mark);
            throw;
        }
        std::vector<BindingValue> out;
        out.push_back(BindingValue::of_value(AttrValue::of_double(static_cast<double>(batch_count))));
        rs.rows.push_back(std::move(out));
    }
    return rs;
}

}  // namespace dcmd
