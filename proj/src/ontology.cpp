#include "dcmd/ontology.hpp"

#include <algorithm>
#include <sstream>

#include "dcmd/errors.hpp"
#include "scan.hpp"

namespace dcmd {

namespace {

TypeKind root_kind(std::string_view name) {
    if (name == SchemaDef::kEntityRoot) return TypeKind::entity;
    if (name == SchemaDef::kRelationRoot) return TypeKind::relation;
    return TypeKind::attribute;
}

}  // namespace

std::string to_string(Layer layer) {
    switch (layer) {
        case Layer::upper: return "upper";
        case Layer::mid: return "mid";
        case Layer::domain: return "domain";
    }
    return "?";
}

std::optional<Layer> layer_from_name(std::string_view name) {
    if (name == "upper") return Layer::upper;
    if (name == "mid") return Layer::mid;
    if (name == "domain") return Layer::domain;
    return std::nullopt;
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool SchemaDef::is_root(std::string_view name) {
    return name == kEntityRoot || name == kRelationRoot || name == kAttributeRoot;
}

void SchemaDef::add_entity(TypeDecl decl) {
    if (is_root(decl.name) || has_type(decl.name))
        throw SchemaError("duplicate type name '" + decl.name + "'", decl.name);
    entities_.emplace(decl.name, std::move(decl));
}

void SchemaDef::add_relation(RelationDecl decl) {
    if (is_root(decl.name) || has_type(decl.name))
        throw SchemaError("duplicate type name '" + decl.name + "'", decl.name);
    relations_.emplace(decl.name, std::move(decl));
}

void SchemaDef::add_attribute(AttributeDecl decl) {
    if (is_root(decl.name) || has_type(decl.name))
        throw SchemaError("duplicate type name '" + decl.name + "'", decl.name);
    attributes_.emplace(decl.name, std::move(decl));
}

bool SchemaDef::has_type(std::string_view name) const {
    return is_root(name) || kind_of(name).has_value();
}

std::optional<TypeKind> SchemaDef::kind_of(std::string_view name) const {
    if (is_root(name)) return root_kind(name);
    std::string key(name);
    if (entities_.count(key)) return TypeKind::entity;
    if (relations_.count(key)) return TypeKind::relation;
    if (attributes_.count(key)) return TypeKind::attribute;
    return std::nullopt;
}

const TypeDecl* SchemaDef::entity(std::string_view name) const {
    auto it = entities_.find(std::string(name));
    return it == entities_.end() ? nullptr : &it->second;
}

const RelationDecl* SchemaDef::relation(std::string_view name) const {
    auto it = relations_.find(std::string(name));
    return it == relations_.end() ? nullptr : &it->second;
}

const AttributeDecl* SchemaDef::attribute(std::string_view name) const {
    auto it = attributes_.find(std::string(name));
    return it == attributes_.end() ? nullptr : &it->second;
}

bool SchemaDef::is_subtype(std::string_view child, std::string_view parent) const {
    if (!has_type(child))
        throw StoreError(StoreError::Kind::unknown_type, "unknown type '" + std::string(child) + "'");
    if (!has_type(parent))
        throw StoreError(StoreError::Kind::unknown_type, "unknown type '" + std::string(parent) + "'");
    std::string cur(child);
    size_t guard = 0;
    const size_t limit = entities_.size() + relations_.size() + attributes_.size() + 4;
    while (true) {
        if (cur == parent) return true;
        if (is_root(cur)) return false;
        if (++guard > limit) return false;  // defends against cyclic decls pre-validation
        auto kind = kind_of(cur);
        if (!kind) return false;
        switch (*kind) {
            case TypeKind::entity: cur = entities_.at(cur).parent; break;
            case TypeKind::relation: cur = relations_.at(cur).parent; break;
            case TypeKind::attribute: cur = kAttributeRoot; break;
        }
    }
}

std::vector<std::string> SchemaDef::subtypes_of(std::string_view type) const {
    std::vector<std::string> out;
    auto consider = [&](const std::string& name) {
        if (is_subtype(name, type)) out.push_back(name);
    };
    for (const auto& [name, _] : entities_) consider(name);
    for (const auto& [name, _] : relations_) consider(name);
    for (const auto& [name, _] : attributes_) consider(name);
    return out;
}

bool SchemaDef::owns_attribute(std::string_view type, std::string_view attr) const {
    std::string cur(type);
    size_t guard = 0;
    const size_t limit = entities_.size() + relations_.size() + 4;
    while (!is_root(cur)) {
        if (++guard > limit) return false;
        auto kind = kind_of(cur);
        if (!kind) return false;
        if (*kind == TypeKind::entity) {
            const TypeDecl& d = entities_.at(cur);
            if (d.owned_attributes.count(std::string(attr))) return true;
            cur = d.parent;
        } else if (*kind == TypeKind::relation) {
            const RelationDecl& d = relations_.at(cur);
            if (d.owned_attributes.count(std::string(attr))) return true;
            cur = d.parent;
        } else {
            return false;
        }
    }
    return false;
}

const RoleDecl* SchemaDef::find_role(std::string_view relation, std::string_view role) const {
    std::string cur(relation);
    size_t guard = 0;
    const size_t limit = relations_.size() + 4;
    while (!is_root(cur)) {
        if (++guard > limit) return nullptr;
        const RelationDecl* d = this->relation(cur);
        if (!d) return nullptr;
        for (const RoleDecl& r : d->roles)
            if (r.name == role) return &r;
        cur = d->parent;
    }
    return nullptr;
}

uint64_t SchemaDef::hash() const { return fnv1a64(print_schema(*this)); }

namespace {

struct PendingEntity {
    TypeDecl decl;
    int line, col;
};
struct PendingRelation {
    RelationDecl decl;
    int line, col;
};

void check_parent(const SchemaDef& s, const std::string& name, const std::string& parent,
                  TypeKind expected, int line, int col) {
    if (!s.has_type(parent))
        throw ParseError("unknown parent '" + parent + "' for type '" + name + "'", line, col);
    auto kind = s.kind_of(parent);
    if (kind != expected)
        throw ParseError("parent '" + parent + "' of '" + name + "' has the wrong kind", line, col);
}

// Walks parent chains; throws on any cycle (a chain that revisits a node).
void check_acyclic(const SchemaDef& s) {
    auto walk = [&](const std::string& start, auto parent_of) {
        std::set<std::string> seen;
        std::string cur = start;
        while (!SchemaDef::is_root(cur)) {
            if (!seen.insert(cur).second)
                throw SchemaError("subtype cycle through '" + cur + "'", cur);
            cur = parent_of(cur);
        }
    };
    for (const auto& [name, _] : s.entity_types())
        walk(name, [&](const std::string& n) { return s.entity(n)->parent; });
    for (const auto& [name, _] : s.relation_types())
        walk(name, [&](const std::string& n) { return s.relation(n)->parent; });
}

}  // namespace

SchemaDef parse_schema(std::string_view text) {
    detail::Scanner sc(text);
    SchemaDef schema;
    std::vector<PendingEntity> entities;
    std::vector<PendingRelation> relations;

    while (!sc.at_end()) {
        int line = sc.line(), col = sc.column();
        std::string kw = sc.expect_ident("schema declaration");
        if (kw == "entity") {
            PendingEntity p{{}, line, col};
            p.decl.name = sc.expect_ident("entity declaration");
            sc.expect_keyword("sub", "entity declaration");
            p.decl.parent = sc.expect_ident("entity declaration");
            bool have_layer = false;
            while (true) {
                if (sc.try_symbol(',')) {
                    std::string item = sc.expect_ident("entity declaration");
                    if (item == "owns") {
                        p.decl.owned_attributes.insert(sc.expect_ident("owns clause"));
                    } else if (item == "layer") {
                        sc.expect_symbol('(', "layer annotation");
                        std::string l = sc.expect_ident("layer annotation");
                        auto layer = layer_from_name(l);
                        if (!layer)
                            throw ParseError("unknown layer '" + l + "'", sc.line(), sc.column(),
                                             "upper|mid|domain");
                        sc.expect_symbol(')', "layer annotation");
                        p.decl.layer = *layer;
                        have_layer = true;
                    } else {
                        throw ParseError("unexpected token '" + item + "' in entity declaration",
                                         sc.line(), sc.column(), "'owns' or 'layer'");
                    }
                    continue;
                }
                std::string trailing;
                if (sc.peek() != ';' && sc.try_ident(trailing)) {
                    if (trailing != "layer")
                        throw ParseError("unexpected token '" + trailing + "' in entity declaration",
                                         sc.line(), sc.column(), "'layer' or ';'");
                    sc.expect_symbol('(', "layer annotation");
                    std::string l = sc.expect_ident("layer annotation");
                    auto layer = layer_from_name(l);
                    if (!layer)
                        throw ParseError("unknown layer '" + l + "'", sc.line(), sc.column(),
                                         "upper|mid|domain");
                    sc.expect_symbol(')', "layer annotation");
                    p.decl.layer = *layer;
                    have_layer = true;
                    continue;
                }
                break;
            }
            sc.expect_symbol(';', "entity declaration");
            if (!have_layer)
                throw ParseError("entity '" + p.decl.name + "' is missing a layer annotation",
                                 line, col, "layer(upper|mid|domain)");
            entities.push_back(std::move(p));
        } else if (kw == "relation") {
            PendingRelation p{{}, line, col};
            p.decl.name = sc.expect_ident("relation declaration");
            sc.expect_keyword("sub", "relation declaration");
            p.decl.parent = sc.expect_ident("relation declaration");
            while (sc.try_symbol(',')) {
                std::string item = sc.expect_ident("relation declaration");
                if (item == "relates") {
                    std::string role = sc.expect_ident("relates clause");
                    sc.expect_symbol(':', "relates clause");
                    std::string player = sc.expect_ident("relates clause");
                    auto it = std::find_if(p.decl.roles.begin(), p.decl.roles.end(),
                                           [&](const RoleDecl& r) { return r.name == role; });
                    if (it == p.decl.roles.end())
                        p.decl.roles.push_back({role, {player}});
                    else
                        it->player_types.insert(player);
                } else if (item == "owns") {
                    p.decl.owned_attributes.insert(sc.expect_ident("owns clause"));
                } else {
                    throw ParseError("unexpected token '" + item + "' in relation declaration",
                                     sc.line(), sc.column(), "'relates' or 'owns'");
                }
            }
            sc.expect_symbol(';', "relation declaration");
            relations.push_back(std::move(p));
        } else if (kw == "attribute") {
            AttributeDecl decl;
            decl.name = sc.expect_ident("attribute declaration");
            sc.expect_keyword("value", "attribute declaration");
            std::string kind_name = sc.expect_ident("attribute declaration");
            auto kind = value_kind_from_name(kind_name);
            if (!kind)
                throw ParseError("unknown value kind '" + kind_name + "'", sc.line(), sc.column(),
                                 "string|double|datetime|boolean");
            decl.value_kind = *kind;
            sc.expect_symbol(';', "attribute declaration");
            try {
                schema.add_attribute(std::move(decl));
            } catch (const SchemaError& e) {
                throw ParseError(e.what(), line, col);
            }
        } else {
            throw ParseError("unexpected token '" + kw + "'", line, col,
                             "'entity', 'relation' or 'attribute'");
        }
    }

    // Second pass: register declarations, then resolve references.
    for (const auto& p : entities) {
        try {
            schema.add_entity(p.decl);
        } catch (const SchemaError& e) {
            throw ParseError(e.what(), p.line, p.col);
        }
    }
    for (const auto& p : relations) {
        try {
            schema.add_relation(p.decl);
        } catch (const SchemaError& e) {
            throw ParseError(e.what(), p.line, p.col);
        }
    }
    for (const auto& p : entities) {
        const TypeDecl* d = schema.entity(p.decl.name);
        check_parent(schema, d->name, d->parent, TypeKind::entity, p.line, p.col);
        for (const auto& a : d->owned_attributes)
            if (schema.kind_of(a) != TypeKind::attribute || SchemaDef::is_root(a))
                throw ParseError("'" + d->name + "' owns unknown attribute '" + a + "'", p.line,
                                 p.col);
    }
    for (const auto& p : relations) {
        const RelationDecl* d = schema.relation(p.decl.name);
        check_parent(schema, d->name, d->parent, TypeKind::relation, p.line, p.col);
        for (const RoleDecl& r : d->roles)
            for (const auto& player : r.player_types)
                if (!schema.has_type(player))
                    throw ParseError("role '" + r.name + "' of '" + d->name +
                                         "' allows unknown player type '" + player + "'",
                                     p.line, p.col);
        for (const auto& a : d->owned_attributes)
            if (schema.kind_of(a) != TypeKind::attribute || SchemaDef::is_root(a))
                throw ParseError("'" + d->name + "' owns unknown attribute '" + a + "'", p.line,
                                 p.col);
    }

    check_acyclic(schema);
    return schema;
}

std::string print_schema(const SchemaDef& schema) {
    std::ostringstream out;
    for (const auto& [name, d] : schema.attribute_types())
        out << "attribute " << name << " value " << to_string(d.value_kind) << " ;\n";
    for (const auto& [name, d] : schema.entity_types()) {
        out << "entity " << name << " sub " << d.parent;
        for (const auto& a : d.owned_attributes) out << ", owns " << a;
        out << " layer(" << to_string(d.layer) << ") ;\n";
    }
    for (const auto& [name, d] : schema.relation_types()) {
        out << "relation " << name << " sub " << d.parent;
        for (const RoleDecl& r : d.roles)
            for (const auto& player : r.player_types) out << ", relates " << r.name << ":" << player;
        for (const auto& a : d.owned_attributes) out << ", owns " << a;
        out << " ;\n";
    }
    return out.str();
}

std::vector<Violation> validate_schema(const SchemaDef& schema) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string type, std::string msg) {
        out.push_back({std::move(code), std::move(type), std::move(msg)});
    };

    // Cross-kind name collisions.
    for (const auto& [name, _] : schema.entity_types()) {
        if (schema.relation_types().count(name) || schema.attribute_types().count(name))
            add("duplicate-name", name, "type name declared with more than one kind");
    }
    for (const auto& [name, _] : schema.relation_types())
        if (schema.attribute_types().count(name))
            add("duplicate-name", name, "type name declared with more than one kind");

    // Parent resolution + forest shape.
    auto check_chain = [&](const std::string& start, TypeKind kind, auto parent_of) {
        std::set<std::string> seen;
        std::string cur = start;
        while (!SchemaDef::is_root(cur)) {
            if (!seen.insert(cur).second) {
                add("subtype-cycle", start, "subtype chain revisits '" + cur + "'");
                return;
            }
            auto k = schema.kind_of(cur);
            if (!k) {
                add("unknown-parent", start, "chain reaches unknown type '" + cur + "'");
                return;
            }
            if (*k != kind) {
                add("kind-mismatch", start, "chain crosses into a different kind at '" + cur + "'");
                return;
            }
            cur = parent_of(cur);
        }
        // chain must end at the matching root
        if ((kind == TypeKind::entity && cur != SchemaDef::kEntityRoot) ||
            (kind == TypeKind::relation && cur != SchemaDef::kRelationRoot))
            add("wrong-root", start, "chain terminates at the wrong root '" + cur + "'");
    };
    for (const auto& [name, _] : schema.entity_types())
        check_chain(name, TypeKind::entity,
                    [&](const std::string& n) { return schema.entity(n)->parent; });
    for (const auto& [name, _] : schema.relation_types())
        check_chain(name, TypeKind::relation,
                    [&](const std::string& n) { return schema.relation(n)->parent; });

    // Domain entities need a mid or upper ancestor.
    for (const auto& [name, d] : schema.entity_types()) {
        if (d.layer != Layer::domain) continue;
        bool ok = false;
        std::set<std::string> seen{name};
        std::string cur = d.parent;
        while (!SchemaDef::is_root(cur) && seen.insert(cur).second) {
            const TypeDecl* p = schema.entity(cur);
            if (!p) break;
            if (p->layer == Layer::mid || p->layer == Layer::upper) {
                ok = true;
                break;
            }
            cur = p->parent;
        }
        if (!ok) add("orphan-domain", name, "domain type has no mid/upper ancestor");
    }

    // Relations: at least one role; role players must exist.
    for (const auto& [name, d] : schema.relation_types()) {
        if (d.roles.empty()) add("missing-role", name, "relation declares no roles");
        for (const RoleDecl& r : d.roles) {
            if (r.player_types.empty())
                add("missing-player", name, "role '" + r.name + "' allows no player types");
            for (const auto& player : r.player_types)
                if (!schema.has_type(player))
                    add("unknown-player", name,
                        "role '" + r.name + "' allows unknown type '" + player + "'");
        }
    }

    // Ownership references.
    auto check_owns = [&](const std::string& name, const std::set<std::string>& owns) {
        for (const auto& a : owns)
            if (SchemaDef::is_root(a) || schema.kind_of(a) != TypeKind::attribute)
                add("unknown-attribute", name, "owns unknown attribute '" + a + "'");
    };
    for (const auto& [name, d] : schema.entity_types()) check_owns(name, d.owned_attributes);
    for (const auto& [name, d] : schema.relation_types()) check_owns(name, d.owned_attributes);

    return out;
}

bool is_subtype(const SchemaDef& schema, std::string_view child, std::string_view parent) {
    return schema.is_subtype(child, parent);
}

}  // namespace dcmd
