#include "dcmd/graphstore.hpp"

#include <algorithm>
#include <functional>

#include "dcmd/errors.hpp"

namespace dcmd {

Store::Store(std::shared_ptr<const SchemaDef> schema) : schema_(std::move(schema)) {}

const ThingInstance* Store::find(ThingId id) const {
    auto it = things_.find(id);
    return it == things_.end() ? nullptr : &it->second;
}

const ThingInstance& Store::get(ThingId id) const {
    const ThingInstance* t = find(id);
    if (!t)
        throw StoreError(StoreError::Kind::dangling_reference,
                         "no thing with id " + std::to_string(id));
    return *t;
}

void Store::validate_thing(const std::string& type_name, const AttrMap& attributes,
                           const RoleMap& role_players) const {
    auto kind = schema_->kind_of(type_name);
    if (!kind || SchemaDef::is_root(type_name))
        throw StoreError(StoreError::Kind::unknown_type,
                         "unknown instance type '" + type_name + "'");
    if (*kind == TypeKind::attribute)
        throw StoreError(StoreError::Kind::unknown_type,
                         "attribute type '" + type_name + "' cannot be instantiated");
    if (*kind == TypeKind::entity && !role_players.empty())
        throw StoreError(StoreError::Kind::unknown_role,
                         "entity instance of '" + type_name + "' cannot have role players");

    for (const auto& [attr, value] : attributes) {
        const AttributeDecl* decl = schema_->attribute(attr);
        if (!decl)
            throw StoreError(StoreError::Kind::unknown_attribute,
                             "unknown attribute '" + attr + "'");
        if (!schema_->owns_attribute(type_name, attr))
            throw StoreError(StoreError::Kind::unowned_attribute,
                             "type '" + type_name + "' does not own attribute '" + attr + "'");
        if (value.kind() != decl->value_kind)
            throw StoreError(StoreError::Kind::value_kind_mismatch,
                             "attribute '" + attr + "' expects " + to_string(decl->value_kind) +
                                 ", got " + to_string(value.kind()));
        if (!value.is_finite())
            throw StoreError(StoreError::Kind::value_kind_mismatch,
                             "attribute '" + attr + "' must be finite");
    }

    if (*kind == TypeKind::relation) {
        for (const auto& [role, players] : role_players) {
            const RoleDecl* rd = schema_->find_role(type_name, role);
            if (!rd)
                throw StoreError(StoreError::Kind::unknown_role, "relation '" + type_name +
                                                                     "' has no role '" + role + "'");
            for (ThingId pid : players) {
                const ThingInstance* player = find(pid);
                if (!player)
                    throw StoreError(StoreError::Kind::dangling_reference,
                                     "role player id " + std::to_string(pid) + " does not exist");
                bool allowed = false;
                for (const auto& pt : rd->player_types)
                    if (schema_->is_subtype(player->type_name, pt)) {
                        allowed = true;
                        break;
                    }
                if (!allowed)
                    throw StoreError(StoreError::Kind::illegal_role_player,
                                     "type '" + player->type_name + "' cannot play role '" + role +
                                         "' of '" + type_name + "'");
            }
        }
    }
}

void Store::index_thing(const ThingInstance& t) {
    by_exact_type_[t.type_name].push_back(t.id);
    for (const auto& [attr, value] : t.attributes) by_attr_value_[attr][value].push_back(t.id);
}

ThingId Store::insert_thing(const std::string& type_name, AttrMap attributes,
                            RoleMap role_players) {
    validate_thing(type_name, attributes, role_players);
    ThingId id = next_id_++;
    ThingInstance t{id, type_name, std::move(attributes), std::move(role_players)};
    index_thing(t);
    things_.emplace(id, std::move(t));
    return id;
}

std::vector<ThingId> Store::things_of_type(const std::string& type) const {
    if (!schema_->has_type(type))
        throw StoreError(StoreError::Kind::unknown_type, "unknown type '" + type + "'");
    std::vector<ThingId> out;
    for (const auto& sub : schema_->subtypes_of(type)) {
        auto it = by_exact_type_.find(sub);
        if (it != by_exact_type_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct VarPlan {
    std::vector<std::string> types;                      // isa constraints
    std::vector<const AttrEqClause*> eqs;
    std::vector<const AttrRangeClause*> ranges;
};

bool attr_of(const ThingInstance& t, const std::string& name, AttrValue& out) {
    auto it = t.attributes.find(name);
    if (it == t.attributes.end()) return false;
    out = it->second;
    return true;
}

}  // namespace

std::vector<BindingRow> Store::match(const Pattern& pattern) const {
    // Plan: collect constraints per instance variable, validate names.
    std::map<std::string, VarPlan> plans;
    std::vector<const AttrBindClause*> binds;
    std::vector<const RoleClause*> roles;

    auto check_attr = [&](const std::string& attr) {
        if (!schema_->attribute(attr))
            throw StoreError(StoreError::Kind::unknown_attribute,
                             "unknown attribute '" + attr + "' in pattern");
    };

    for (const PatternClause& clause : pattern.clauses) {
        if (const auto* c = std::get_if<TypeClause>(&clause)) {
            if (!schema_->has_type(c->type_name))
                throw StoreError(StoreError::Kind::unknown_type,
                                 "unknown type '" + c->type_name + "' in pattern");
            plans[c->var].types.push_back(c->type_name);
        } else if (const auto* c = std::get_if<AttrEqClause>(&clause)) {
            check_attr(c->attr);
            plans[c->var].eqs.push_back(c);
        } else if (const auto* c = std::get_if<AttrRangeClause>(&clause)) {
            check_attr(c->attr);
            plans[c->var].ranges.push_back(c);
        } else if (const auto* c = std::get_if<AttrBindClause>(&clause)) {
            check_attr(c->attr);
            plans[c->var];  // ensure instance var exists in plan
            binds.push_back(c);
        } else if (const auto* c = std::get_if<RoleClause>(&clause)) {
            plans[c->relation_var];
            plans[c->player_var];
            roles.push_back(c);
        }
    }

    // Candidate ids per instance variable.
    std::map<std::string, std::vector<ThingId>> candidates;
    for (const auto& [var, plan] : plans) {
        std::vector<ThingId> ids;
        if (!plan.types.empty()) {
            ids = things_of_type(plan.types[0]);
            for (size_t i = 1; i < plan.types.size(); ++i) {
                std::vector<ThingId> other = things_of_type(plan.types[i]);
                std::vector<ThingId> merged;
                std::set_intersection(ids.begin(), ids.end(), other.begin(), other.end(),
                                      std::back_inserter(merged));
                ids = std::move(merged);
            }
        } else {
            for (const auto& [id, _] : things_) ids.push_back(id);
        }
        // Attribute filters.
        std::vector<ThingId> kept;
        for (ThingId id : ids) {
            const ThingInstance& t = things_.at(id);
            bool ok = true;
            AttrValue v;
            for (const auto* eq : plan.eqs)
                if (!attr_of(t, eq->attr, v) || !(v == eq->value)) {
                    ok = false;
                    break;
                }
            if (ok)
                for (const auto* r : plan.ranges) {
                    if (!attr_of(t, r->attr, v) || v.kind() != ValueKind::double_v ||
                        v.as_double() < r->lo || v.as_double() > r->hi) {
                        ok = false;
                        break;
                    }
                }
            if (ok) kept.push_back(id);
        }
        candidates[var] = std::move(kept);
    }

    // Backtracking join in sorted variable order.
    std::vector<std::string> order;
    for (const auto& [var, _] : candidates) order.push_back(var);

    std::vector<BindingRow> rows;
    BindingRow current;

    auto role_ok = [&](const RoleClause& rc) {
        auto rel_it = current.find(rc.relation_var);
        auto player_it = current.find(rc.player_var);
        if (rel_it == current.end() || player_it == current.end()) return true;  // defer
        const ThingInstance& rel = things_.at(rel_it->second.id);
        auto rp = rel.role_players.find(rc.role);
        if (rp == rel.role_players.end()) return false;
        return std::find(rp->second.begin(), rp->second.end(), player_it->second.id) !=
               rp->second.end();
    };

    std::function<void(size_t)> descend = [&](size_t depth) {
        if (depth == order.size()) {
            // Resolve value-binding clauses; the has-clause also filters.
            BindingRow row = current;
            for (const auto* b : binds) {
                const ThingInstance& t = things_.at(row.at(b->var).id);
                AttrValue v;
                if (!attr_of(t, b->attr, v)) return;
                auto existing = row.find(b->value_var);
                if (existing != row.end()) {
                    if (!(existing->second == BindingValue::of_value(v))) return;
                } else {
                    row[b->value_var] = BindingValue::of_value(v);
                }
            }
            rows.push_back(std::move(row));
            return;
        }
        const std::string& var = order[depth];
        for (ThingId id : candidates.at(var)) {
            current[var] = BindingValue::thing(id);
            bool ok = true;
            for (const auto* rc : roles)
                if (!role_ok(*rc)) {
                    ok = false;
                    break;
                }
            if (ok) descend(depth + 1);
            current.erase(var);
        }
    };
    descend(0);

    std::sort(rows.begin(), rows.end(), [](const BindingRow& a, const BindingRow& b) {
        auto ia = a.begin();
        auto ib = b.begin();
        for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first;
            int c = ia->second.compare(ib->second);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    });
    return rows;
}

std::vector<Violation> Store::validate_all() const {
    std::vector<Violation> out;
    for (const auto& [id, t] : things_) {
        try {
            validate_thing(t.type_name, t.attributes, t.role_players);
        } catch (const StoreError& e) {
            out.push_back({"invalid-thing", t.type_name,
                           "thing " + std::to_string(id) + ": " + e.what()});
        }
    }
    return out;
}

}  // namespace dcmd
