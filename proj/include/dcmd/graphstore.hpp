#pragma once
// Per-agent in-memory knowledge graph. Every write is validated against the
// schema; rejected inserts leave the store untouched. Append-only: mission
// stores never delete.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcmd/ontology.hpp"
#include "dcmd/values.hpp"

namespace dcmd {

using ThingId = uint64_t;
using AttrMap = std::map<std::string, AttrValue>;
using RoleMap = std::map<std::string, std::vector<ThingId>>;

struct ThingInstance {
    ThingId id = 0;
    std::string type_name;
    AttrMap attributes;
    RoleMap role_players;  // relations only

    bool operator==(const ThingInstance&) const = default;
};

// Match patterns: conjunctive clauses over typed variables.
struct TypeClause {
    std::string var;
    std::string type_name;  // subtype-aware
};
struct AttrEqClause {
    std::string var;
    std::string attr;
    AttrValue value;
};
struct AttrRangeClause {  // closed numeric range [lo, hi]
    std::string var;
    std::string attr;
    double lo = 0, hi = 0;
};
struct AttrBindClause {  // binds value_var to var's attribute value
    std::string var;
    std::string attr;
    std::string value_var;
};
struct RoleClause {
    std::string relation_var;
    std::string role;
    std::string player_var;
};
using PatternClause =
    std::variant<TypeClause, AttrEqClause, AttrRangeClause, AttrBindClause, RoleClause>;

struct Pattern {
    std::vector<PatternClause> clauses;
};

// A binding is either a thing id or an attribute value.
struct BindingValue {
    bool is_thing = true;
    ThingId id = 0;
    AttrValue value;

    static BindingValue thing(ThingId t) { return {true, t, {}}; }
    static BindingValue of_value(AttrValue v) { return {false, 0, std::move(v)}; }
    bool operator==(const BindingValue& o) const {
        if (is_thing != o.is_thing) return false;
        return is_thing ? id == o.id : value == o.value;
    }
    int compare(const BindingValue& o) const {
        if (is_thing != o.is_thing) return is_thing ? -1 : 1;
        if (is_thing) return id < o.id ? -1 : (id > o.id ? 1 : 0);
        return value.compare(o.value);
    }
};

using BindingRow = std::map<std::string, BindingValue>;

class Store {
public:
    explicit Store(std::shared_ptr<const SchemaDef> schema);

    // Validates and inserts; throws StoreError and leaves the store unchanged
    // on rejection. Returns the fresh id.
    ThingId insert_thing(const std::string& type_name, AttrMap attributes = {},
                         RoleMap role_players = {});

    const ThingInstance* find(ThingId id) const;
    const ThingInstance& get(ThingId id) const;  // throws on missing id

    // All bindings satisfying every clause, subtype-aware on type clauses,
    // rows sorted by binding tuple. Throws StoreError on unknown names.
    std::vector<BindingRow> match(const Pattern& pattern) const;

    // Ids of things whose type is `type` or a subtype, ascending.
    std::vector<ThingId> things_of_type(const std::string& type) const;

    size_t size() const { return things_.size(); }
    const std::map<ThingId, ThingInstance>& things() const { return things_; }
    const SchemaDef& schema() const { return *schema_; }
    std::shared_ptr<const SchemaDef> schema_ptr() const { return schema_; }
    ThingId next_id() const { return next_id_; }

    // Re-validates every stored thing against the schema.
    std::vector<Violation> validate_all() const;

    // Binary snapshot; restore_store() reconstructs an isomorphic store.
    std::vector<uint8_t> snapshot() const;

private:
    friend Store restore_store(std::span<const uint8_t> bytes);
    void validate_thing(const std::string& type_name, const AttrMap& attributes,
                        const RoleMap& role_players) const;
    void index_thing(const ThingInstance& t);

    std::shared_ptr<const SchemaDef> schema_;
    std::map<ThingId, ThingInstance> things_;
    ThingId next_id_ = 1;

    std::map<std::string, std::vector<ThingId>> by_exact_type_;
    std::map<std::string, std::map<AttrValue, std::vector<ThingId>>> by_attr_value_;
};

// Rebuilds a store from snapshot bytes; the schema travels inside the
// snapshot. Throws DecodeError with the failing byte offset.
Store restore_store(std::span<const uint8_t> bytes);

// Restore that requires the snapshot's schema hash to match `expected`.
Store restore_store(std::span<const uint8_t> bytes, const SchemaDef& expected);

struct Scenario;

// Loads mission contexts, operational areas, general-class documents, and one
// instance record per known object (with assigned location, size quality, and
// class-document links). Returns the number of things inserted.
size_t load_a_priori(Store& store, const Scenario& scenario);

}  // namespace dcmd
