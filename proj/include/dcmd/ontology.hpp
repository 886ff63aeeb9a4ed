#pragma once
// Layered type system for the knowledge graph: entity, relation, and
// attribute types with subtyping, role constraints, and attribute ownership.
// Three built-in roots exist implicitly: entity, relation, attribute.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dcmd/values.hpp"

namespace dcmd {

enum class Layer : uint8_t { upper, mid, domain };
enum class TypeKind : uint8_t { entity, relation, attribute };

std::string to_string(Layer layer);
std::optional<Layer> layer_from_name(std::string_view name);

struct TypeDecl {
    std::string name;
    std::string parent;
    Layer layer = Layer::domain;
    std::set<std::string> owned_attributes;
    bool operator==(const TypeDecl&) const = default;
};

struct RoleDecl {
    std::string name;
    std::set<std::string> player_types;
    bool operator==(const RoleDecl&) const = default;
};

struct RelationDecl {
    std::string name;
    std::string parent;
    std::vector<RoleDecl> roles;  // declaration order preserved
    std::set<std::string> owned_attributes;
    bool operator==(const RelationDecl&) const = default;
};

struct AttributeDecl {
    std::string name;
    ValueKind value_kind = ValueKind::string_v;
    bool operator==(const AttributeDecl&) const = default;
};

struct Violation {
    std::string code;       // e.g. "missing-role", "orphan-domain"
    std::string type_name;  // offending type
    std::string message;
};

class SchemaDef {
public:
    static constexpr const char* kEntityRoot = "entity";
    static constexpr const char* kRelationRoot = "relation";
    static constexpr const char* kAttributeRoot = "attribute";

    SchemaDef() = default;

    // Declaration-time interface; throws SchemaError on duplicates.
    void add_entity(TypeDecl decl);
    void add_relation(RelationDecl decl);
    void add_attribute(AttributeDecl decl);

    static bool is_root(std::string_view name);
    bool has_type(std::string_view name) const;
    std::optional<TypeKind> kind_of(std::string_view name) const;

    const TypeDecl* entity(std::string_view name) const;
    const RelationDecl* relation(std::string_view name) const;
    const AttributeDecl* attribute(std::string_view name) const;

    const std::map<std::string, TypeDecl>& entity_types() const { return entities_; }
    const std::map<std::string, RelationDecl>& relation_types() const { return relations_; }
    const std::map<std::string, AttributeDecl>& attribute_types() const { return attributes_; }

    // Reflexive, transitive subtype reachability. Throws StoreError(unknown_type)
    // when either name does not exist.
    bool is_subtype(std::string_view child, std::string_view parent) const;

    // All non-root types whose chain reaches `type` (including `type` itself
    // when non-root). Used by subtype-aware matching.
    std::vector<std::string> subtypes_of(std::string_view type) const;

    // Attribute ownership including inherited ownership from ancestors.
    bool owns_attribute(std::string_view type, std::string_view attr) const;

    // Role lookup walking the relation's own declaration only.
    const RoleDecl* find_role(std::string_view relation, std::string_view role) const;

    bool operator==(const SchemaDef& other) const {
        return entities_ == other.entities_ && relations_ == other.relations_ &&
               attributes_ == other.attributes_;
    }

    uint64_t hash() const;  // FNV-1a over the canonical printed form

private:
    std::map<std::string, TypeDecl> entities_;
    std::map<std::string, RelationDecl> relations_;
    std::map<std::string, AttributeDecl> attributes_;
};

// Parses the schema declaration language:
//   entity <name> sub <parent> [, owns <attr>]... layer(upper|mid|domain) ;
//   relation <name> sub <parent>, relates <role>:<player> [, ...] [, owns <attr>]... ;
//   attribute <name> value <string|double|datetime|boolean> ;
// '#' starts a comment. Rejects duplicates, unknown parents, and cycles.
SchemaDef parse_schema(std::string_view text);

// Canonical form; parse_schema(print_schema(s)) == s.
std::string print_schema(const SchemaDef& schema);

std::vector<Violation> validate_schema(const SchemaDef& schema);

bool is_subtype(const SchemaDef& schema, std::string_view child, std::string_view parent);

uint64_t fnv1a64(std::string_view bytes);

}  // namespace dcmd
