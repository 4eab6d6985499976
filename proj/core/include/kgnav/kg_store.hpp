// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Immutable in-memory knowledge graph.
//
// Entities and relations are interned into two independent dense id spaces.
// Triples are stored once, sorted and unique, with two CSR-style adjacency
// indexes built over them:
//
//   out index: head -> [(relation, tail)]   sorted by (relation id, tail id)
//   in index:  tail -> [(relation, head)]   sorted by (relation id, head id)
//
// so that expand(entity, relation) is two binary searches. The graph is never
// mutated after KnowledgeGraphBuilder::build(); concurrent readers need no
// synchronisation.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgnav {

enum class EntityId : std::uint32_t {};
enum class RelationId : std::uint32_t {};

constexpr std::uint32_t index_of(EntityId id) noexcept { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index_of(RelationId id) noexcept { return static_cast<std::uint32_t>(id); }

/// Bidirectional string <-> dense id map. Ids are assigned in first-intern
/// order and are never reused.
class Interner {
public:
    std::uint32_t intern(std::string_view name);
    [[nodiscard]] std::optional<std::uint32_t> find(std::string_view name) const;
    [[nodiscard]] const std::string& resolve(std::uint32_t id) const { return names_.at(id); }
    [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

class SymbolTable {
public:
    EntityId intern_entity(std::string_view name) { return EntityId{entities_.intern(name)}; }
    RelationId intern_relation(std::string_view name) { return RelationId{relations_.intern(name)}; }

    [[nodiscard]] std::optional<EntityId> find_entity(std::string_view name) const;
    [[nodiscard]] std::optional<RelationId> find_relation(std::string_view name) const;

    [[nodiscard]] const std::string& name(EntityId id) const { return entities_.resolve(index_of(id)); }
    [[nodiscard]] const std::string& name(RelationId id) const { return relations_.resolve(index_of(id)); }

    [[nodiscard]] std::size_t entity_count() const noexcept { return entities_.size(); }
    [[nodiscard]] std::size_t relation_count() const noexcept { return relations_.size(); }

private:
    Interner entities_;
    Interner relations_;
};

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Direction : std::uint8_t { Outgoing, Incoming };

/// A relation as seen from one entity. Outgoing: the entity is the head.
struct DirectedRelation {
    RelationId relation;
    Direction direction;

    friend bool operator==(const DirectedRelation&, const DirectedRelation&) = default;
};

struct LoadStats {
    std::size_t lines = 0;       // non-empty lines read
    std::size_t duplicates = 0;  // lines that repeated an earlier triple
};

class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    [[nodiscard]] const SymbolTable& symbols() const noexcept { return symbols_; }
    [[nodiscard]] std::span<const Triple> triples() const noexcept { return triples_; }

    [[nodiscard]] std::size_t entity_count() const noexcept { return symbols_.entity_count(); }
    [[nodiscard]] std::size_t relation_count() const noexcept { return symbols_.relation_count(); }
    [[nodiscard]] std::size_t triple_count() const noexcept { return triples_.size(); }

    [[nodiscard]] bool contains(const Triple& t) const;

    /// Name lookups. Throw Error{NotFound} for unknown names.
    [[nodiscard]] EntityId entity(std::string_view name) const;
    [[nodiscard]] RelationId relation(std::string_view name) const;
    [[nodiscard]] const std::string& name(EntityId id) const { return symbols_.name(id); }
    [[nodiscard]] const std::string& name(RelationId id) const { return symbols_.name(id); }

    /// Distinct (relation, direction) pairs incident to `entity`, ordered by
    /// relation name, outgoing before incoming.
    [[nodiscard]] std::vector<DirectedRelation> relations_of(EntityId entity) const;

    /// Every triple with `relation` that has `entity` as head, then every one
    /// that has it as tail. Within each half, ordered by the other endpoint's
    /// id. A self-loop is reported once.
    [[nodiscard]] std::vector<Triple> expand(EntityId entity, RelationId relation) const;

    /// (relation, other endpoint) pairs where `entity` is the head.
    struct Edge {
        RelationId relation;
        EntityId other;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };
    [[nodiscard]] std::span<const Edge> out_edges(EntityId entity) const;
    [[nodiscard]] std::span<const Edge> in_edges(EntityId entity) const;

    /// Total number of index entries; each of out and in must equal triple_count().
    [[nodiscard]] std::size_t out_index_size() const noexcept { return out_edges_.size(); }
    [[nodiscard]] std::size_t in_index_size() const noexcept { return in_edges_.size(); }

    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b);

private:
    friend class KnowledgeGraphBuilder;

    void check(EntityId id) const;
    void check(RelationId id) const;

    SymbolTable symbols_;
    std::vector<Triple> triples_;
    std::vector<std::uint32_t> out_offsets_;
    std::vector<Edge> out_edges_;
    std::vector<std::uint32_t> in_offsets_;
    std::vector<Edge> in_edges_;
    std::vector<std::uint32_t> relation_rank_;  // relation id -> position in name order
};

/// Single-threaded accumulator; build() freezes the result.
class KnowledgeGraphBuilder {
public:
    /// Duplicate triples collapse at build().
    void add(std::string_view head, std::string_view relation, std::string_view tail);

    /// Interns an entity without attaching any triple (isolated node).
    EntityId add_entity(std::string_view name) { return symbols_.intern_entity(name); }

    [[nodiscard]] KnowledgeGraph build() &&;

private:
    SymbolTable symbols_;
    std::vector<Triple> triples_;
};

/// Reads the MetaQA kb layout: one `subject|relation|object` per line.
/// Blank lines are skipped, duplicate lines collapse. Throws ParseError with
/// the line number for any line that does not have exactly three non-empty
/// fields.
KnowledgeGraph load_metaqa_kb(std::istream& in, LoadStats* stats = nullptr);
KnowledgeGraph load_metaqa_kb_file(const std::string& path, LoadStats* stats = nullptr);

}  // namespace kgnav
