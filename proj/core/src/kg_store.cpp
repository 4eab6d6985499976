// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

std::uint32_t Interner::intern(std::string_view name) {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    return std::nullopt;
}

std::optional<EntityId> SymbolTable::find_entity(std::string_view name) const {
    if (auto id = entities_.find(name)) return EntityId{*id};
    return std::nullopt;
}

std::optional<RelationId> SymbolTable::find_relation(std::string_view name) const {
    if (auto id = relations_.find(name)) return RelationId{*id};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

void KnowledgeGraph::check(EntityId id) const {
    if (index_of(id) >= symbols_.entity_count()) {
        throw Error(ErrorCode::NotFound, "unknown entity id " + std::to_string(index_of(id)));
    }
}

void KnowledgeGraph::check(RelationId id) const {
    if (index_of(id) >= symbols_.relation_count()) {
        throw Error(ErrorCode::NotFound, "unknown relation id " + std::to_string(index_of(id)));
    }
}

bool KnowledgeGraph::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

EntityId KnowledgeGraph::entity(std::string_view name) const {
    if (auto id = symbols_.find_entity(name)) return *id;
    throw Error(ErrorCode::NotFound, "unknown entity '" + std::string(name) + "'");
}

RelationId KnowledgeGraph::relation(std::string_view name) const {
    if (auto id = symbols_.find_relation(name)) return *id;
    throw Error(ErrorCode::NotFound, "unknown relation '" + std::string(name) + "'");
}

std::span<const KnowledgeGraph::Edge> KnowledgeGraph::out_edges(EntityId entity) const {
    check(entity);
    const auto i = index_of(entity);
    return std::span(out_edges_).subspan(out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]);
}

std::span<const KnowledgeGraph::Edge> KnowledgeGraph::in_edges(EntityId entity) const {
    check(entity);
    const auto i = index_of(entity);
    return std::span(in_edges_).subspan(in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]);
}

std::vector<DirectedRelation> KnowledgeGraph::relations_of(EntityId entity) const {
    std::vector<DirectedRelation> out;
    // Edges are sorted by relation id, so distinct relations are adjacent.
    for (const auto& e : out_edges(entity)) {
        if (out.empty() || out.back().relation != e.relation) out.push_back({e.relation, Direction::Outgoing});
    }
    const auto n_out = out.size();
    for (const auto& e : in_edges(entity)) {
        if (out.size() == n_out || out.back().relation != e.relation) out.push_back({e.relation, Direction::Incoming});
    }
    std::sort(out.begin(), out.end(), [&](const DirectedRelation& a, const DirectedRelation& b) {
        const auto ra = relation_rank_[index_of(a.relation)];
        const auto rb = relation_rank_[index_of(b.relation)];
        if (ra != rb) return ra < rb;
        return a.direction < b.direction;
    });
    return out;
}

std::vector<Triple> KnowledgeGraph::expand(EntityId entity, RelationId relation) const {
    check(relation);
    auto by_relation = [](const Edge& e, RelationId r) { return e.relation < r; };
    auto relation_before = [](RelationId r, const Edge& e) { return r < e.relation; };

    std::vector<Triple> out;
    const auto outs = out_edges(entity);
    auto lo = std::lower_bound(outs.begin(), outs.end(), relation, by_relation);
    auto hi = std::upper_bound(lo, outs.end(), relation, relation_before);
    for (auto it = lo; it != hi; ++it) out.push_back({entity, relation, it->other});

    const auto ins = in_edges(entity);
    lo = std::lower_bound(ins.begin(), ins.end(), relation, by_relation);
    hi = std::upper_bound(lo, ins.end(), relation, relation_before);
    for (auto it = lo; it != hi; ++it) {
        if (it->other == entity) continue;  // self-loop already reported as outgoing
        out.push_back({it->other, relation, entity});
    }
    return out;
}

bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    if (a.entity_count() != b.entity_count() || a.relation_count() != b.relation_count()) return false;
    for (std::uint32_t i = 0; i < a.entity_count(); ++i) {
        if (a.name(EntityId{i}) != b.name(EntityId{i})) return false;
    }
    for (std::uint32_t i = 0; i < a.relation_count(); ++i) {
        if (a.name(RelationId{i}) != b.name(RelationId{i})) return false;
    }
    return a.triples_ == b.triples_;
}

// ---------------------------------------------------------------------------
// Builder

void KnowledgeGraphBuilder::add(std::string_view head, std::string_view relation, std::string_view tail) {
    const auto h = symbols_.intern_entity(head);
    const auto r = symbols_.intern_relation(relation);
    const auto t = symbols_.intern_entity(tail);
    triples_.push_back({h, r, t});
}

namespace {

void build_csr(std::size_t n_entities, std::vector<std::pair<std::uint32_t, KnowledgeGraph::Edge>>& rows,
               std::vector<std::uint32_t>& offsets, std::vector<KnowledgeGraph::Edge>& edges) {
    std::sort(rows.begin(), rows.end());
    offsets.assign(n_entities + 1, 0);
    for (const auto& [node, edge] : rows) ++offsets[node + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    edges.clear();
    edges.reserve(rows.size());
    for (const auto& row : rows) edges.push_back(row.second);
}

}  // namespace

KnowledgeGraph KnowledgeGraphBuilder::build() && {
    KnowledgeGraph g;
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

    const auto n = symbols_.entity_count();
    std::vector<std::pair<std::uint32_t, KnowledgeGraph::Edge>> rows;
    rows.reserve(triples_.size());
    for (const auto& t : triples_) rows.push_back({index_of(t.head), {t.relation, t.tail}});
    build_csr(n, rows, g.out_offsets_, g.out_edges_);
    rows.clear();
    for (const auto& t : triples_) rows.push_back({index_of(t.tail), {t.relation, t.head}});
    build_csr(n, rows, g.in_offsets_, g.in_edges_);

    std::vector<std::uint32_t> order(symbols_.relation_count());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return symbols_.name(RelationId{a}) < symbols_.name(RelationId{b});
    });
    g.relation_rank_.resize(order.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) g.relation_rank_[order[rank]] = rank;

    g.triples_ = std::move(triples_);
    g.symbols_ = std::move(symbols_);
    return g;
}

// ---------------------------------------------------------------------------
// MetaQA loader

KnowledgeGraph load_metaqa_kb(std::istream& in, LoadStats* stats) {
    KnowledgeGraphBuilder builder;
    LoadStats local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (text::trim(view).empty()) continue;
        ++local.lines;

        const auto first = view.find('|');
        const auto second = first == std::string_view::npos ? first : view.find('|', first + 1);
        if (second == std::string_view::npos || view.find('|', second + 1) != std::string_view::npos) {
            throw ParseError(line_no, "expected 'subject|relation|object'");
        }
        const auto subject = view.substr(0, first);
        const auto relation = view.substr(first + 1, second - first - 1);
        const auto object = view.substr(second + 1);
        if (subject.empty() || relation.empty() || object.empty()) {
            throw ParseError(line_no, "empty field in 'subject|relation|object'");
        }
        builder.add(subject, relation, object);
    }
    auto g = std::move(builder).build();
    local.duplicates = local.lines - g.triple_count();
    if (stats) *stats = local;
    return g;
}

KnowledgeGraph load_metaqa_kb_file(const std::string& path, LoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open kb file '" + path + "'");
    return load_metaqa_kb(in, stats);
}

}  // namespace kgnav
