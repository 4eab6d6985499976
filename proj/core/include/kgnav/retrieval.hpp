// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Depth-bounded, oracle-pruned retrieval.
//
// Each hop takes the current frontier and, independently for every frontier
// entity:
//
//   1. lists its incident relation names (capped),
//   2. asks the oracle, once per bundle member, for the k most relevant ones,
//   3. tallies the ballots with the original question weighted 2 and each
//      variant weighted 1,
//   4. keeps the m best-scoring relations (score desc, name asc),
//   5. pulls every triple with one of those relations touching the entity,
//      in either direction, into the retrieved-knowledge set.
//
// Endpoints of the new triples that were never on a frontier form the next
// frontier. Retrieval stops after `bundle.hops` hops or as soon as the
// frontier is empty.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/question_analysis.hpp"

namespace kgnav {

struct RetrievalConfig {
    int top_k = 1;  // relations each ballot may name
    int top_m = 1;  // relations expanded per entity after voting
    int max_hops = 3;
    std::size_t candidate_cap = 64;

    /// Throws Error{Config} unless 1 <= top_k <= candidate_cap, top_m >= 1
    /// and max_hops >= 1.
    void validate() const;
};

struct CandidateList {
    std::vector<std::string> names;
    std::size_t total = 0;  // distinct names before capping
    [[nodiscard]] bool truncated() const noexcept { return total > names.size(); }
};

/// Distinct relation names incident to `entity`, in name order, keeping the
/// first `cap`.
CandidateList gather_candidates(const KnowledgeGraph& g, EntityId entity, std::size_t cap);

struct Ballot {
    std::size_t source = 0;  // bundle member: 0 = original question
    EntityId entity{};
    std::vector<std::string> chosen;

    friend bool operator==(const Ballot&, const Ballot&) = default;
};

/// relation name -> weighted vote count, for one entity.
using RelationScores = std::map<std::string, int>;

struct ScoreBoard {
    std::map<EntityId, RelationScores> entries;
    friend bool operator==(const ScoreBoard&, const ScoreBoard&) = default;
};

/// One worked example for the relation-selection prompt.
struct RelationExample {
    std::string question;
    std::string entity;
    std::vector<std::string> candidates;
    std::vector<std::string> answer;
};

struct RelationPromptOptions {
    /// Placeholders: {k}, {examples}, {question}, {entity}, {candidates}.
    std::string prompt_template;
    std::vector<RelationExample> few_shot;
    DecodingParams params;
};

std::string default_relation_template();

/// Relation-selection prompt for one (question text, entity) pair.
std::string relation_prompt(const RelationPromptOptions& options, const std::string& question,
                            const std::string& entity, std::span<const std::string> candidates, int k);

/// Parses an oracle reply: pieces separated by newlines, ';' or ',' are
/// trimmed and matched case-insensitively against `candidates`. The first k
/// distinct matches are kept in reply order.
std::vector<std::string> parse_relation_reply(std::string_view reply, std::span<const std::string> candidates,
                                              std::size_t k);

struct BallotContext {
    std::string question_id;
    int hop = 1;
};

/// One ballot per bundle member. `member_order`, when given, is the order in
/// which members are polled; it must be a permutation of 0..member_count-1.
/// Gateway errors propagate. `diagnostics` receives a line for each ballot
/// that matched no candidate.
std::vector<Ballot> cast_ballots(LlmGateway& gateway, const QuestionBundle& bundle, EntityId entity,
                                 const std::string& entity_name, std::span<const std::string> candidates, int k,
                                 const BallotContext& context, const RelationPromptOptions& options,
                                 std::vector<std::string>* diagnostics = nullptr,
                                 std::span<const std::size_t> member_order = {});

/// Weighted vote over ballots that all concern one entity.
RelationScores tally_votes(std::span<const Ballot> ballots);

/// The m best relations by (score desc, name asc); zero scores never win.
std::vector<std::string> select_top_m(const RelationScores& scores, int m);

struct RetrievedTriple {
    Triple triple;
    int hop = 0;
    EntityId anchor{};  // frontier entity whose expansion produced the triple

    friend auto operator<=>(const RetrievedTriple&, const RetrievedTriple&) = default;
};

/// What happened for one frontier entity during one hop.
struct EntityStep {
    int hop = 0;
    EntityId entity{};
    CandidateList candidates;
    std::vector<Ballot> ballots;
    RelationScores scores;
    std::vector<std::string> selected;
    std::vector<Triple> triples_added;
};

struct RetrievalState {
    std::vector<EntityId> frontier;  // sorted
    std::vector<EntityId> visited;   // sorted
    std::vector<RetrievedTriple> rk;  // sorted by (triple, hop, anchor); one entry per triple
    int hops_completed = 0;
    bool interrupted = false;
    std::string interruption;
    std::vector<std::string> diagnostics;
    ScoreBoard scores;
    std::vector<EntityStep> steps;  // sorted by (hop, entity name)

    [[nodiscard]] bool contains(const Triple& t) const;
    [[nodiscard]] std::vector<Triple> triples() const;
    /// Every entity that appears in some RK triple.
    [[nodiscard]] std::set<EntityId> entities() const;
};

struct RetrievalOptions {
    RelationPromptOptions prompts;
    /// When set, frontier entities and ballot members are visited in an order
    /// shuffled with this seed. Results must not depend on it.
    std::optional<std::uint64_t> schedule_seed;
    /// Called after each completed hop with the state so far.
    std::function<void(const RetrievalState&)> on_hop;
};

/// Runs the hop loop. Throws Error{Setup} for topic entities missing from the
/// graph or a bundle whose hop count exceeds cfg.max_hops. Backend failures do
/// not throw: the state is returned with `interrupted` set.
RetrievalState retrieve(const KnowledgeGraph& g, LlmGateway& gateway, const QuestionBundle& bundle,
                        const RetrievalConfig& cfg, const RetrievalOptions& options = {});

}  // namespace kgnav
