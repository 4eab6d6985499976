// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

void RetrievalConfig::validate() const {
    if (top_k < 1) throw Error(ErrorCode::Config, "K must be >= 1");
    if (top_m < 1) throw Error(ErrorCode::Config, "M must be >= 1");
    if (max_hops < 1) throw Error(ErrorCode::Config, "H must be >= 1");
    if (static_cast<std::size_t>(top_k) > candidate_cap) {
        throw Error(ErrorCode::Config, "K must not exceed the candidate cap");
    }
}

CandidateList gather_candidates(const KnowledgeGraph& g, EntityId entity, std::size_t cap) {
    CandidateList out;
    const std::string* last = nullptr;
    // relations_of is name ordered, so both directions of a name are adjacent.
    for (const auto& dr : g.relations_of(entity)) {
        const auto& name = g.name(dr.relation);
        if (last != nullptr && *last == name) continue;
        last = &name;
        ++out.total;
        if (out.names.size() < cap) out.names.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ballots

std::string default_relation_template() {
    return "Select the {k} relation(s) from the candidate list that are most relevant for answering the "
           "question, starting from the topic entity. Output exactly {k} relation name(s), one per line, "
           "copied exactly from the candidate list, with no other text.\n"
           "\n"
           "{examples}"
           "Question: {question}\n"
           "Topic entity: {entity}\n"
           "Candidate relations: {candidates}\n"
           "Relations:\n";
}

namespace {

std::string join(std::span<const std::string> items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

std::string render_examples(const std::vector<RelationExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        out += "Question: " + ex.question + "\n";
        out += "Topic entity: " + ex.entity + "\n";
        out += "Candidate relations: " + join(ex.candidates, "; ") + "\n";
        out += "Relations:\n" + join(ex.answer, "\n") + "\n\n";
    }
    return out;
}

std::string_view strip_decoration(std::string_view s) {
    s = text::strip_list_marker(s);
    auto is_decoration = [](char c) { return c == '"' || c == '\'' || c == '`' || c == '*' || c == '.'; };
    while (!s.empty() && is_decoration(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_decoration(s.back())) s.remove_suffix(1);
    return text::trim(s);
}

}  // namespace

std::string relation_prompt(const RelationPromptOptions& options, const std::string& question,
                            const std::string& entity, std::span<const std::string> candidates, int k) {
    const auto& pattern = options.prompt_template.empty() ? default_relation_template() : options.prompt_template;
    const auto examples = render_examples(options.few_shot);
    const auto joined = join(candidates, "; ");
    const auto k_text = std::to_string(k);
    return text::substitute(pattern, {{"k", k_text},
                                      {"examples", examples},
                                      {"question", question},
                                      {"entity", entity},
                                      {"candidates", joined}});
}

std::vector<std::string> parse_relation_reply(std::string_view reply, std::span<const std::string> candidates,
                                              std::size_t k) {
    std::vector<std::string> chosen;
    std::size_t start = 0;
    while (start <= reply.size() && chosen.size() < k) {
        auto end = reply.find_first_of("\n;,", start);
        if (end == std::string_view::npos) end = reply.size();
        const auto piece = strip_decoration(reply.substr(start, end - start));
        if (!piece.empty()) {
            for (const auto& c : candidates) {
                if (text::equals_icase(piece, c)) {
                    if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
                    break;
                }
            }
        }
        start = end + 1;
    }
    return chosen;
}

std::vector<Ballot> cast_ballots(LlmGateway& gateway, const QuestionBundle& bundle, EntityId entity,
                                 const std::string& entity_name, std::span<const std::string> candidates, int k,
                                 const BallotContext& context, const RelationPromptOptions& options,
                                 std::vector<std::string>* diagnostics, std::span<const std::size_t> member_order) {
    std::vector<std::size_t> order(bundle.member_count());
    if (member_order.empty()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
    } else {
        if (member_order.size() != order.size()) throw Error(ErrorCode::Usage, "member order is not a permutation");
        order.assign(member_order.begin(), member_order.end());
    }

    std::vector<Ballot> ballots;
    if (candidates.empty()) return ballots;
    for (const auto member : order) {
        const auto& question = bundle.member_text(member);
        CompletionRequest req;
        req.prompt = relation_prompt(options, question, entity_name, candidates, k);
        req.params = options.params;
        req.hints = {
            {hint::kStage, hint::kStageRelations},
            {hint::kQuestionId, context.question_id},
            {hint::kQuestion, question},
            {hint::kHop, context.hop},
            {hint::kEntity, entity_name},
            {hint::kCandidates, std::vector<std::string>(candidates.begin(), candidates.end())},
            {hint::kK, k},
        };
        const auto reply = gateway.complete(std::move(req));
        Ballot ballot{member, entity, parse_relation_reply(reply.text, candidates, static_cast<std::size_t>(k))};
        if (ballot.chosen.empty() && diagnostics != nullptr) {
            diagnostics->push_back("hop " + std::to_string(context.hop) + ": ballot " + std::to_string(member) +
                                   " for '" + entity_name + "' matched no candidate relation");
        }
        ballots.push_back(std::move(ballot));
    }
    return ballots;
}

RelationScores tally_votes(std::span<const Ballot> ballots) {
    std::vector<std::pair<std::size_t, std::string>> votes;
    for (const auto& b : ballots) {
        for (const auto& r : b.chosen) votes.emplace_back(b.source, r);
    }
    std::sort(votes.begin(), votes.end());
    RelationScores scores;
    for (const auto& [source, relation] : votes) scores[relation] += QuestionBundle::weight(source);
    return scores;
}

std::vector<std::string> select_top_m(const RelationScores& scores, int m) {
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& [name, score] : scores) {
        if (score > 0) ranked.emplace_back(-score, name);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::string> out;
    for (const auto& [neg, name] : ranked) {
        if (static_cast<int>(out.size()) >= m) break;
        out.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// RetrievalState

bool RetrievalState::contains(const Triple& t) const {
    auto it = std::lower_bound(rk.begin(), rk.end(), t,
                               [](const RetrievedTriple& r, const Triple& x) { return r.triple < x; });
    return it != rk.end() && it->triple == t;
}

std::vector<Triple> RetrievalState::triples() const {
    std::vector<Triple> out;
    out.reserve(rk.size());
    for (const auto& r : rk) out.push_back(r.triple);
    return out;
}

std::set<EntityId> RetrievalState::entities() const {
    std::set<EntityId> out;
    for (const auto& r : rk) {
        out.insert(r.triple.head);
        out.insert(r.triple.tail);
    }
    return out;
}

// ---------------------------------------------------------------------------
// retrieve

RetrievalState retrieve(const KnowledgeGraph& g, LlmGateway& gateway, const QuestionBundle& bundle,
                        const RetrievalConfig& cfg, const RetrievalOptions& options) {
    cfg.validate();
    if (bundle.hops < 1 || bundle.hops > cfg.max_hops) {
        throw Error(ErrorCode::Setup, "predicted hops " + std::to_string(bundle.hops) + " outside 1.." +
                                          std::to_string(cfg.max_hops));
    }

    RetrievalState state;
    std::set<EntityId> frontier;
    for (const auto& name : bundle.question.topic_entities) {
        const auto id = g.symbols().find_entity(name);
        if (!id) throw Error(ErrorCode::Setup, "topic entity '" + name + "' is not in the graph");
        frontier.insert(*id);
    }
    if (frontier.empty()) throw Error(ErrorCode::Setup, "question has no topic entity");

    std::set<EntityId> visited;
    std::map<Triple, RetrievedTriple> rk;
    std::optional<std::mt19937_64> rng;
    if (options.schedule_seed) rng.emplace(*options.schedule_seed);

    auto by_name = [&](EntityId a, EntityId b) {
        const auto& na = g.name(a);
        const auto& nb = g.name(b);
        return na != nb ? na < nb : a < b;
    };

    auto publish = [&] {
        state.frontier.assign(frontier.begin(), frontier.end());
        state.visited.assign(visited.begin(), visited.end());
        state.rk.clear();
        for (const auto& [t, r] : rk) state.rk.push_back(r);
        std::sort(state.steps.begin(), state.steps.end(), [&](const EntityStep& a, const EntityStep& b) {
            if (a.hop != b.hop) return a.hop < b.hop;
            return by_name(a.entity, b.entity);
        });
    };

    for (int hop = 1; hop <= bundle.hops; ++hop) {
        std::vector<EntityId> order(frontier.begin(), frontier.end());
        std::sort(order.begin(), order.end(), by_name);
        if (rng) std::shuffle(order.begin(), order.end(), *rng);
        visited.insert(frontier.begin(), frontier.end());

        // Voting first, in schedule order; expansion afterwards in name order
        // so that shared triples get the same anchor whatever the schedule.
        std::vector<EntityStep> steps;
        try {
            for (const auto entity : order) {
                EntityStep step;
                step.hop = hop;
                step.entity = entity;
                step.candidates = gather_candidates(g, entity, cfg.candidate_cap);
                const auto& name = g.name(entity);
                if (step.candidates.truncated()) {
                    state.diagnostics.push_back("hop " + std::to_string(hop) + ": candidate relations of '" + name +
                                                "' truncated from " + std::to_string(step.candidates.total) +
                                                " to " + std::to_string(step.candidates.names.size()));
                }
                if (!step.candidates.names.empty()) {
                    std::vector<std::size_t> members(bundle.member_count());
                    std::iota(members.begin(), members.end(), std::size_t{0});
                    if (rng) std::shuffle(members.begin(), members.end(), *rng);
                    std::vector<std::string> ballot_notes;
                    step.ballots = cast_ballots(gateway, bundle, entity, name, step.candidates.names, cfg.top_k,
                                                {bundle.question.id, hop}, options.prompts, &ballot_notes, members);
                    std::sort(step.ballots.begin(), step.ballots.end(),
                              [](const Ballot& a, const Ballot& b) { return a.source < b.source; });
                    step.scores = tally_votes(step.ballots);
                    step.selected = select_top_m(step.scores, cfg.top_m);
                }
                steps.push_back(std::move(step));
            }
        } catch (const Error& e) {
            if (!e.is_backend_error()) throw;
            state.interrupted = true;
            state.interruption = "hop " + std::to_string(hop) + ": " + e.what();
            state.diagnostics.push_back("retrieval interrupted at " + state.interruption);
            frontier.clear();
            publish();
            return state;
        }

        std::sort(steps.begin(), steps.end(),
                  [&](const EntityStep& a, const EntityStep& b) { return by_name(a.entity, b.entity); });
        std::set<EntityId> next;
        for (auto& step : steps) {
            const auto& name = g.name(step.entity);
            for (const auto& b : step.ballots) {
                if (b.chosen.empty()) {
                    state.diagnostics.push_back("hop " + std::to_string(hop) + ": ballot " + std::to_string(b.source) +
                                                " for '" + name + "' matched no candidate relation");
                }
            }
            if (!step.candidates.names.empty()) state.scores.entries[step.entity] = step.scores;
            for (const auto& relation_name : step.selected) {
                const auto relation = g.relation(relation_name);
                for (const auto& t : g.expand(step.entity, relation)) {
                    if (rk.count(t)) continue;
                    rk.emplace(t, RetrievedTriple{t, hop, step.entity});
                    step.triples_added.push_back(t);
                    for (const auto endpoint : {t.head, t.tail}) {
                        if (!visited.count(endpoint)) next.insert(endpoint);
                    }
                }
            }
            std::sort(step.triples_added.begin(), step.triples_added.end());
            state.steps.push_back(std::move(step));
        }

        frontier = std::move(next);
        state.hops_completed = hop;
        publish();
        if (options.on_hop) options.on_hop(state);
        if (frontier.empty() && hop < bundle.hops) {
            state.diagnostics.push_back("frontier empty after hop " + std::to_string(hop) + " of " +
                                        std::to_string(bundle.hops) + "; stopping early");
            break;
        }
    }
    return state;
}

}  // namespace kgnav
