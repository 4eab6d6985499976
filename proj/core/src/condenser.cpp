// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/condenser.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

namespace {

struct FactKey {
    int hop;
    EntityId fixed;
    RelationId relation;
    Grouping grouping;
    friend auto operator<=>(const FactKey&, const FactKey&) = default;
};

std::vector<AggregatedFact> collect(const KnowledgeGraph& g, std::map<FactKey, std::vector<EntityId>>& groups) {
    auto by_name = [&](EntityId a, EntityId b) {
        const auto& na = g.name(a);
        const auto& nb = g.name(b);
        return na != nb ? na < nb : a < b;
    };
    std::vector<AggregatedFact> facts;
    facts.reserve(groups.size());
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), by_name);
        members.erase(std::unique(members.begin(), members.end()), members.end());
        facts.push_back({key.grouping, key.fixed, key.relation, std::move(members), key.hop});
    }
    std::sort(facts.begin(), facts.end(), [&](const AggregatedFact& a, const AggregatedFact& b) {
        if (a.hop != b.hop) return a.hop < b.hop;
        if (a.fixed != b.fixed) return by_name(a.fixed, b.fixed);
        const auto& ra = g.name(a.relation);
        const auto& rb = g.name(b.relation);
        if (ra != rb) return ra < rb;
        return a.grouping < b.grouping;
    });
    return facts;
}

void check_placeholders(std::string_view pattern, bool relation_required) {
    const auto heads = text::count_occurrences(pattern, "{head}");
    const auto tails = text::count_occurrences(pattern, "{tail}");
    const auto relations = text::count_occurrences(pattern, "{relation}");
    if (heads != 1 || tails != 1 || relations > 1 || (relation_required && relations != 1)) {
        throw Error(ErrorCode::Template, "template '" + std::string(pattern) + "' must contain {head}" +
                                             (relation_required ? ", {relation}" : "") +
                                             " and {tail} exactly once");
    }
}

}  // namespace

std::vector<AggregatedFact> aggregate(const KnowledgeGraph& g, std::span<const RetrievedTriple> triples) {
    std::map<FactKey, std::vector<EntityId>> groups;
    for (const auto& r : triples) {
        const auto& t = r.triple;
        if (r.anchor == t.tail && t.head != t.tail) {
            groups[{r.hop, t.tail, t.relation, Grouping::ByTail}].push_back(t.head);
        } else {
            groups[{r.hop, t.head, t.relation, Grouping::ByHead}].push_back(t.tail);
        }
    }
    return collect(g, groups);
}

std::vector<AggregatedFact> aggregate(const KnowledgeGraph& g, std::span<const Triple> triples) {
    std::map<FactKey, std::vector<EntityId>> groups;
    for (const auto& t : triples) groups[{0, t.head, t.relation, Grouping::ByHead}].push_back(t.tail);
    return collect(g, groups);
}

std::vector<RetrievedTriple> flatten(std::span<const AggregatedFact> facts) {
    std::vector<RetrievedTriple> out;
    for (const auto& f : facts) {
        for (const auto other : f.grouped) {
            const auto t = f.grouping == Grouping::ByHead ? Triple{f.fixed, f.relation, other}
                                                          : Triple{other, f.relation, f.fixed};
            out.push_back({t, f.hop, f.fixed});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Templates

VerbalizationTemplate::VerbalizationTemplate(std::string pattern) : pattern_(std::move(pattern)) {
    check_placeholders(pattern_, true);
}

void VerbalizationTemplate::add_override(const std::string& relation, std::string pattern) {
    check_placeholders(pattern, false);
    overrides_[relation] = std::move(pattern);
}

const std::string& VerbalizationTemplate::pattern_for(const std::string& relation) const {
    if (auto it = overrides_.find(relation); it != overrides_.end()) return it->second;
    return pattern_;
}

void VerbalizationTemplate::load_overrides(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (text::trim(view).empty() || text::trim(view).front() == '#') continue;
        const auto tab = view.find('\t');
        if (tab == std::string_view::npos) throw ParseError(line_no, "expected 'relation<TAB>template'");
        const auto relation = text::trim(view.substr(0, tab));
        const auto pattern = text::trim(view.substr(tab + 1));
        if (relation.empty()) throw ParseError(line_no, "empty relation name");
        try {
            add_override(std::string(relation), std::string(pattern));
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
}

std::string verbalize(const KnowledgeGraph& g, const AggregatedFact& fact, const VerbalizationTemplate& tmpl) {
    std::vector<std::string> names;
    names.reserve(fact.grouped.size());
    for (const auto e : fact.grouped) names.push_back(g.name(e));
    const auto joined = text::join_natural(names);
    const auto& relation = g.name(fact.relation);
    const auto& fixed = g.name(fact.fixed);
    const bool by_head = fact.grouping == Grouping::ByHead;
    return text::substitute(tmpl.pattern_for(relation), {{"relation", relation},
                                                          {"head", by_head ? std::string_view(fixed) : joined},
                                                          {"tail", by_head ? std::string_view(joined) : fixed}});
}

// ---------------------------------------------------------------------------
// Answer prompt

std::vector<FewShotExample> load_few_shot(std::istream& in) {
    std::vector<FewShotExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("question").get<std::string>(), j.at("knowledge").get<std::vector<std::string>>(),
                           j.at("answer").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad few-shot record: ") + e.what());
        }
    }
    return out;
}

namespace {

constexpr std::string_view kInstruction =
    "Answer the question using only the knowledge provided below. Do not use any internal or prior knowledge "
    "of your own. Reply with the answer entity names only, one per line, most likely answer first.\n\n";

}  // namespace

AnswerPrompt build_answer_prompt(const std::string& question, std::span<const std::string> sentences,
                                 std::span<const FewShotExample> few_shot, std::size_t budget_tokens) {
    std::string head(kInstruction);
    for (std::size_t i = 0; i < few_shot.size(); ++i) {
        const auto& ex = few_shot[i];
        head += "Example " + std::to_string(i + 1) + ":\nKnowledge:\n";
        for (const auto& s : ex.knowledge) head += s + "\n";
        head += "Question: " + ex.question + "\nAnswer: " + ex.answer + "\n\n";
    }
    head += "Knowledge:\n";
    const std::string tail = "\nQuestion: " + question + "\nAnswer:";

    AnswerPrompt out;
    out.sentences_total = sentences.size();
    if (sentences.empty()) {
        out.text = head + std::string(kNoKnowledge) + "\n" + tail;
        if (estimate_tokens(out.text.size()) > budget_tokens) {
            throw Error(ErrorCode::PromptTooSmall, "answer prompt needs " +
                                                       std::to_string(estimate_tokens(out.text.size())) +
                                                       " tokens, budget is " + std::to_string(budget_tokens));
        }
        return out;
    }

    const auto fixed_chars = head.size() + tail.size();
    if (estimate_tokens(fixed_chars) > budget_tokens) {
        throw Error(ErrorCode::PromptTooSmall, "answer prompt needs " + std::to_string(estimate_tokens(fixed_chars)) +
                                                   " tokens before any knowledge, budget is " +
                                                   std::to_string(budget_tokens));
    }
    std::size_t chars = fixed_chars;
    std::size_t kept = 0;
    while (kept < sentences.size() && estimate_tokens(chars + sentences[kept].size() + 1) <= budget_tokens) {
        chars += sentences[kept].size() + 1;
        ++kept;
    }
    out.text = head;
    for (std::size_t i = 0; i < kept; ++i) out.text += sentences[i] + "\n";
    out.text += tail;
    out.sentences_kept = kept;
    out.truncated = kept < sentences.size();
    return out;
}

// ---------------------------------------------------------------------------
// Answer extraction

std::vector<ExtractedAnswer> extract_answers(std::string_view completion) {
    static constexpr std::string_view kBoilerplate[] = {
        "the answers are", "the answer is", "answers", "answer",
    };
    std::vector<ExtractedAnswer> out;
    auto push = [&](std::string_view piece) {
        piece = text::strip_list_marker(piece);
        while (!piece.empty() && (piece.back() == '.' || piece.back() == '"')) piece.remove_suffix(1);
        while (!piece.empty() && piece.front() == '"') piece.remove_prefix(1);
        piece = text::trim(piece);
        if (piece.empty()) return;
        auto normalized = text::normalize(piece);
        for (const auto& a : out) {
            if (a.normalized == normalized) return;
        }
        out.push_back({std::string(piece), std::move(normalized)});
    };

    for (auto line : text::split_lines(completion)) {
        line = text::trim(line);
        for (const auto prefix : kBoilerplate) {
            if (text::starts_with_icase(line, prefix) &&
                (line.size() == prefix.size() || line[prefix.size()] == ':' || line[prefix.size()] == ' ')) {
                auto rest = text::trim(line.substr(prefix.size()));
                if (!rest.empty() && rest.front() == ':') rest = text::trim(rest.substr(1));
                line = rest;
                break;
            }
        }
        // Split on ',' and on " and ".
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto comma = line.find(',', start);
            const auto conj = line.find(" and ", start);
            const auto end = std::min(comma, conj);
            if (end == std::string_view::npos) {
                push(line.substr(start));
                break;
            }
            push(line.substr(start, end - start));
            start = end + (end == comma ? 1 : 5);
        }
    }
    return out;
}

}  // namespace kgnav
