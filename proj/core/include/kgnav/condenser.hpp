// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgnav/kg_store.hpp"
#include "kgnav/retrieval.hpp"

namespace kgnav {

enum class Grouping : std::uint8_t { ByHead, ByTail };

/// Triples sharing (fixed entity, relation) merged into one fact. For ByHead
/// the fixed entity is the head and `grouped` holds tails; ByTail is the
/// mirror image.
struct AggregatedFact {
    Grouping grouping = Grouping::ByHead;
    EntityId fixed{};
    RelationId relation{};
    std::vector<EntityId> grouped;  // distinct, ordered by name
    int hop = 0;

    friend bool operator==(const AggregatedFact&, const AggregatedFact&) = default;
};

/// Groups retrieved triples around the entity they were expanded from:
/// by head when the anchor is the head (or neither endpoint), by tail when it
/// is the tail. Facts come out ordered by (hop, fixed name, relation name,
/// grouping).
std::vector<AggregatedFact> aggregate(const KnowledgeGraph& g, std::span<const RetrievedTriple> triples);

/// Head grouping for bare triples.
std::vector<AggregatedFact> aggregate(const KnowledgeGraph& g, std::span<const Triple> triples);

/// Inverse of aggregate(): one RetrievedTriple per grouped entity, anchored at
/// the fact's fixed entity.
std::vector<RetrievedTriple> flatten(std::span<const AggregatedFact> facts);

class VerbalizationTemplate {
public:
    static constexpr std::string_view kGeneric = "The {relation} of {head} is(are): {tail}";

    /// The base pattern must contain {head}, {relation} and {tail} exactly
    /// once each; throws Error{Template} otherwise.
    explicit VerbalizationTemplate(std::string pattern = std::string(kGeneric));

    /// Per-relation pattern; {head} and {tail} exactly once, {relation} at
    /// most once.
    void add_override(const std::string& relation, std::string pattern);

    [[nodiscard]] const std::string& pattern_for(const std::string& relation) const;
    [[nodiscard]] const std::map<std::string, std::string>& overrides() const noexcept { return overrides_; }

    /// Reads `relation<TAB>template` lines into overrides; '#' starts a
    /// comment line. Invalid lines throw ParseError with the line number.
    void load_overrides(std::istream& in);

private:
    std::string pattern_;
    std::map<std::string, std::string> overrides_;
};

/// Fills the fact's pattern; grouped entities are joined as "a, b and c".
std::string verbalize(const KnowledgeGraph& g, const AggregatedFact& fact, const VerbalizationTemplate& tmpl);

struct FewShotExample {
    std::string question;
    std::vector<std::string> knowledge;
    std::string answer;
};

/// JSON Lines: {question, knowledge: [sentence...], answer}.
std::vector<FewShotExample> load_few_shot(std::istream& in);

/// Token estimate used for prompt budgets: ceil(chars / 4).
constexpr std::size_t estimate_tokens(std::size_t chars) noexcept { return (chars + 3) / 4; }

inline constexpr std::string_view kNoKnowledge = "No relevant knowledge was retrieved.";

struct AnswerPrompt {
    std::string text;
    std::size_t sentences_kept = 0;
    std::size_t sentences_total = 0;
    bool truncated = false;
};

/// Grounding instruction, then the few-shot examples, the knowledge block (one
/// sentence per line) and the question. Whole sentences are dropped from the
/// end of the knowledge block until estimate_tokens(text) <= budget_tokens.
/// Throws Error{PromptTooSmall} when the prompt does not fit even with an
/// empty knowledge block.
AnswerPrompt build_answer_prompt(const std::string& question, std::span<const std::string> sentences,
                                 std::span<const FewShotExample> few_shot, std::size_t budget_tokens);

struct ExtractedAnswer {
    std::string text;        // as written in the completion
    std::string normalized;  // lowercased, whitespace collapsed

    friend bool operator==(const ExtractedAnswer&, const ExtractedAnswer&) = default;
};

/// Splits a completion into candidate answers: on newlines, commas and
/// " and ", after dropping leading "The answer is" / "Answers:" style
/// boilerplate. Duplicates (after normalization) are dropped, order kept.
std::vector<ExtractedAnswer> extract_answers(std::string_view completion);

struct AnswerRecord {
    std::string question_id;
    std::string completion;
    std::vector<ExtractedAnswer> answers;
    std::size_t prompt_chars = 0;
    bool truncated = false;
};

}  // namespace kgnav
