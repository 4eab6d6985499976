// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Single-question flow: hop prediction, variants, retrieval, aggregation,
// verbalization, answer prompt, completion and answer extraction.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgnav/condenser.hpp"
#include "kgnav/config.hpp"
#include "kgnav/error.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/question_analysis.hpp"
#include "kgnav/retrieval.hpp"

namespace kgnav {

/// Backend and cache as described by `config`. Throws Error{Config} for a
/// mock backend missing its data file and Error{BackendUnavailable} when the
/// HTTP backend has no API key.
std::unique_ptr<LlmGateway> make_gateway(const Config& config);

/// Reads JSON Lines {question, entity, candidates: [..], answer: [..]}.
std::vector<RelationExample> load_relation_examples(std::istream& in);

struct PipelineSettings {
    HopPredictor hops = HopPredictor::oracle();
    RetrievalConfig retrieval;
    std::size_t variant_count = 2;
    VariantOptions variants;
    RetrievalOptions retrieval_options;
    VerbalizationTemplate templates;
    std::vector<FewShotExample> few_shot;
    std::size_t budget_tokens = 3072;
    DecodingParams answer_params;

    /// Loads every file referenced by `config`. `hops_override` replaces the
    /// [eval] hops setting ("oracle", "heuristic", "auto" or a count).
    static PipelineSettings from_config(const Config& config, const std::optional<std::string>& hops_override = {});
};

/// Everything produced while answering one question.
struct QuestionRun {
    Question question;
    QuestionBundle bundle;
    RetrievalState retrieval;
    std::vector<AggregatedFact> facts;
    std::vector<std::string> sentences;
    AnswerPrompt prompt;
    AnswerRecord answer;
    /// Entities named by the sentences that made it into the prompt.
    std::vector<std::string> knowledge_entities;
    /// Set when a stage raised; later stages were skipped.
    std::optional<ErrorCode> failure_code;
    std::string failure;
};

class Pipeline {
public:
    Pipeline(const KnowledgeGraph& graph, LlmGateway& gateway, PipelineSettings settings)
        : graph_(graph), gateway_(gateway), settings_(std::move(settings)) {}

    /// Never throws kgnav::Error: stage failures are recorded in the run.
    [[nodiscard]] QuestionRun run(const Question& q) const;

    [[nodiscard]] const PipelineSettings& settings() const noexcept { return settings_; }
    [[nodiscard]] const KnowledgeGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] LlmGateway& gateway() const noexcept { return gateway_; }

private:
    const KnowledgeGraph& graph_;
    LlmGateway& gateway_;
    PipelineSettings settings_;
};

}  // namespace kgnav
