// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgnav/condenser.hpp"
#include "kgnav/pipeline.hpp"
#include "kgnav/question_analysis.hpp"

namespace kgnav {

/// True iff the first extracted answer, normalized, equals some normalized
/// gold answer.
bool hits_at_1(std::span<const ExtractedAnswer> answers, std::span<const std::string> gold);

enum class ErrorCategory { RelationSelectionError, ReasoningError, Hallucination, OtherError };

inline constexpr std::array<ErrorCategory, 4> kErrorCategories = {
    ErrorCategory::RelationSelectionError, ErrorCategory::ReasoningError, ErrorCategory::Hallucination,
    ErrorCategory::OtherError};

std::string_view to_string(ErrorCategory c) noexcept;

/// What classify_error looks at for a missed question.
struct MissEvidence {
    bool interrupted = false;  // backend failure during retrieval, or a failed stage
    bool truncated = false;    // knowledge dropped to fit the prompt budget
    std::vector<std::string> rk_entities;         // every entity in RK
    std::vector<std::string> knowledge_entities;  // entities in the prompt's knowledge block
    std::optional<std::string> first_answer;
};

MissEvidence evidence_of(const KnowledgeGraph& g, const QuestionRun& run);

/// OtherError for interrupted or truncated runs; otherwise
/// RelationSelectionError when no gold answer is in RK, Hallucination when the
/// first answer is not a knowledge entity, else ReasoningError. A run with no
/// answer at all counts as ReasoningError. Names compare normalized.
ErrorCategory classify_error(const MissEvidence& evidence, std::span<const std::string> gold);

struct QuestionReport {
    std::string question_id;
    std::string question;
    std::vector<std::string> topic_entities;
    std::vector<std::string> gold;
    int hops = 0;
    std::vector<std::string> variants;
    std::vector<std::string> answers;
    bool hit = false;
    std::optional<ErrorCategory> error;
    std::string failure;
    std::size_t rk_size = 0;
    std::size_t sentences_kept = 0;
    std::size_t sentences_total = 0;
    std::size_t prompt_chars = 0;
    bool truncated = false;
    bool interrupted = false;
    std::vector<std::string> diagnostics;
    std::string trace_ref;  // question_id of the matching trace records
};

struct EvalReport {
    std::string dataset;
    std::size_t question_count = 0;
    std::size_t hits = 0;
    double hits_at_1 = 0.0;
    std::array<std::size_t, 4> histogram{};  // indexed like kErrorCategories
    std::vector<QuestionReport> records;     // dataset order
    std::vector<std::string> skipped;

    [[nodiscard]] std::size_t count(ErrorCategory c) const noexcept {
        return histogram[static_cast<std::size_t>(c)];
    }
};

QuestionReport report_question(const KnowledgeGraph& g, const QuestionRun& run);

/// Per-step retrieval records for one run, one JSON object each:
/// {question_id, hop, entity, candidates, ballots, scores, selected, triples_added}.
std::vector<nlohmann::json> trace_records(const KnowledgeGraph& g, const QuestionRun& run);

nlohmann::json to_json(const EvalReport& report);

struct EvalOptions {
    std::size_t workers = 1;
    /// Receives trace records as JSON Lines, in dataset order.
    std::ostream* trace = nullptr;
};

/// Runs every question once over a pool of `workers` threads. Output is
/// independent of the worker count. Throws Error{EmptyDataset} when there is
/// nothing to evaluate.
EvalReport run_eval(const QaDataset& dataset, const Pipeline& pipeline, const EvalOptions& options = {});

}  // namespace kgnav
