// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

bool hits_at_1(std::span<const ExtractedAnswer> answers, std::span<const std::string> gold) {
    if (answers.empty()) return false;
    const auto first = text::normalize(answers.front().text);
    return std::any_of(gold.begin(), gold.end(), [&](const std::string& g) { return text::normalize(g) == first; });
}

std::string_view to_string(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::RelationSelectionError: return "RelationSelectionError";
        case ErrorCategory::ReasoningError: return "ReasoningError";
        case ErrorCategory::Hallucination: return "Hallucination";
        case ErrorCategory::OtherError: return "OtherError";
    }
    return "?";
}

MissEvidence evidence_of(const KnowledgeGraph& g, const QuestionRun& run) {
    MissEvidence e;
    e.interrupted = run.retrieval.interrupted || run.failure_code.has_value();
    e.truncated = run.prompt.truncated;
    for (const auto id : run.retrieval.entities()) e.rk_entities.push_back(g.name(id));
    e.knowledge_entities = run.knowledge_entities;
    if (!run.answer.answers.empty()) e.first_answer = run.answer.answers.front().text;
    return e;
}

ErrorCategory classify_error(const MissEvidence& evidence, std::span<const std::string> gold) {
    if (evidence.interrupted || evidence.truncated) return ErrorCategory::OtherError;
    auto normalized = [](const std::vector<std::string>& names) {
        std::set<std::string> out;
        for (const auto& n : names) out.insert(text::normalize(n));
        return out;
    };
    const auto rk = normalized(evidence.rk_entities);
    const bool gold_in_rk =
        std::any_of(gold.begin(), gold.end(), [&](const std::string& g) { return rk.count(text::normalize(g)); });
    if (!gold_in_rk) return ErrorCategory::RelationSelectionError;
    if (evidence.first_answer && !normalized(evidence.knowledge_entities).count(text::normalize(*evidence.first_answer))) {
        return ErrorCategory::Hallucination;
    }
    return ErrorCategory::ReasoningError;
}

QuestionReport report_question(const KnowledgeGraph& g, const QuestionRun& run) {
    QuestionReport r;
    const auto& q = run.question;
    r.question_id = q.id;
    r.question = q.text;
    r.topic_entities = q.topic_entities;
    r.gold = q.gold_answers;
    r.hops = run.bundle.hops;
    r.variants = run.bundle.variants;
    for (const auto& a : run.answer.answers) r.answers.push_back(a.text);
    r.hit = hits_at_1(run.answer.answers, q.gold_answers);
    if (!r.hit) r.error = classify_error(evidence_of(g, run), q.gold_answers);
    r.failure = run.failure;
    r.rk_size = run.retrieval.rk.size();
    r.sentences_kept = run.prompt.sentences_kept;
    r.sentences_total = run.prompt.sentences_total;
    r.prompt_chars = run.answer.prompt_chars;
    r.truncated = run.prompt.truncated;
    r.interrupted = run.retrieval.interrupted;
    r.diagnostics = run.retrieval.diagnostics;
    r.trace_ref = q.id;
    return r;
}

std::vector<nlohmann::json> trace_records(const KnowledgeGraph& g, const QuestionRun& run) {
    std::vector<nlohmann::json> out;
    for (const auto& step : run.retrieval.steps) {
        nlohmann::json ballots = nlohmann::json::array();
        for (const auto& b : step.ballots) ballots.push_back({{"source", b.source}, {"chosen", b.chosen}});
        nlohmann::json triples = nlohmann::json::array();
        for (const auto& t : step.triples_added) {
            triples.push_back({g.name(t.head), g.name(t.relation), g.name(t.tail)});
        }
        out.push_back({
            {"question_id", run.question.id},
            {"hop", step.hop},
            {"entity", g.name(step.entity)},
            {"candidates", step.candidates.names},
            {"candidates_total", step.candidates.total},
            {"ballots", std::move(ballots)},
            {"scores", step.scores},
            {"selected", step.selected},
            {"triples_added", std::move(triples)},
        });
    }
    return out;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto c : kErrorCategories) histogram[std::string(to_string(c))] = report.count(c);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : report.records) {
        records.push_back({
            {"question_id", r.question_id},
            {"question", r.question},
            {"topic_entities", r.topic_entities},
            {"gold", r.gold},
            {"hops", r.hops},
            {"variants", r.variants},
            {"answers", r.answers},
            {"hit", r.hit},
            {"error", r.error ? nlohmann::json(std::string(to_string(*r.error))) : nlohmann::json()},
            {"failure", r.failure},
            {"rk_size", r.rk_size},
            {"sentences_kept", r.sentences_kept},
            {"sentences_total", r.sentences_total},
            {"prompt_chars", r.prompt_chars},
            {"truncated", r.truncated},
            {"interrupted", r.interrupted},
            {"diagnostics", r.diagnostics},
            {"trace_ref", r.trace_ref},
        });
    }
    return {
        {"dataset", report.dataset},
        {"question_count", report.question_count},
        {"hits", report.hits},
        {"hits_at_1", report.hits_at_1},
        {"error_histogram", std::move(histogram)},
        {"skipped", report.skipped},
        {"records", std::move(records)},
    };
}

EvalReport run_eval(const QaDataset& dataset, const Pipeline& pipeline, const EvalOptions& options) {
    const auto n = dataset.questions.size();
    if (n == 0) throw Error(ErrorCode::EmptyDataset, "dataset '" + dataset.name + "' has no questions to evaluate");

    std::vector<std::optional<QuestionRun>> runs(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        const auto workers = std::clamp<std::size_t>(options.workers, 1, n);
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        runs[i] = pipeline.run(dataset.questions[i]);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(n);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);

    EvalReport report;
    report.dataset = dataset.name;
    report.question_count = n;
    report.skipped = dataset.skipped;
    const auto& g = pipeline.graph();
    for (const auto& run : runs) {
        auto r = report_question(g, *run);
        if (r.hit) {
            ++report.hits;
        } else {
            ++report.histogram[static_cast<std::size_t>(*r.error)];
        }
        if (options.trace != nullptr) {
            for (const auto& rec : trace_records(g, *run)) *options.trace << rec.dump() << '\n';
        }
        report.records.push_back(std::move(r));
    }
    report.hits_at_1 = static_cast<double>(report.hits) / static_cast<double>(n);
    return report;
}

}  // namespace kgnav
