// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Shared graphs, questions and test doubles.

#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kgnav/backends.hpp"
#include "kgnav/error.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/question_analysis.hpp"

namespace kgnav::fixtures {

inline KnowledgeGraph graph_from(const std::vector<std::array<std::string, 3>>& triples) {
    KnowledgeGraphBuilder b;
    for (const auto& [h, r, t] : triples) b.add(h, r, t);
    return std::move(b).build();
}

/// The movie neighbourhood around Babaloo Mandel from the worked example.
inline KnowledgeGraph case_study_graph() {
    return graph_from({
        {"Babaloo Mandel", "birth_year", "1949"},
        {"Babaloo Mandel", "birth_place", "New York City"},
        {"A League of Their Own", "created_by", "Babaloo Mandel"},
        {"Splash", "written_by", "Babaloo Mandel"},
        {"Parenthood", "written_by", "Babaloo Mandel"},
        {"Splash", "starred_actors", "Dary Hannah"},
        {"Splash", "starred_actors", "Tom Hanks"},
        {"Splash", "directed_by", "Ron Howard"},
        {"Splash", "release_year", "1984"},
        {"Parenthood", "starred_actors", "Steve Martin"},
        {"Parenthood", "starred_actors", "Dianne Wiest"},
        {"Parenthood", "directed_by", "Ron Howard"},
        {"Parenthood", "release_year", "1989"},
    });
}

inline Question case_study_question() {
    Question q;
    q.id = "case:1";
    q.text = "who acted in the films written by Babaloo Mandel";
    q.topic_entities = {"Babaloo Mandel"};
    q.gold_answers = {"Dary Hannah", "Tom Hanks", "Steve Martin", "Dianne Wiest"};
    q.hop_label = 2;
    return q;
}

/// Test double: answers through a callback and remembers every request
/// by fingerprint so a run can be replayed.
class ScriptedBackend final : public Backend {
public:
    using Script = std::function<std::string(const CompletionRequest&)>;

    explicit ScriptedBackend(Script script, BackendKind kind = BackendKind::MockReplay)
        : script_(std::move(script)), kind_(kind) {}

    [[nodiscard]] BackendKind kind() const noexcept override { return kind_; }

    std::string generate(const CompletionRequest& req) override {
        auto text = script_(req);
        std::lock_guard lock(mutex_);
        recorded_[fingerprint(req)] = text;
        ++calls_;
        return text;
    }

    [[nodiscard]] std::map<std::string, std::string> recorded() const {
        std::lock_guard lock(mutex_);
        return recorded_;
    }
    [[nodiscard]] std::size_t calls() const {
        std::lock_guard lock(mutex_);
        return calls_;
    }

private:
    Script script_;
    BackendKind kind_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> recorded_;
    std::size_t calls_ = 0;
};

/// Backend that always throws the given error.
class FailingBackend final : public Backend {
public:
    explicit FailingBackend(ErrorCode code) : code_(code) {}
    [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::MockReplay; }
    std::string generate(const CompletionRequest&) override { throw Error(code_, "scripted failure"); }

private:
    ErrorCode code_;
};

/// Random graph over `entities` nodes named n0.. and `relations` names r0..
inline std::vector<std::array<std::string, 3>> random_triples(std::mt19937_64& rng, std::size_t entities,
                                                              std::size_t relations, std::size_t count) {
    std::uniform_int_distribution<std::size_t> pick_e(0, entities - 1);
    std::uniform_int_distribution<std::size_t> pick_r(0, relations - 1);
    std::vector<std::array<std::string, 3>> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back({"n" + std::to_string(pick_e(rng)), "r" + std::to_string(pick_r(rng)),
                       "n" + std::to_string(pick_e(rng))});
    }
    return out;
}

}  // namespace kgnav::fixtures
