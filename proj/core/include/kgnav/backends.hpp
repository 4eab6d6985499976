// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Concrete completion backends.
//
// The three mocks are pure functions of the request. They read the structured
// hints that the pipeline attaches to every request (stage, question id, hop,
// candidate relations, knowledge triples) and answer the way a perfectly
// obedient model would for that stage:
//
//   variants            fixed rephrasings that keep the question text verbatim
//   relation_selection  lexical: top-k candidates by shared word stems
//                       oracle:  the hop-th gold relation, when offered
//   answer              walk the supplied knowledge triples
//
// mock-replay ignores hints and serves canned text keyed by fingerprint.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgnav/llm_gateway.hpp"

namespace kgnav {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

/// OpenAI-compatible chat-completion client (POST {base_url}/chat/completions).
/// Transport failures and 5xx responses are retried with exponential backoff;
/// 4xx responses are not.
class HttpBackend final : public Backend {
public:
    struct Options {
        std::string base_url;  // e.g. https://api.openai.com/v1
        std::string api_key;
        RetryPolicy retry;
        std::chrono::seconds timeout{60};
    };

    explicit HttpBackend(Options options);

    /// Reads the key from KGNAV_API_KEY; throws Error{BackendUnavailable}
    /// when it is unset or empty.
    static HttpBackend from_environment(std::string base_url, RetryPolicy retry = {});

    [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::Http; }
    std::string generate(const CompletionRequest& req) override;

    /// Chat-completion request body for `req`.
    static nlohmann::json request_body(const CompletionRequest& req);
    /// Extracts choices[0].message.content; throws Error{Protocol}.
    static std::string parse_response(std::string_view body);

private:
    Options options_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

/// Question-preserving rephrasings used by the mock backends for the
/// variants stage.
std::vector<std::string> scripted_variants(const std::string& question, std::size_t count);

/// Candidates ranked by number of distinct shared stems (tokens of three or
/// more characters) with the question, ties by name.
std::vector<std::string> rank_by_overlap(const std::string& question, const std::vector<std::string>& candidates);

class LexicalBackend final : public Backend {
public:
    [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::MockLexical; }
    std::string generate(const CompletionRequest& req) override;
};

/// question id -> ordered gold relation names.
using GoldPaths = std::unordered_map<std::string, std::vector<std::string>>;

/// Reads JSON Lines {question_id, gold_relations: [string]}.
GoldPaths load_oracle_sidecar(const std::filesystem::path& path);

class OracleBackend final : public Backend {
public:
    explicit OracleBackend(GoldPaths gold) : gold_(std::move(gold)) {}

    [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::MockOracle; }
    std::string generate(const CompletionRequest& req) override;

private:
    const std::vector<std::string>& gold_for(const nlohmann::json& hints) const;
    GoldPaths gold_;
};

class ReplayBackend final : public Backend {
public:
    ReplayBackend() = default;
    explicit ReplayBackend(std::map<std::string, std::string> responses) : responses_(std::move(responses)) {}

    /// Reads JSON Lines {fingerprint, response_text} (the cache layout is accepted).
    static ReplayBackend from_file(const std::filesystem::path& path);

    /// Registers `text` as the answer to `req` once stamped as a mock-replay
    /// request.
    void add(CompletionRequest req, std::string text);
    void add_fingerprint(std::string fp, std::string text);

    [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::MockReplay; }
    std::string generate(const CompletionRequest& req) override;

private:
    std::map<std::string, std::string> responses_;
};

}  // namespace kgnav
