// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace kgnav {

enum class BackendKind { Http, MockLexical, MockOracle, MockReplay };

std::string_view to_string(BackendKind kind) noexcept;
/// Accepts "http", "mock-lexical", "mock-oracle", "mock-replay".
BackendKind parse_backend_kind(std::string_view name);

struct DecodingParams {
    int max_tokens = 1024;
    double temperature = 0.0;
};

/// Keys of CompletionRequest::hints written by the pipeline stages.
namespace hint {
inline constexpr const char* kStage = "stage";
inline constexpr const char* kQuestionId = "question_id";
inline constexpr const char* kQuestion = "question";
inline constexpr const char* kTopicEntities = "topic_entities";
inline constexpr const char* kHop = "hop";
inline constexpr const char* kEntity = "entity";
inline constexpr const char* kCandidates = "candidates";
inline constexpr const char* kK = "k";
inline constexpr const char* kCount = "count";
inline constexpr const char* kAttempt = "attempt";
inline constexpr const char* kKnowledge = "knowledge";  // [[head, relation, tail, hop], ...]

inline constexpr const char* kStageVariants = "variants";
inline constexpr const char* kStageRelations = "relation_selection";
inline constexpr const char* kStageAnswer = "answer";
}  // namespace hint

struct CompletionRequest {
    std::string prompt;
    DecodingParams params;
    std::string backend;  // filled in by the gateway
    std::string model;
    // Structured request metadata. Deterministic backends read it; the HTTP
    // backend never sends it. It is part of the fingerprint.
    nlohmann::json hints = nlohmann::json::object();

    /// Throws Error{Usage} for an empty prompt or max_tokens < 1 or a
    /// negative temperature.
    void validate() const;
};

struct CompletionResponse {
    std::string text;
    std::string backend;
    bool cached = false;
};

/// Hex SHA-256 over a canonical JSON encoding of backend, model, prompt,
/// decoding params and hints.
std::string fingerprint(const CompletionRequest& req);

/// A completion backend. Implementations must be safe to call from several
/// threads at once.
class Backend {
public:
    virtual ~Backend() = default;
    [[nodiscard]] virtual BackendKind kind() const noexcept = 0;
    virtual std::string generate(const CompletionRequest& req) = 0;
};

/// Fingerprint -> response text, optionally persisted as append-only JSON
/// Lines: {fingerprint, backend, model, response_text, created_at}.
class ResponseCache {
public:
    /// In-memory only.
    ResponseCache() = default;
    /// Loads existing records from `path` (later records win) and appends new
    /// ones to it. Throws ParseError on a malformed record.
    explicit ResponseCache(std::filesystem::path path);

    ResponseCache(const ResponseCache&) = delete;
    ResponseCache& operator=(const ResponseCache&) = delete;

    [[nodiscard]] std::optional<std::string> lookup(const std::string& fingerprint) const;
    void store(const std::string& fingerprint, std::string_view backend, std::string_view model,
               const std::string& text);
    [[nodiscard]] std::size_t size() const;

    struct Record {
        std::string fingerprint;
        std::string backend;
        std::string model;
        std::string response_text;
        std::string created_at;
    };
    static std::vector<Record> read_records(const std::filesystem::path& path);

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
    std::optional<std::filesystem::path> path_;
    std::ofstream out_;
};

/// Uniform completion entry point: stamps the backend tag, consults the
/// cache and collapses concurrent identical requests into one backend call.
class LlmGateway {
public:
    LlmGateway(std::unique_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache, std::string model = {});

    CompletionResponse complete(CompletionRequest req);

    [[nodiscard]] BackendKind kind() const noexcept { return backend_->kind(); }
    [[nodiscard]] const std::string& model() const noexcept { return model_; }
    [[nodiscard]] std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
    [[nodiscard]] const std::shared_ptr<ResponseCache>& cache() const noexcept { return cache_; }

private:
    std::unique_ptr<Backend> backend_;
    std::shared_ptr<ResponseCache> cache_;
    std::string model_;
    std::atomic<std::size_t> backend_calls_{0};
    std::mutex inflight_mutex_;
    std::unordered_map<std::string, std::shared_future<std::string>> inflight_;
};

}  // namespace kgnav
