// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "kgnav/backends.hpp"
#include "kgnav/error.hpp"
#include "kgnav/llm_gateway.hpp"

using namespace kgnav;
using kgnav::fixtures::ScriptedBackend;

namespace {

CompletionRequest request(std::string prompt) {
    CompletionRequest req;
    req.prompt = std::move(prompt);
    return req;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "kgnav-tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / (name + "-" + std::to_string(::getpid()));
    std::filesystem::remove(path);
    return path;
}

CompletionRequest relation_request(const std::string& question, std::vector<std::string> candidates, int k = 1) {
    CompletionRequest req = request("Question: " + question);
    req.hints = {{hint::kStage, hint::kStageRelations},
                 {hint::kQuestionId, "q:1"},
                 {hint::kQuestion, question},
                 {hint::kHop, 1},
                 {hint::kCandidates, std::move(candidates)},
                 {hint::kK, k}};
    return req;
}

}  // namespace

TEST(Fingerprint, StableAndSensitive) {
    auto a = request("hello");
    a.backend = "mock-lexical";
    a.model = "m";
    EXPECT_EQ(fingerprint(a), fingerprint(a));
    EXPECT_EQ(fingerprint(a).size(), 64U);

    auto b = a;
    b.prompt = "hellp";
    EXPECT_NE(fingerprint(a), fingerprint(b));

    auto c = a;
    c.params.temperature = 0.5;
    EXPECT_NE(fingerprint(a), fingerprint(c));

    auto d = a;
    d.model = "other";
    EXPECT_NE(fingerprint(a), fingerprint(d));

    auto e = a;
    e.params.max_tokens = 10;
    EXPECT_NE(fingerprint(a), fingerprint(e));
}

TEST(Fingerprint, KnownDigest) {
    // sha256 of {"backend":"mock-replay","hints":{},"max_tokens":1024,"model":"m","prompt":"p","temperature":0.0}
    // as computed by Python hashlib.
    auto req = request("p");
    req.backend = "mock-replay";
    req.model = "m";
    EXPECT_EQ(fingerprint(req), "c663bae43b070b68e2d307cf99894f9b9c6f0a9313ee6b08a55d488c9359c9f5");
}

TEST(CompletionRequestValidation, RejectsBadInput) {
    EXPECT_THROW(request("").validate(), Error);
    auto r = request("x");
    r.params.max_tokens = 0;
    EXPECT_THROW(r.validate(), Error);
    r.params.max_tokens = 1;
    r.params.temperature = -0.1;
    EXPECT_THROW(r.validate(), Error);
}

TEST(Gateway, CacheHitSkipsBackend) {
    auto backend = std::make_unique<ScriptedBackend>([](const CompletionRequest& r) { return "echo:" + r.prompt; });
    auto* raw = backend.get();
    LlmGateway gw(std::move(backend), std::make_shared<ResponseCache>(), "m");
    const auto first = gw.complete(request("hi"));
    const auto second = gw.complete(request("hi"));
    EXPECT_FALSE(first.cached);
    EXPECT_TRUE(second.cached);
    EXPECT_EQ(first.text, second.text);
    EXPECT_EQ(first.backend, "mock-replay");
    EXPECT_EQ(raw->calls(), 1U);
    EXPECT_EQ(gw.backend_calls(), 1U);
}

TEST(Gateway, WithoutCacheEveryCallReachesBackend) {
    auto backend = std::make_unique<ScriptedBackend>([](const CompletionRequest&) { return "x"; });
    auto* raw = backend.get();
    LlmGateway gw(std::move(backend), nullptr);
    (void)gw.complete(request("a"));
    const auto again = gw.complete(request("a"));
    EXPECT_FALSE(again.cached);
    EXPECT_EQ(raw->calls(), 2U);
}

TEST(Gateway, ConcurrentIdenticalRequestsContactBackendOnce) {
    std::atomic<int> calls{0};
    auto backend = std::make_unique<ScriptedBackend>([&](const CompletionRequest& r) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        return r.prompt;
    });
    LlmGateway gw(std::move(backend), std::make_shared<ResponseCache>());
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 20; ++i) (void)gw.complete(request("p" + std::to_string((i + t) % 5)));
        });
    }
    threads.clear();
    EXPECT_EQ(calls.load(), 5);
}

TEST(Gateway, BackendErrorsPropagateAndAreNotCached) {
    LlmGateway gw(std::make_unique<fixtures::FailingBackend>(ErrorCode::BackendUnavailable),
                  std::make_shared<ResponseCache>());
    for (int i = 0; i < 2; ++i) {
        try {
            (void)gw.complete(request("x"));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BackendUnavailable);
            EXPECT_TRUE(e.is_backend_error());
        }
    }
    EXPECT_EQ(gw.cache()->size(), 0U);
}

TEST(ResponseCacheFile, PersistsAcrossInstancesAsJsonLines) {
    const auto path = temp_file("cache.jsonl");
    {
        LlmGateway gw(std::make_unique<ScriptedBackend>([](const CompletionRequest&) { return "line1\nline2"; }),
                      std::make_shared<ResponseCache>(path), "m");
        EXPECT_FALSE(gw.complete(request("q")).cached);
    }
    const auto records = ResponseCache::read_records(path);
    ASSERT_EQ(records.size(), 1U);
    EXPECT_EQ(records[0].backend, "mock-replay");
    EXPECT_EQ(records[0].model, "m");
    EXPECT_EQ(records[0].response_text, "line1\nline2");
    EXPECT_EQ(records[0].fingerprint.size(), 64U);
    ASSERT_EQ(records[0].created_at.size(), 20U);  // YYYY-MM-DDTHH:MM:SSZ
    EXPECT_EQ(records[0].created_at.back(), 'Z');

    auto backend = std::make_unique<ScriptedBackend>([](const CompletionRequest&) { return "different"; });
    auto* raw = backend.get();
    LlmGateway gw(std::move(backend), std::make_shared<ResponseCache>(path), "m");
    const auto r = gw.complete(request("q"));
    EXPECT_TRUE(r.cached);
    EXPECT_EQ(r.text, "line1\nline2");
    EXPECT_EQ(raw->calls(), 0U);
    std::filesystem::remove(path);
}

TEST(ResponseCacheFile, MalformedRecordIsParseError) {
    const auto path = temp_file("bad-cache.jsonl");
    std::ofstream(path) << "{\"fingerprint\":\"a\",\"backend\":\"b\",\"model\":\"c\",\"response_text\":\"d\","
                           "\"created_at\":\"e\"}\nnot json\n";
    try {
        (void)ResponseCache::read_records(path);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2U);
    }
    std::filesystem::remove(path);
}

TEST(LexicalBackend, PicksWrittenByForWriteQuestion) {
    LlmGateway gw(std::make_unique<LexicalBackend>(), nullptr);
    const auto r = gw.complete(relation_request("what movies did X write", {"written_by", "birth_year"}));
    EXPECT_NE(r.text.find("written_by"), std::string::npos);
    EXPECT_EQ(r.text, "written_by");
}

TEST(LexicalBackend, FallsBackToPromptLines) {
    LlmGateway gw(std::make_unique<LexicalBackend>(), nullptr);
    auto req = request("Question: what movies did X write\nCandidate relations: birth_year; written_by\nRelations:\n");
    EXPECT_EQ(gw.complete(req).text, "written_by");
}

TEST(LexicalBackend, TiesBreakByName) {
    EXPECT_EQ(rank_by_overlap("nothing shared", {"zeta", "alpha", "mid"}),
              (std::vector<std::string>{"alpha", "mid", "zeta"}));
}

TEST(MockBackends, AreReferentiallyTransparent) {
    LexicalBackend lexical;
    OracleBackend oracle(GoldPaths{{"q:1", {"written_by"}}});
    auto req = relation_request("who wrote it", {"written_by", "directed_by", "starred_actors"}, 2);
    req.backend = "x";
    const auto first_lexical = lexical.generate(req);
    const auto first_oracle = oracle.generate(req);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(lexical.generate(req), first_lexical);
        EXPECT_EQ(oracle.generate(req), first_oracle);
    }
}

TEST(OracleBackend, SelectsHopthGoldRelationWhenOffered) {
    OracleBackend oracle({{"q:1", {"written_by", "starred_actors"}}});
    auto req = relation_request("q", {"birth_year", "written_by"});
    EXPECT_EQ(oracle.generate(req), "written_by");
    req.hints[hint::kHop] = 2;
    EXPECT_EQ(oracle.generate(req), "none");
    req.hints[hint::kCandidates] = {"starred_actors"};
    EXPECT_EQ(oracle.generate(req), "starred_actors");
    req.hints[hint::kQuestionId] = "unknown";
    try {
        (void)oracle.generate(req);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ReplayMiss);
    }
}

TEST(OracleBackend, AnswersByWalkingKnowledge) {
    OracleBackend oracle({{"q:1", {"written_by", "starred_actors"}}});
    CompletionRequest req = request("answer please");
    req.hints = {{hint::kStage, hint::kStageAnswer},
                 {hint::kQuestionId, "q:1"},
                 {hint::kTopicEntities, {"Babaloo Mandel"}},
                 {hint::kKnowledge,
                  {{"Splash", "written_by", "Babaloo Mandel", 1},
                   {"Splash", "starred_actors", "Tom Hanks", 2},
                   {"Splash", "starred_actors", "Dary Hannah", 2},
                   {"Other", "starred_actors", "Nobody", 2}}}};
    EXPECT_EQ(oracle.generate(req), "Dary Hannah\nTom Hanks");
}

TEST(ReplayBackend, UnknownFingerprintIsReplayMiss) {
    LlmGateway gw(std::make_unique<ReplayBackend>(), nullptr);
    try {
        (void)gw.complete(request("anything"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ReplayMiss);
    }
}

TEST(ReplayBackend, ServesRegisteredResponses) {
    ReplayBackend backend;
    auto req = request("hello");
    req.model = "m";
    backend.add(req, "world");
    LlmGateway gw(std::make_unique<ReplayBackend>(std::move(backend)), nullptr, "m");
    EXPECT_EQ(gw.complete(request("hello")).text, "world");
}

TEST(ReplayBackend, LoadsCacheLayoutFile) {
    const auto path = temp_file("replay.jsonl");
    auto req = request("hello");
    req.backend = "mock-replay";
    std::ofstream(path) << nlohmann::json{{"fingerprint", fingerprint(req)}, {"response_text", "hi"}}.dump() << "\n";
    LlmGateway gw(std::make_unique<ReplayBackend>(ReplayBackend::from_file(path)), nullptr);
    EXPECT_EQ(gw.complete(request("hello")).text, "hi");
    std::filesystem::remove(path);
}

TEST(BackendKindNames, RoundTrip) {
    for (const auto k : {BackendKind::Http, BackendKind::MockLexical, BackendKind::MockOracle, BackendKind::MockReplay}) {
        EXPECT_EQ(parse_backend_kind(to_string(k)), k);
    }
    EXPECT_THROW((void)parse_backend_kind("gpt"), Error);
}
