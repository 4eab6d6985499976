// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kgnav/config.hpp"
#include "kgnav/error.hpp"
#include "kgnav/pipeline.hpp"

using namespace kgnav;

namespace {

Config parse(const std::string& text, const std::filesystem::path& base = {}) {
    std::istringstream in(text);
    return Config::parse(in, base);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Usage;
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "kgnav-tests" / (name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Config, Defaults) {
    const auto c = parse("");
    EXPECT_EQ(c.backend, BackendKind::MockLexical);
    EXPECT_EQ(c.retrieval.top_k, 1);
    EXPECT_EQ(c.retrieval.top_m, 1);
    EXPECT_EQ(c.retrieval.max_hops, 3);
    EXPECT_EQ(c.variants, 2U);
    EXPECT_EQ(c.decoding.max_tokens, 1024);
    EXPECT_EQ(c.decoding.temperature, 0.0);
    EXPECT_EQ(c.budget_tokens, 3072U);
    EXPECT_EQ(c.hops, "oracle");
    EXPECT_EQ(c.cache, "memory");
}

TEST(Config, ReadsEverySection) {
    const auto c = parse(
        "[llm]\nbackend = mock-oracle\nmodel = gpt-x\ntemperature = 0.5\nmax_tokens = 200\ncache = off\n"
        "oracle_sidecar = gold.jsonl\n"
        "[retrieval]\nK = 2\nM = 3\nH = 4\nvariants = 0\ncandidate_cap = 10\n"
        "[prompts]\nfew_shot = /abs/shots.jsonl\n"
        "[eval]\nbudget = 500\nhops = heuristic\n",
        "/etc/kgnav");
    EXPECT_EQ(c.backend, BackendKind::MockOracle);
    EXPECT_EQ(c.model, "gpt-x");
    EXPECT_EQ(c.decoding.temperature, 0.5);
    EXPECT_EQ(c.decoding.max_tokens, 200);
    EXPECT_EQ(c.cache, "off");
    EXPECT_EQ(c.oracle_sidecar, std::filesystem::path("/etc/kgnav/gold.jsonl"));
    EXPECT_EQ(c.retrieval.top_k, 2);
    EXPECT_EQ(c.retrieval.top_m, 3);
    EXPECT_EQ(c.retrieval.max_hops, 4);
    EXPECT_EQ(c.variants, 0U);
    EXPECT_EQ(c.retrieval.candidate_cap, 10U);
    EXPECT_EQ(c.few_shot, std::filesystem::path("/abs/shots.jsonl"));
    EXPECT_EQ(c.budget_tokens, 500U);
    EXPECT_EQ(c.hops, "heuristic");
}

TEST(Config, RejectsUnknownKeysIncludingApiKey) {
    EXPECT_EQ(code_of([] { (void)parse("[llm]\napi_key = secret\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[network]\nproxy = x\n"); }), ErrorCode::Config);
}

TEST(Config, RejectsInvalidValues) {
    EXPECT_EQ(code_of([] { (void)parse("[retrieval]\nK = lots\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[retrieval]\nK = 0\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[retrieval]\nM = 0\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[llm]\ntemperature = -1\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[llm]\nbackend = gpt\n"); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { (void)parse("[eval]\nbudget = 0\n"); }), ErrorCode::Config);
}

TEST(Config, SyntaxErrorCarriesLine) {
    try {
        (void)parse("[llm]\nmodel = m\n[broken\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3U);
    }
}

TEST(Config, LoadResolvesPathsAgainstFileDirectory) {
    const auto dir = temp_dir("config");
    std::ofstream(dir / "run.ini") << "[llm]\ncache = cache.jsonl\nreplay = replay.jsonl\n";
    const auto c = Config::load(dir / "run.ini");
    EXPECT_EQ(c.cache, (dir / "cache.jsonl").string());
    EXPECT_EQ(c.replay, dir / "replay.jsonl");
    EXPECT_EQ(code_of([&] { (void)Config::load(dir / "missing.ini"); }), ErrorCode::NotFound);
    std::filesystem::remove_all(dir);
}

TEST(PipelineSettings, HopModes) {
    Config c;
    const auto q = fixtures::case_study_question();
    EXPECT_EQ(PipelineSettings::from_config(c).hops.predict(q), 2);
    EXPECT_EQ(PipelineSettings::from_config(c, std::string("1")).hops.predict(q), 1);
    EXPECT_EQ(PipelineSettings::from_config(c, std::string("auto")).hops.predict(q), 2);
    EXPECT_EQ(code_of([&] { (void)PipelineSettings::from_config(c, std::string("4")); }), ErrorCode::Config);
    EXPECT_EQ(code_of([&] { (void)PipelineSettings::from_config(c, std::string("two")); }), ErrorCode::Config);
}

TEST(PipelineSettings, MissingReferencedFileIsNotFound) {
    Config c;
    c.template_overrides = "/nonexistent/templates.tsv";
    EXPECT_EQ(code_of([&] { (void)PipelineSettings::from_config(c); }), ErrorCode::NotFound);
}

TEST(MakeGateway, MockBackendsNeedTheirFiles) {
    Config c;
    c.backend = BackendKind::MockOracle;
    EXPECT_EQ(code_of([&] { (void)make_gateway(c); }), ErrorCode::Config);
    c.backend = BackendKind::MockReplay;
    EXPECT_EQ(code_of([&] { (void)make_gateway(c); }), ErrorCode::Config);
    c.backend = BackendKind::MockLexical;
    c.cache = "off";
    EXPECT_EQ(make_gateway(c)->cache(), nullptr);
}

TEST(MakeGateway, HttpNeedsEnvironmentKey) {
    ::unsetenv("KGNAV_API_KEY");
    Config c;
    c.backend = BackendKind::Http;
    EXPECT_EQ(code_of([&] { (void)make_gateway(c); }), ErrorCode::BackendUnavailable);
}

TEST(RelationExamples, LoadsJsonLines) {
    std::istringstream in(
        R"({"question":"who wrote Splash","entity":"Splash","candidates":["written_by","directed_by"],"answer":["written_by"]})"
        "\n");
    const auto ex = load_relation_examples(in);
    ASSERT_EQ(ex.size(), 1U);
    EXPECT_EQ(ex[0].answer, (std::vector<std::string>{"written_by"}));
    std::istringstream bad("{}\n");
    EXPECT_THROW((void)load_relation_examples(bad), ParseError);
}
