// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "kgnav/backends.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + std::string(what) + " '" + path.string() + "'");
    return in;
}

HopPredictor make_hop_predictor(std::string_view mode, const CueTable& cues, int max_hops) {
    if (mode == "oracle") return HopPredictor::oracle(max_hops);
    if (mode == "heuristic" || mode == "auto") return HopPredictor::heuristic(cues, max_hops);
    int n = 0;
    const auto* end = mode.data() + mode.size();
    const auto [ptr, ec] = std::from_chars(mode.data(), end, n);
    if (ec != std::errc{} || ptr != end || n < 1 || n > max_hops) {
        throw Error(ErrorCode::Config, "hops must be 'oracle', 'heuristic' or a count in 1.." +
                                           std::to_string(max_hops) + ", got '" + std::string(mode) + "'");
    }
    return HopPredictor::fixed(n, max_hops);
}

}  // namespace

std::unique_ptr<LlmGateway> make_gateway(const Config& config) {
    std::unique_ptr<Backend> backend;
    switch (config.backend) {
        case BackendKind::Http: {
            RetryPolicy retry;
            retry.max_attempts = config.max_attempts;
            retry.initial_backoff = std::chrono::milliseconds(config.backoff_ms);
            backend = std::make_unique<HttpBackend>(HttpBackend::from_environment(config.base_url, retry));
            break;
        }
        case BackendKind::MockLexical:
            backend = std::make_unique<LexicalBackend>();
            break;
        case BackendKind::MockOracle:
            if (config.oracle_sidecar.empty()) throw Error(ErrorCode::Config, "mock-oracle needs llm.oracle_sidecar");
            backend = std::make_unique<OracleBackend>(load_oracle_sidecar(config.oracle_sidecar));
            break;
        case BackendKind::MockReplay:
            if (config.replay.empty()) throw Error(ErrorCode::Config, "mock-replay needs llm.replay");
            backend = std::make_unique<ReplayBackend>(ReplayBackend::from_file(config.replay));
            break;
    }
    std::shared_ptr<ResponseCache> cache;
    if (config.cache == "memory") {
        cache = std::make_shared<ResponseCache>();
    } else if (!config.cache.empty() && config.cache != "off") {
        cache = std::make_shared<ResponseCache>(std::filesystem::path(config.cache));
    }
    return std::make_unique<LlmGateway>(std::move(backend), std::move(cache), config.model);
}

std::vector<RelationExample> load_relation_examples(std::istream& in) {
    std::vector<RelationExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("question").get<std::string>(), j.at("entity").get<std::string>(),
                           j.at("candidates").get<std::vector<std::string>>(),
                           j.at("answer").get<std::vector<std::string>>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad relation example: ") + e.what());
        }
    }
    return out;
}

PipelineSettings PipelineSettings::from_config(const Config& config, const std::optional<std::string>& hops_override) {
    PipelineSettings s;
    CueTable cues = default_hop_cues();
    if (!config.hop_cues.empty()) {
        auto in = open_input(config.hop_cues, "hop cue file");
        cues = load_hop_cues(in);
    }
    s.hops = make_hop_predictor(hops_override.value_or(config.hops), cues, config.retrieval.max_hops);
    s.retrieval = config.retrieval;
    s.variant_count = config.variants;
    s.variants.params = config.decoding;
    s.retrieval_options.prompts.params = config.decoding;
    if (!config.relation_few_shot.empty()) {
        auto in = open_input(config.relation_few_shot, "relation example file");
        s.retrieval_options.prompts.few_shot = load_relation_examples(in);
    }
    if (!config.template_overrides.empty()) {
        auto in = open_input(config.template_overrides, "template override file");
        s.templates.load_overrides(in);
    }
    if (!config.few_shot.empty()) {
        auto in = open_input(config.few_shot, "few-shot file");
        s.few_shot = load_few_shot(in);
    }
    s.budget_tokens = config.budget_tokens;
    s.answer_params = config.decoding;
    return s;
}

QuestionRun Pipeline::run(const Question& q) const {
    QuestionRun run;
    run.question = q;
    run.bundle.question = q;
    run.answer.question_id = q.id;
    const auto& g = graph_;
    try {
        run.bundle.hops = settings_.hops.predict(q);
        run.bundle.variants = generate_variants(gateway_, q, settings_.variant_count, settings_.variants);
        run.retrieval = retrieve(g, gateway_, run.bundle, settings_.retrieval, settings_.retrieval_options);

        run.facts = aggregate(g, std::span<const RetrievedTriple>(run.retrieval.rk));
        run.sentences.reserve(run.facts.size());
        for (const auto& f : run.facts) run.sentences.push_back(verbalize(g, f, settings_.templates));
        run.prompt = build_answer_prompt(q.text, run.sentences, settings_.few_shot, settings_.budget_tokens);
        run.answer.prompt_chars = run.prompt.text.size();
        run.answer.truncated = run.prompt.truncated;

        const std::span<const AggregatedFact> kept(run.facts.data(), run.prompt.sentences_kept);
        std::set<std::string> entities;
        nlohmann::json knowledge = nlohmann::json::array();
        for (const auto& r : flatten(kept)) {
            const auto& head = g.name(r.triple.head);
            const auto& tail = g.name(r.triple.tail);
            knowledge.push_back({head, g.name(r.triple.relation), tail, r.hop});
            entities.insert(head);
            entities.insert(tail);
        }
        run.knowledge_entities.assign(entities.begin(), entities.end());

        CompletionRequest req;
        req.prompt = run.prompt.text;
        req.params = settings_.answer_params;
        req.hints = {
            {hint::kStage, hint::kStageAnswer},
            {hint::kQuestionId, q.id},
            {hint::kQuestion, q.text},
            {hint::kTopicEntities, q.topic_entities},
            {hint::kKnowledge, std::move(knowledge)},
        };
        run.answer.completion = gateway_.complete(std::move(req)).text;
        run.answer.answers = extract_answers(run.answer.completion);
    } catch (const Error& e) {
        run.failure_code = e.code();
        run.failure = e.what();
    }
    return run;
}

}  // namespace kgnav
