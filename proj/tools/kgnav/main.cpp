// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// kgnav command-line tool.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 backend error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kgnav/config.hpp"
#include "kgnav/error.hpp"
#include "kgnav/eval.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/pipeline.hpp"
#include "kgnav/synthetic.hpp"

namespace {

using namespace kgnav;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage:
        case ErrorCode::Config: return kExitUsage;
        case ErrorCode::BackendUnavailable:
        case ErrorCode::BackendRejected:
        case ErrorCode::Protocol:
        case ErrorCode::ReplayMiss: return kExitBackend;
        default: return kExitData;
    }
}

Config load_config(const std::string& path) { return path.empty() ? Config{} : Config::load(path); }

KnowledgeGraph load_graph(const std::string& path, LoadStats* stats = nullptr) {
    return load_metaqa_kb_file(path, stats);
}

void print_failure(const QuestionRun& run) {
    if (run.failure_code) std::cerr << "kgnav: " << to_string(*run.failure_code) << ": " << run.failure << '\n';
}

// ---------------------------------------------------------------------------

int cmd_stats(const std::string& kb) {
    LoadStats stats;
    const auto start = std::chrono::steady_clock::now();
    const auto g = load_graph(kb, &stats);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    std::cout << "entities: " << g.entity_count() << '\n'
              << "relations: " << g.relation_count() << '\n'
              << "triples: " << g.triple_count() << '\n'
              << "lines: " << stats.lines << '\n'
              << "duplicates: " << stats.duplicates << '\n';
    std::cerr << "loaded in " << took.count() << " s\n";
    return kExitOk;
}

struct AskArgs {
    std::string kb;
    std::string question;
    std::vector<std::string> entities;
    std::string hops = "auto";
    std::string config;
    bool trace = false;
};

int cmd_ask(const AskArgs& args) {
    const auto config = load_config(args.config);
    const auto g = load_graph(args.kb);
    auto gateway = make_gateway(config);
    Pipeline pipeline(g, *gateway, PipelineSettings::from_config(config, args.hops));

    Question q;
    q.id = "ask:1";
    const auto parsed = parse_topic_entities(args.question);
    q.text = parsed.text;
    q.topic_entities = parsed.entities;
    for (const auto& e : args.entities) {
        if (std::find(q.topic_entities.begin(), q.topic_entities.end(), e) == q.topic_entities.end()) {
            q.topic_entities.push_back(e);
        }
    }
    if (q.topic_entities.empty()) throw Error(ErrorCode::Usage, "no topic entity: use --entity or [brackets]");

    const auto run = pipeline.run(q);
    if (args.trace) {
        std::cout << "# hops: " << run.bundle.hops << '\n';
        for (const auto& v : run.bundle.variants) std::cout << "# variant: " << v << '\n';
        for (const auto& rec : trace_records(g, run)) std::cout << "# trace: " << rec.dump() << '\n';
        for (const auto& d : run.retrieval.diagnostics) std::cout << "# note: " << d << '\n';
        for (std::size_t i = 0; i < run.sentences.size(); ++i) {
            std::cout << (i < run.prompt.sentences_kept ? "# knowledge: " : "# dropped: ") << run.sentences[i]
                      << '\n';
        }
    }
    if (run.failure_code) {
        print_failure(run);
        return exit_code(*run.failure_code);
    }
    if (run.answer.answers.empty()) std::cerr << "kgnav: no answer extracted\n";
    for (const auto& a : run.answer.answers) std::cout << a.text << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string kb;
    std::string qa;
    std::string config;
    std::size_t workers = 1;
    std::string trace;
    std::string report;
    std::string hops;
};

int cmd_eval(const EvalArgs& args) {
    const auto config = load_config(args.config);
    const auto g = load_graph(args.kb);
    const auto dataset = load_metaqa_qa_file(args.qa);
    for (const auto& id : dataset.skipped) std::cerr << "kgnav: warning: skipped " << id << " (no gold answers)\n";
    auto gateway = make_gateway(config);
    const std::optional<std::string> hops = args.hops.empty() ? std::nullopt : std::optional(args.hops);
    Pipeline pipeline(g, *gateway, PipelineSettings::from_config(config, hops));

    std::ofstream trace_out;
    EvalOptions options;
    options.workers = args.workers;
    if (!args.trace.empty()) {
        trace_out.open(args.trace, std::ios::binary | std::ios::trunc);
        if (!trace_out) throw Error(ErrorCode::NotFound, "cannot write trace file '" + args.trace + "'");
        options.trace = &trace_out;
    }
    const auto report = run_eval(dataset, pipeline, options);
    const auto text = to_json(report).dump(2) + "\n";
    if (args.report.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(args.report, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::NotFound, "cannot write report '" + args.report + "'");
        out << text;
    }
    std::cerr << "hits@1 " << report.hits_at_1 << " (" << report.hits << "/" << report.question_count << ")";
    for (const auto c : kErrorCategories) std::cerr << "  " << to_string(c) << " " << report.count(c);
    std::cerr << '\n';

    std::size_t backend_failures = 0;
    for (const auto& r : report.records) {
        if (r.interrupted) ++backend_failures;
    }
    if (backend_failures > 0) {
        std::cerr << "kgnav: " << backend_failures << " question(s) hit backend errors\n";
        return kExitBackend;
    }
    return kExitOk;
}

int cmd_cache(const std::string& action, const std::string& path) {
    if (action == "show") {
        const auto records = ResponseCache::read_records(path);
        for (const auto& r : records) {
            nlohmann::json j = {{"fingerprint", r.fingerprint},
                                {"backend", r.backend},
                                {"model", r.model},
                                {"created_at", r.created_at},
                                {"response_text", r.response_text}};
            std::cout << j.dump() << '\n';
        }
        std::cerr << records.size() << " record(s)\n";
        return kExitOk;
    }
    // clear
    if (!std::filesystem::exists(path)) {
        std::cerr << "nothing to clear at " << path << '\n';
        return kExitOk;
    }
    const auto count = ResponseCache::read_records(path).size();
    std::ofstream(path, std::ios::binary | std::ios::trunc).close();
    std::cerr << "cleared " << count << " record(s)\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string out;
    std::string kind = "paths";
    std::uint64_t seed = 1;
    std::size_t per_hop = 20;
    std::size_t count = 100;
};

int cmd_generate(const GenerateArgs& args) {
    SyntheticData data;
    if (args.kind == "paths") {
        SyntheticOptions options;
        options.seed = args.seed;
        options.questions_per_hop = args.per_hop;
        data = generate_path_questions(options);
    } else {
        data = generate_movie_sample(args.seed, args.count);
    }
    data.write(args.out);
    std::cerr << "wrote " << data.triples.size() << " triples and " << data.dataset.questions.size()
              << " questions to " << args.out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kgnav: multi-hop question answering over a knowledge graph"};
    app.require_subcommand(1);

    std::string stats_kb;
    auto* stats = app.add_subcommand("stats", "Load a kb file and print its counts");
    stats->add_option("--kb", stats_kb, "MetaQA-style kb file (head|relation|tail)")->required();

    AskArgs ask_args;
    auto* ask = app.add_subcommand("ask", "Answer a single question");
    ask->add_option("--kb", ask_args.kb, "kb file")->required();
    ask->add_option("--question", ask_args.question, "question text; [brackets] mark topic entities")->required();
    ask->add_option("--entity", ask_args.entities, "topic entity (repeatable)");
    ask->add_option("--hops", ask_args.hops, "hop count or 'auto'")->capture_default_str();
    ask->add_option("--config", ask_args.config, "INI config file");
    ask->add_flag("--trace", ask_args.trace, "print variants, retrieval steps and knowledge");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a QA file and write a JSON report");
    eval->add_option("--kb", eval_args.kb, "kb file")->required();
    eval->add_option("--qa", eval_args.qa, "QA file (question<TAB>answers[<TAB>hops])")->required();
    eval->add_option("--config", eval_args.config, "INI config file");
    eval->add_option("--workers", eval_args.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--trace", eval_args.trace, "write retrieval trace as JSON Lines");
    eval->add_option("--report", eval_args.report, "write the report here instead of stdout");
    eval->add_option("--hops", eval_args.hops, "override [eval] hops: oracle, heuristic or a count");

    std::string cache_action;
    std::string cache_path;
    auto* cache = app.add_subcommand("cache", "Inspect or clear a response cache file");
    cache->add_option("action", cache_action, "show or clear")->required()->check(CLI::IsMember({"show", "clear"}));
    cache->add_option("--path", cache_path, "cache file")->required();

    GenerateArgs gen_args;
    auto* generate = app.add_subcommand("generate", "Write a synthetic kb, QA file and oracle sidecar");
    generate->add_option("--out", gen_args.out, "output directory")->required();
    generate->add_option("--kind", gen_args.kind, "paths or movies")
        ->check(CLI::IsMember({"paths", "movies"}))
        ->capture_default_str();
    generate->add_option("--seed", gen_args.seed, "random seed")->capture_default_str();
    generate->add_option("--per-hop", gen_args.per_hop, "questions per hop count (paths)")->capture_default_str();
    generate->add_option("--count", gen_args.count, "question count (movies)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const auto rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*stats) return cmd_stats(stats_kb);
        if (*ask) return cmd_ask(ask_args);
        if (*eval) return cmd_eval(eval_args);
        if (*cache) return cmd_cache(cache_action, cache_path);
        if (*generate) return cmd_generate(gen_args);
    } catch (const Error& e) {
        std::cerr << "kgnav: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "kgnav: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
