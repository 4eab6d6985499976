// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include <memory>

#include <benchmark/benchmark.h>

#include "kgnav/backends.hpp"
#include "kgnav/eval.hpp"
#include "kgnav/synthetic.hpp"

namespace {

void BM_OracleEval(benchmark::State& state) {
    kgnav::SyntheticOptions options;
    options.questions_per_hop = 20;
    const auto data = kgnav::generate_path_questions(options);
    const auto g = data.graph();
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        kgnav::LlmGateway gw(std::make_unique<kgnav::OracleBackend>(data.gold), nullptr);
        const kgnav::Pipeline pipeline(g, gw, kgnav::PipelineSettings());
        benchmark::DoNotOptimize(kgnav::run_eval(data.dataset, pipeline, {workers, nullptr}).hits);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.dataset.questions.size()));
}
BENCHMARK(BM_OracleEval)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_LexicalQuestion(benchmark::State& state) {
    const auto data = kgnav::generate_movie_sample(7, 100);
    const auto g = data.graph();
    kgnav::LlmGateway gw(std::make_unique<kgnav::LexicalBackend>(), nullptr);
    const kgnav::Pipeline pipeline(g, gw, kgnav::PipelineSettings());
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline.run(data.dataset.questions[i++ % data.dataset.questions.size()]));
    }
}
BENCHMARK(BM_LexicalQuestion)->Unit(benchmark::kMicrosecond);

void BM_AggregateVerbalize(benchmark::State& state) {
    const auto data = kgnav::generate_movie_sample(3, 10);
    const auto g = data.graph();
    std::vector<kgnav::RetrievedTriple> rk;
    for (const auto& t : g.triples()) rk.push_back({t, 1, t.head});
    const kgnav::VerbalizationTemplate tmpl;
    for (auto _ : state) {
        std::size_t chars = 0;
        for (const auto& f : kgnav::aggregate(g, rk)) chars += kgnav::verbalize(g, f, tmpl).size();
        benchmark::DoNotOptimize(chars);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rk.size()));
}
BENCHMARK(BM_AggregateVerbalize)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
