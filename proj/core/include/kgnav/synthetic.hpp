// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors
//
// Deterministic dataset generators for tests and demos.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgnav/backends.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/question_analysis.hpp"

namespace kgnav {

struct SyntheticData {
    std::vector<std::array<std::string, 3>> triples;  // head, relation, tail
    std::vector<std::string> qa_lines;  // raw QA file lines
    QaDataset dataset;
    GoldPaths gold;  // question id -> relation path

    [[nodiscard]] KnowledgeGraph graph() const;

    /// Writes kb.txt (MetaQA layout), qa.txt (question, answers, hops) and,
    /// when gold paths exist, oracle.jsonl. Question ids are "qa.txt:<line>",
    /// which is what loading the written qa.txt produces.
    void write(const std::filesystem::path& dir) const;
};

struct SyntheticOptions {
    std::uint64_t seed = 1;
    std::size_t min_entities = 50;
    std::size_t max_entities = 200;
    std::size_t min_relations = 5;
    std::size_t max_relations = 15;
    std::size_t questions_per_hop = 20;
    int max_hops = 3;
};

/// Random graph plus questions whose gold relation path is known.
///
/// Each question follows a walk p0 -r1-> p1 ... -rh-> ph over outgoing edges.
/// With W_0 = {p0} and W_i the entities linked to W_{i-1} by r_i in either
/// direction, a walk is kept only when p_i is outside W_0..W_{i-1}; this is
/// what guarantees that p_i is still unvisited when retrieval reaches hop i.
/// The gold answers are W_h.
SyntheticData generate_path_questions(const SyntheticOptions& options);

/// Small movie graph with the MetaQA relation vocabulary and `count` one-hop
/// questions phrased in the MetaQA style.
SyntheticData generate_movie_sample(std::uint64_t seed, std::size_t count = 100);

}  // namespace kgnav
