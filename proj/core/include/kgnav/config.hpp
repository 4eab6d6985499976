// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>

#include "kgnav/llm_gateway.hpp"
#include "kgnav/retrieval.hpp"

namespace kgnav {

/// Run configuration, read from an INI file:
///
///   [llm]        backend, model, base_url, temperature, max_tokens, cache,
///                oracle_sidecar, replay, max_attempts, backoff_ms
///   [retrieval]  K, M, H, variants, candidate_cap
///   [prompts]    template_overrides, few_shot, relation_few_shot, hop_cues
///   [eval]       budget, hops
///
/// Relative paths are resolved against the config file's directory. Unknown
/// sections or keys are rejected.
struct Config {
    // [llm]
    BackendKind backend = BackendKind::MockLexical;
    std::string model = "mock";
    std::string base_url = "https://api.openai.com/v1";
    DecodingParams decoding;
    std::string cache = "memory";  // "off", "memory" or a JSON Lines path
    std::filesystem::path oracle_sidecar;
    std::filesystem::path replay;
    int max_attempts = 3;
    int backoff_ms = 500;

    // [retrieval]
    RetrievalConfig retrieval;
    std::size_t variants = 2;

    // [prompts]
    std::filesystem::path template_overrides;
    std::filesystem::path few_shot;
    std::filesystem::path relation_few_shot;
    std::filesystem::path hop_cues;

    // [eval]
    std::size_t budget_tokens = 3072;  // 4096-token context minus 1024 reserved for the reply
    std::string hops = "oracle";       // "oracle", "heuristic" or a fixed count

    static Config parse(std::istream& in, const std::filesystem::path& base_dir = {});
    static Config load(const std::filesystem::path& path);
};

}  // namespace kgnav
