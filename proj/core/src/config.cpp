// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/config.hpp"

#include <fstream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kgnav/error.hpp"

namespace kgnav {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"llm",
         {"backend", "model", "base_url", "temperature", "max_tokens", "cache", "oracle_sidecar", "replay",
          "max_attempts", "backoff_ms"}},
        {"retrieval", {"K", "M", "H", "variants", "candidate_cap"}},
        {"prompts", {"template_overrides", "few_shot", "relation_few_shot", "hop_cues"}},
        {"eval", {"budget", "hops"}},
    };
    return keys;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(pt::ptree::path_type(key, '/'));
    if (!node) return fallback;
    try {
        return node->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw Error(ErrorCode::Config, "config key '" + key + "' has an invalid value '" + node->data() + "'");
    }
}

std::filesystem::path get_path(const pt::ptree& tree, const std::string& key, const std::filesystem::path& base) {
    const auto raw = get<std::string>(tree, key, "");
    if (raw.empty()) return {};
    std::filesystem::path p(raw);
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

Config Config::parse(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(e.line(), e.message());
    }
    for (const auto& [section, body] : tree) {
        auto it = known_keys().find(section);
        if (it == known_keys().end()) throw Error(ErrorCode::Config, "unknown config section [" + section + "]");
        if (!body.data().empty()) throw Error(ErrorCode::Config, "key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw Error(ErrorCode::Config, "unknown config key '" + key + "' in [" + section + "]");
            }
        }
    }

    Config c;
    c.backend = parse_backend_kind(get<std::string>(tree, "llm/backend", std::string(to_string(c.backend))));
    c.model = get(tree, "llm/model", c.model);
    c.base_url = get(tree, "llm/base_url", c.base_url);
    c.decoding.temperature = get(tree, "llm/temperature", c.decoding.temperature);
    c.decoding.max_tokens = get(tree, "llm/max_tokens", c.decoding.max_tokens);
    c.cache = get(tree, "llm/cache", c.cache);
    if (c.cache != "off" && c.cache != "memory" && !c.cache.empty()) {
        std::filesystem::path p(c.cache);
        if (!p.is_absolute() && !base_dir.empty()) c.cache = (base_dir / p).string();
    }
    c.oracle_sidecar = get_path(tree, "llm/oracle_sidecar", base_dir);
    c.replay = get_path(tree, "llm/replay", base_dir);
    c.max_attempts = get(tree, "llm/max_attempts", c.max_attempts);
    c.backoff_ms = get(tree, "llm/backoff_ms", c.backoff_ms);

    c.retrieval.top_k = get(tree, "retrieval/K", c.retrieval.top_k);
    c.retrieval.top_m = get(tree, "retrieval/M", c.retrieval.top_m);
    c.retrieval.max_hops = get(tree, "retrieval/H", c.retrieval.max_hops);
    c.retrieval.candidate_cap = get(tree, "retrieval/candidate_cap", c.retrieval.candidate_cap);
    c.variants = get(tree, "retrieval/variants", c.variants);

    c.template_overrides = get_path(tree, "prompts/template_overrides", base_dir);
    c.few_shot = get_path(tree, "prompts/few_shot", base_dir);
    c.relation_few_shot = get_path(tree, "prompts/relation_few_shot", base_dir);
    c.hop_cues = get_path(tree, "prompts/hop_cues", base_dir);

    c.budget_tokens = get(tree, "eval/budget", c.budget_tokens);
    c.hops = get(tree, "eval/hops", c.hops);

    c.retrieval.validate();
    if (c.decoding.max_tokens < 1) throw Error(ErrorCode::Config, "max_tokens must be >= 1");
    if (c.decoding.temperature < 0) throw Error(ErrorCode::Config, "temperature must be >= 0");
    if (c.budget_tokens == 0) throw Error(ErrorCode::Config, "budget must be > 0");
    if (c.max_attempts < 1) throw Error(ErrorCode::Config, "max_attempts must be >= 1");
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open config file '" + path.string() + "'");
    return parse(in, path.parent_path());
}

}  // namespace kgnav
