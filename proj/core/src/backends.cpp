// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/backends.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "httplib.h"

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

// ---------------------------------------------------------------------------
// HTTP

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {
    if (options_.api_key.empty()) throw Error(ErrorCode::BackendUnavailable, "no API key configured");
    if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;

    std::string_view url = options_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(ErrorCode::Config, "base_url must start with http:// or https://");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = std::string(url.substr(0, path_start));
    path_prefix_ = path_start == std::string_view::npos ? "" : std::string(url.substr(path_start));
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

HttpBackend HttpBackend::from_environment(std::string base_url, RetryPolicy retry) {
    const char* key = std::getenv("KGNAV_API_KEY");
    if (key == nullptr || *key == '\0') {
        throw Error(ErrorCode::BackendUnavailable, "KGNAV_API_KEY is not set");
    }
    return HttpBackend(Options{std::move(base_url), key, retry});
}

nlohmann::json HttpBackend::request_body(const CompletionRequest& req) {
    return {
        {"model", req.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
        {"max_tokens", req.params.max_tokens},
        {"temperature", req.params.temperature},
    };
}

std::string HttpBackend::parse_response(std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Protocol, std::string("response is not JSON: ") + e.what());
    }
    const auto* content = [&]() -> const nlohmann::json* {
        if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
            return nullptr;
        }
        const auto& choice = j["choices"][0];
        if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object()) return nullptr;
        const auto& message = choice["message"];
        if (!message.contains("content") || !message["content"].is_string()) return nullptr;
        return &message["content"];
    }();
    if (content == nullptr) throw Error(ErrorCode::Protocol, "response has no choices[0].message.content");
    return content->get<std::string>();
}

std::string HttpBackend::generate(const CompletionRequest& req) {
    const auto body = request_body(req).dump();
    const auto path = path_prefix_ + "/chat/completions";
    const httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};

    auto backoff = options_.retry.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        client.set_write_timeout(options_.timeout);

        auto res = client.Post(path, headers, body, "application/json");
        if (res) {
            if (res->status >= 200 && res->status < 300) return parse_response(res->body);
            if (res->status >= 400 && res->status < 500) {
                throw Error(ErrorCode::BackendRejected,
                            "HTTP " + std::to_string(res->status) + " from " + scheme_host_port_ + path);
            }
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = httplib::to_string(res.error());
        }
        if (attempt < options_.retry.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::duration_cast<std::chrono::milliseconds>(backoff * options_.retry.multiplier);
        }
    }
    throw Error(ErrorCode::BackendUnavailable, "backend unavailable after " +
                                                   std::to_string(options_.retry.max_attempts) +
                                                   " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Mock helpers

std::vector<std::string> scripted_variants(const std::string& question, std::size_t count) {
    static constexpr std::array<std::string_view, 4> kLeads = {
        "In other words, ", "Put differently, ", "Rephrased: ", "Asked another way, "};
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string v(kLeads[i % kLeads.size()]);
        v += question;
        if (i >= kLeads.size()) v += " (" + std::to_string(i / kLeads.size() + 1) + ")";
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::string> rank_by_overlap(const std::string& question, const std::vector<std::string>& candidates) {
    auto stem_set = [](const std::string& s) {
        std::set<std::string> out;
        for (auto& st : text::stems(s)) {
            if (st.size() >= 3) out.insert(std::move(st));
        }
        return out;
    };
    const auto q = stem_set(question);
    std::vector<std::pair<int, std::string>> scored;
    for (const auto& c : candidates) {
        int score = 0;
        for (const auto& st : stem_set(c)) score += q.count(st) ? 1 : 0;
        scored.emplace_back(-score, c);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (auto& [neg, name] : scored) {
        if (out.empty() || out.back() != name) out.push_back(std::move(name));
    }
    return out;
}

namespace {

std::string stage_of(const CompletionRequest& req) {
    return req.hints.value(hint::kStage, std::string{});
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

struct KnowledgeTriple {
    std::string head, relation, tail;
    int hop = 0;
};

std::vector<KnowledgeTriple> knowledge_of(const nlohmann::json& hints) {
    std::vector<KnowledgeTriple> out;
    if (!hints.contains(hint::kKnowledge)) return out;
    for (const auto& row : hints[hint::kKnowledge]) {
        out.push_back({row.at(0).get<std::string>(), row.at(1).get<std::string>(), row.at(2).get<std::string>(),
                       row.at(3).get<int>()});
    }
    return out;
}

std::vector<std::string> string_list(const nlohmann::json& hints, const char* key) {
    if (!hints.contains(key)) return {};
    return hints[key].get<std::vector<std::string>>();
}

std::string variants_response(const CompletionRequest& req) {
    const auto question = req.hints.value(hint::kQuestion, std::string{});
    const auto count = req.hints.value(hint::kCount, std::size_t{0});
    return join_lines(scripted_variants(question, count));
}

constexpr std::string_view kNoAnswer = "I don't know.";

// Reads the value of the last "<label>:" line of a prompt.
std::string last_labelled_line(std::string_view prompt, std::string_view label) {
    std::string found;
    for (auto line : text::split_lines(prompt)) {
        line = text::trim(line);
        if (text::starts_with_icase(line, label)) found = std::string(text::trim(line.substr(label.size())));
    }
    return found;
}

std::vector<std::string> split_candidates(std::string_view joined) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= joined.size()) {
        auto end = joined.find(';', start);
        if (end == std::string_view::npos) end = joined.size();
        auto item = text::trim(joined.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        start = end + 1;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// mock-lexical

std::string LexicalBackend::generate(const CompletionRequest& req) {
    const auto stage = stage_of(req);
    if (stage == hint::kStageVariants) return variants_response(req);

    auto question = req.hints.value(hint::kQuestion, std::string{});
    if (stage == hint::kStageRelations || (stage.empty() && !req.hints.contains(hint::kKnowledge))) {
        // Without hints, fall back to the "Question:" and "Candidate relations:"
        // lines of the prompt.
        auto candidates = string_list(req.hints, hint::kCandidates);
        if (candidates.empty()) candidates = split_candidates(last_labelled_line(req.prompt, "Candidate relations:"));
        if (question.empty()) question = last_labelled_line(req.prompt, "Question:");
        const auto k = req.hints.value(hint::kK, std::size_t{1});
        auto ranked = rank_by_overlap(question, candidates);
        if (ranked.size() > k) ranked.resize(k);
        return join_lines(ranked);
    }
    if (stage == hint::kStageAnswer) {
        const auto knowledge = knowledge_of(req.hints);
        if (knowledge.empty()) return std::string(kNoAnswer);
        int last_hop = 0;
        for (const auto& t : knowledge) last_hop = std::max(last_hop, t.hop);

        std::set<std::string> seen;
        for (const auto& e : string_list(req.hints, hint::kTopicEntities)) seen.insert(e);
        std::vector<std::string> relations;
        for (const auto& t : knowledge) {
            if (t.hop < last_hop) {
                seen.insert(t.head);
                seen.insert(t.tail);
            } else {
                relations.push_back(t.relation);
            }
        }
        const auto best = rank_by_overlap(question, relations).front();
        std::set<std::string> answers;
        for (const auto& t : knowledge) {
            if (t.hop != last_hop || t.relation != best) continue;
            if (!seen.count(t.head)) answers.insert(t.head);
            if (!seen.count(t.tail)) answers.insert(t.tail);
        }
        if (answers.empty()) return std::string(kNoAnswer);
        return join_lines({answers.begin(), answers.end()});
    }
    return std::string(kNoAnswer);
}

// ---------------------------------------------------------------------------
// mock-oracle

GoldPaths load_oracle_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open oracle sidecar '" + path.string() + "'");
    GoldPaths out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out[j.at("question_id").get<std::string>()] = j.at("gold_relations").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad sidecar record: ") + e.what());
        }
    }
    return out;
}

const std::vector<std::string>& OracleBackend::gold_for(const nlohmann::json& hints) const {
    const auto id = hints.value(hint::kQuestionId, std::string{});
    auto it = gold_.find(id);
    if (it == gold_.end()) throw Error(ErrorCode::ReplayMiss, "oracle has no gold path for question '" + id + "'");
    return it->second;
}

std::string OracleBackend::generate(const CompletionRequest& req) {
    const auto stage = stage_of(req);
    if (stage == hint::kStageVariants) return variants_response(req);

    if (stage == hint::kStageRelations) {
        const auto& gold = gold_for(req.hints);
        const auto hop = req.hints.value(hint::kHop, 0);
        if (hop < 1 || static_cast<std::size_t>(hop) > gold.size()) return "none";
        const auto& wanted = gold[static_cast<std::size_t>(hop - 1)];
        const auto candidates = string_list(req.hints, hint::kCandidates);
        if (std::find(candidates.begin(), candidates.end(), wanted) == candidates.end()) return "none";
        return wanted;
    }

    if (stage == hint::kStageAnswer) {
        const auto& gold = gold_for(req.hints);
        const auto knowledge = knowledge_of(req.hints);
        auto topics = string_list(req.hints, hint::kTopicEntities);
        std::set<std::string> current(topics.begin(), topics.end());
        // Follow the gold relations through the supplied knowledge only.
        for (const auto& relation : gold) {
            std::set<std::string> next;
            for (const auto& t : knowledge) {
                if (t.relation != relation) continue;
                if (current.count(t.head)) next.insert(t.tail);
                if (current.count(t.tail)) next.insert(t.head);
            }
            current = std::move(next);
        }
        if (current.empty()) return std::string(kNoAnswer);
        return join_lines({current.begin(), current.end()});
    }
    return std::string(kNoAnswer);
}

// ---------------------------------------------------------------------------
// mock-replay

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open replay file '" + path.string() + "'");
    ReplayBackend backend;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            backend.add_fingerprint(j.at("fingerprint").get<std::string>(), j.at("response_text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad replay record: ") + e.what());
        }
    }
    return backend;
}

void ReplayBackend::add(CompletionRequest req, std::string text) {
    req.backend = std::string(to_string(BackendKind::MockReplay));
    add_fingerprint(fingerprint(req), std::move(text));
}

void ReplayBackend::add_fingerprint(std::string fp, std::string text) {
    responses_[std::move(fp)] = std::move(text);
}

std::string ReplayBackend::generate(const CompletionRequest& req) {
    const auto fp = fingerprint(req);
    auto it = responses_.find(fp);
    if (it == responses_.end()) throw Error(ErrorCode::ReplayMiss, "no replay response for fingerprint " + fp);
    return it->second;
}

}  // namespace kgnav
