// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/llm_gateway.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "kgnav/error.hpp"

namespace kgnav {

std::string_view to_string(BackendKind kind) noexcept {
    switch (kind) {
        case BackendKind::Http: return "http";
        case BackendKind::MockLexical: return "mock-lexical";
        case BackendKind::MockOracle: return "mock-oracle";
        case BackendKind::MockReplay: return "mock-replay";
    }
    return "unknown";
}

BackendKind parse_backend_kind(std::string_view name) {
    for (auto kind : {BackendKind::Http, BackendKind::MockLexical, BackendKind::MockOracle, BackendKind::MockReplay}) {
        if (to_string(kind) == name) return kind;
    }
    throw Error(ErrorCode::Config, "unknown backend '" + std::string(name) + "'");
}

void CompletionRequest::validate() const {
    if (prompt.empty()) throw Error(ErrorCode::Usage, "completion prompt is empty");
    if (params.max_tokens < 1) throw Error(ErrorCode::Usage, "max_tokens must be >= 1");
    if (!(params.temperature >= 0.0)) throw Error(ErrorCode::Usage, "temperature must be >= 0");
}

namespace {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Protocol, "sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

std::string fingerprint(const CompletionRequest& req) {
    // nlohmann::json objects are key-sorted, so dump() is canonical.
    const nlohmann::json key = {
        {"backend", req.backend},
        {"model", req.model},
        {"prompt", req.prompt},
        {"max_tokens", req.params.max_tokens},
        {"temperature", req.params.temperature},
        {"hints", req.hints},
    };
    return sha256_hex(key.dump());
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(*path_)) {
        for (auto& rec : read_records(*path_)) entries_[rec.fingerprint] = std::move(rec.response_text);
    } else if (path_->has_parent_path()) {
        std::filesystem::create_directories(path_->parent_path());
    }
    out_.open(*path_, std::ios::app | std::ios::binary);
    if (!out_) throw Error(ErrorCode::Config, "cannot open cache file '" + path_->string() + "'");
}

std::vector<ResponseCache::Record> ResponseCache::read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open cache file '" + path.string() + "'");
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            records.push_back({j.at("fingerprint").get<std::string>(), j.value("backend", ""), j.value("model", ""),
                               j.at("response_text").get<std::string>(), j.value("created_at", "")});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, std::string("bad cache record: ") + e.what());
        }
    }
    return records;
}

std::optional<std::string> ResponseCache::lookup(const std::string& fingerprint) const {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(fingerprint); it != entries_.end()) return it->second;
    return std::nullopt;
}

void ResponseCache::store(const std::string& fingerprint, std::string_view backend, std::string_view model,
                          const std::string& text) {
    std::lock_guard lock(mutex_);
    entries_[fingerprint] = text;
    if (out_.is_open()) {
        const nlohmann::json rec = {
            {"fingerprint", fingerprint}, {"backend", backend},        {"model", model},
            {"response_text", text},      {"created_at", utc_timestamp()},
        };
        out_ << rec.dump() << '\n';
        out_.flush();
    }
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

// ---------------------------------------------------------------------------
// LlmGateway

LlmGateway::LlmGateway(std::unique_ptr<Backend> backend, std::shared_ptr<ResponseCache> cache, std::string model)
    : backend_(std::move(backend)), cache_(std::move(cache)), model_(std::move(model)) {
    if (!backend_) throw Error(ErrorCode::Config, "gateway requires a backend");
}

CompletionResponse LlmGateway::complete(CompletionRequest req) {
    req.backend = std::string(to_string(backend_->kind()));
    if (req.model.empty()) req.model = model_;
    req.validate();

    if (!cache_) {
        ++backend_calls_;
        return {backend_->generate(req), req.backend, false};
    }

    const auto fp = fingerprint(req);
    std::promise<std::string> promise;
    {
        std::unique_lock lock(inflight_mutex_);
        if (auto hit = cache_->lookup(fp)) return {std::move(*hit), req.backend, true};
        if (auto it = inflight_.find(fp); it != inflight_.end()) {
            auto pending = it->second;
            lock.unlock();
            return {pending.get(), req.backend, true};
        }
        inflight_.emplace(fp, promise.get_future().share());
    }

    auto finish = [&] {
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(fp);
    };
    try {
        ++backend_calls_;
        auto text = backend_->generate(req);
        cache_->store(fp, req.backend, req.model, text);
        promise.set_value(text);
        finish();
        return {std::move(text), req.backend, false};
    } catch (...) {
        promise.set_exception(std::current_exception());
        finish();
        throw;
    }
}

}  // namespace kgnav
