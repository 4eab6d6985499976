// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "httplib.h"
#include "kgnav/backends.hpp"
#include "kgnav/error.hpp"

using namespace kgnav;

namespace {

/// Local chat-completion endpoint whose replies are scripted per test.
class FakeServer {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    explicit FakeServer(Handler handler) {
        server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
            ++hits_;
            last_body_ = req.body;
            last_auth_ = req.get_header_value("Authorization");
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    [[nodiscard]] std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    [[nodiscard]] int hits() const { return hits_.load(); }
    std::string last_body_;
    std::string last_auth_;

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
};

std::string reply(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

HttpBackend backend_for(const FakeServer& server, int attempts = 3) {
    RetryPolicy retry;
    retry.max_attempts = attempts;
    retry.initial_backoff = std::chrono::milliseconds(1);
    return HttpBackend(HttpBackend::Options{server.base_url(), "test-key", retry, std::chrono::seconds(5)});
}

CompletionRequest request() {
    CompletionRequest req;
    req.prompt = "Question: who wrote Splash";
    req.model = "gpt-test";
    req.backend = "http";
    req.hints = {{"stage", "answer"}};
    return req;
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

}  // namespace

TEST(HttpBackend, SendsChatRequestWithoutHints) {
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(reply("Babaloo Mandel"), "application/json");
    });
    auto backend = backend_for(server);
    EXPECT_EQ(backend.generate(request()), "Babaloo Mandel");
    const auto body = nlohmann::json::parse(server.last_body_);
    EXPECT_EQ(body.at("model"), "gpt-test");
    EXPECT_EQ(body.at("messages").at(0).at("content"), "Question: who wrote Splash");
    EXPECT_EQ(body.at("max_tokens"), 1024);
    EXPECT_FALSE(body.contains("hints"));
    EXPECT_EQ(server.last_auth_, "Bearer test-key");
}

TEST(HttpBackend, RetriesServerErrors) {
    std::atomic<int> n{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++n < 3) {
            res.status = 503;
            return;
        }
        res.set_content(reply("ok"), "application/json");
    });
    auto backend = backend_for(server);
    EXPECT_EQ(backend.generate(request()), "ok");
    EXPECT_EQ(server.hits(), 3);
}

TEST(HttpBackend, GivesUpAfterBoundedRetries) {
    FakeServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    auto backend = backend_for(server, 3);
    EXPECT_EQ(code_of([&] { (void)backend.generate(request()); }), ErrorCode::BackendUnavailable);
    EXPECT_EQ(server.hits(), 3);
}

TEST(HttpBackend, DoesNotRetryClientErrors) {
    FakeServer server([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    auto backend = backend_for(server);
    EXPECT_EQ(code_of([&] { (void)backend.generate(request()); }), ErrorCode::BackendRejected);
    EXPECT_EQ(server.hits(), 1);
}

TEST(HttpBackend, UnparseablePayloadIsProtocolError) {
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": []}", "application/json");
    });
    auto backend = backend_for(server);
    EXPECT_EQ(code_of([&] { (void)backend.generate(request()); }), ErrorCode::Protocol);
    EXPECT_EQ(code_of([] { (void)HttpBackend::parse_response("<html>"); }), ErrorCode::Protocol);
}

TEST(HttpBackend, ConnectionRefusedIsBackendUnavailable) {
    RetryPolicy retry;
    retry.max_attempts = 2;
    retry.initial_backoff = std::chrono::milliseconds(1);
    HttpBackend backend(HttpBackend::Options{"http://127.0.0.1:1/v1", "k", retry, std::chrono::seconds(2)});
    EXPECT_EQ(code_of([&] { (void)backend.generate(request()); }), ErrorCode::BackendUnavailable);
}

TEST(HttpBackend, ApiKeyComesOnlyFromEnvironment) {
    ::unsetenv("KGNAV_API_KEY");
    EXPECT_EQ(code_of([] { (void)HttpBackend::from_environment("http://127.0.0.1:1/v1"); }),
              ErrorCode::BackendUnavailable);
    ::setenv("KGNAV_API_KEY", "from-env", 1);
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(reply("x"), "application/json");
    });
    auto backend = HttpBackend::from_environment(server.base_url());
    (void)backend.generate(request());
    EXPECT_EQ(server.last_auth_, "Bearer from-env");
    ::unsetenv("KGNAV_API_KEY");
}

TEST(HttpBackend, RejectsUrlWithoutScheme) {
    EXPECT_EQ(code_of([] { HttpBackend(HttpBackend::Options{"localhost:8080", "k", {}, std::chrono::seconds(1)}); }),
              ErrorCode::Config);
}
