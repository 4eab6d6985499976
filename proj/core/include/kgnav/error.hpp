// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgnav {

enum class ErrorCode {
    Parse,
    NotFound,
    Usage,
    Config,
    Template,
    PromptTooSmall,
    MissingLabel,
    Setup,
    EmptyDataset,
    BackendUnavailable,
    BackendRejected,
    Protocol,
    ReplayMiss,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. The code drives CLI exit statuses
/// and the per-question failure categories in evaluation.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    /// True for failures raised by the language-model transport layer.
    [[nodiscard]] bool is_backend_error() const noexcept;

private:
    ErrorCode code_;
};

/// Parse error that carries the 1-based line number of the offending input.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace kgnav
