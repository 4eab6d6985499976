// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/error.hpp"

namespace kgnav {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Parse: return "parse";
        case ErrorCode::NotFound: return "not-found";
        case ErrorCode::Usage: return "usage";
        case ErrorCode::Config: return "config";
        case ErrorCode::Template: return "template";
        case ErrorCode::PromptTooSmall: return "prompt-too-small";
        case ErrorCode::MissingLabel: return "missing-label";
        case ErrorCode::Setup: return "setup";
        case ErrorCode::EmptyDataset: return "empty-dataset";
        case ErrorCode::BackendUnavailable: return "backend-unavailable";
        case ErrorCode::BackendRejected: return "backend-rejected";
        case ErrorCode::Protocol: return "protocol";
        case ErrorCode::ReplayMiss: return "replay-miss";
    }
    return "unknown";
}

bool Error::is_backend_error() const noexcept {
    switch (code_) {
        case ErrorCode::BackendUnavailable:
        case ErrorCode::BackendRejected:
        case ErrorCode::Protocol:
        case ErrorCode::ReplayMiss:
            return true;
        default:
            return false;
    }
}

}  // namespace kgnav
