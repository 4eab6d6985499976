// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/text.hpp"

#include <cctype>

namespace kgnav::text {

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(char c) noexcept {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_alnum(char c) noexcept {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = lower(c);
    return out;
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(lower(c));
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    if (s.empty()) return lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string_view::npos) end = s.size();
        auto line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == s.size()) break;
        start = end + 1;
        if (start == s.size()) break;
    }
    return lines;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept {
    if (s.size() < prefix.size()) return false;
    return equals_icase(s.substr(0, prefix.size()), prefix);
}

bool equals_icase(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (lower(a[i]) != lower(b[i])) return false;
    }
    return true;
}

std::string join_natural(std::span<const std::string> items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

std::string stem(std::string token) {
    auto ends_with = [&](std::string_view suffix) {
        return token.size() >= suffix.size() &&
               std::string_view(token).substr(token.size() - suffix.size()) == suffix;
    };
    auto strip = [&](std::string_view suffix) {
        if (ends_with(suffix) && token.size() >= suffix.size() + 3) {
            token.resize(token.size() - suffix.size());
            return true;
        }
        return false;
    };
    if (!ends_with("ss")) strip("s");
    for (std::string_view suffix : {"ing", "ed", "en", "er", "or", "e"}) {
        if (strip(suffix)) break;
    }
    const auto n = token.size();
    if (n >= 4 && token[n - 1] == token[n - 2] && std::isalpha(static_cast<unsigned char>(token[n - 1])) &&
        std::string_view("aeiouls").find(token[n - 1]) == std::string_view::npos) {
        token.pop_back();
    }
    return token;
}

std::vector<std::string> stems(std::string_view s) {
    std::vector<std::string> out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        out.push_back(stem(std::move(token)));
        token.clear();
    };
    for (char c : s) {
        if (is_alnum(c)) {
            token.push_back(lower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::string substitute(std::string_view pattern,
                       std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
    std::string out;
    out.reserve(pattern.size());
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '{') {
            const auto close = pattern.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto name = pattern.substr(i + 1, close - i - 1);
                bool replaced = false;
                for (const auto& [key, value] : values) {
                    if (key == name) {
                        out += value;
                        replaced = true;
                        break;
                    }
                }
                if (replaced) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(pattern[i++]);
    }
    return out;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string_view strip_list_marker(std::string_view s) noexcept {
    s = trim(s);
    if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && is_space(s[1])) {
        return trim(s.substr(2));
    }
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && is_space(s[i + 1])) {
        return trim(s.substr(i + 2));
    }
    return s;
}

}  // namespace kgnav::text
