// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <initializer_list>
#include <span>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the pipeline stages.
namespace kgnav::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

/// Lowercase, trim and collapse internal whitespace runs to one space.
std::string normalize(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line. Empty lines are kept.
std::vector<std::string_view> split_lines(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;
bool equals_icase(std::string_view a, std::string_view b) noexcept;

/// Joins with ", " and a final " and ": {a} -> "a", {a,b} -> "a and b",
/// {a,b,c} -> "a, b and c".
std::string join_natural(std::span<const std::string> items);

/// Light suffix stemmer for a lowercase alphanumeric token: drops a plural
/// "s", then one of "ing"/"ed"/"en"/"er"/"or"/"e", then a doubled final
/// consonant. At least three characters always remain.
/// write, written, writer -> "writ"; starred, starring -> "star".
std::string stem(std::string token);

/// Lowercased alphanumeric tokens of `s`, each passed through stem().
std::vector<std::string> stems(std::string_view s);

/// Replaces every `{name}` placeholder with its value in one left-to-right
/// pass; substituted text is not rescanned. Unknown placeholders stay as is.
std::string substitute(std::string_view pattern,
                       std::initializer_list<std::pair<std::string_view, std::string_view>> values);

/// Number of non-overlapping occurrences of `needle` in `haystack`.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept;

/// Removes a leading list marker such as "- ", "* ", "1. " or "2) ".
std::string_view strip_list_marker(std::string_view s) noexcept;

}  // namespace kgnav::text
