// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include <gtest/gtest.h>

#include "kgnav/text.hpp"

using namespace kgnav;

TEST(Text, NormalizeLowercasesTrimsAndCollapses) {
    EXPECT_EQ(text::normalize("  Tom \t  Hanks "), "tom hanks");
    EXPECT_EQ(text::normalize(""), "");
}

TEST(Text, JoinNatural) {
    EXPECT_EQ(text::join_natural(std::vector<std::string>{}), "");
    EXPECT_EQ(text::join_natural(std::vector<std::string>{"a"}), "a");
    EXPECT_EQ(text::join_natural(std::vector<std::string>{"a", "b"}), "a and b");
    EXPECT_EQ(text::join_natural(std::vector<std::string>{"a", "b", "c"}), "a, b and c");
}

TEST(Text, StemMatchesWordForms) {
    EXPECT_EQ(text::stem("write"), text::stem("written"));
    EXPECT_EQ(text::stem("writer"), text::stem("write"));
    EXPECT_EQ(text::stem("starred"), "star");
    EXPECT_EQ(text::stem("stars"), "star");
    EXPECT_EQ(text::stem("directed"), text::stem("direct"));
    EXPECT_EQ(text::stem("acting"), "act");
    EXPECT_EQ(text::stem("class"), "class");
    EXPECT_NE(text::stem("birth"), text::stem("write"));
}

TEST(Text, StemsTokenizesOnNonAlphanumerics) {
    EXPECT_EQ(text::stems("Written_By"), (std::vector<std::string>{text::stem("written"), "by"}));
}

TEST(Text, SubstituteIsSinglePass) {
    EXPECT_EQ(text::substitute("{a}-{b}", {{"a", "{b}"}, {"b", "x"}}), "{b}-x");
    EXPECT_EQ(text::substitute("{unknown}", {{"a", "1"}}), "{unknown}");
}

TEST(Text, StripListMarker) {
    EXPECT_EQ(text::strip_list_marker("- x"), "x");
    EXPECT_EQ(text::strip_list_marker("* x"), "x");
    EXPECT_EQ(text::strip_list_marker("12. x"), "x");
    EXPECT_EQ(text::strip_list_marker("3) x"), "x");
    EXPECT_EQ(text::strip_list_marker("1984"), "1984");
}

TEST(Text, SplitLinesDropsCarriageReturns) {
    const auto lines = text::split_lines("a\r\nb\nc");
    ASSERT_EQ(lines.size(), 3U);
    EXPECT_EQ(lines[0], "a");
    EXPECT_EQ(lines[2], "c");
}
