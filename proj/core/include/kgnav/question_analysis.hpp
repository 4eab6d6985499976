// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgnav/llm_gateway.hpp"

namespace kgnav {

struct Question {
    std::string id;
    std::string text;  // brackets removed
    std::vector<std::string> topic_entities;
    std::vector<std::string> gold_answers;
    std::optional<int> hop_label;
};

struct ParsedQuestion {
    std::string text;
    std::vector<std::string> entities;
};

/// Entities are the contents of unnested `[...]` spans, in order; the clean
/// text keeps their contents and drops the brackets. Throws Error{Parse} on
/// nested, unopened or unclosed brackets.
ParsedQuestion parse_topic_entities(std::string_view raw);

/// The original question plus its generated variants. Ballots from the
/// original count double.
struct QuestionBundle {
    static constexpr int kOriginalWeight = 2;
    static constexpr int kVariantWeight = 1;

    Question question;
    std::vector<std::string> variants;
    int hops = 1;

    /// Member 0 is the original question, members 1..m the variants.
    [[nodiscard]] std::size_t member_count() const noexcept { return 1 + variants.size(); }
    [[nodiscard]] const std::string& member_text(std::size_t member) const {
        return member == 0 ? question.text : variants.at(member - 1);
    }
    [[nodiscard]] static constexpr int weight(std::size_t member) noexcept {
        return member == 0 ? kOriginalWeight : kVariantWeight;
    }
    [[nodiscard]] int total_weight() const noexcept {
        return kOriginalWeight + kVariantWeight * static_cast<int>(variants.size());
    }
};

// ---------------------------------------------------------------------------
// Hop prediction

/// Weighted cue phrases (whitespace-separated lowercase tokens).
using CueTable = std::vector<std::pair<std::string, int>>;

CueTable default_hop_cues();

/// Reads `phrase<TAB>weight` lines; '#' starts a comment line.
CueTable load_hop_cues(std::istream& in);

/// Sum of cue weights over every occurrence of each cue phrase in the
/// question text, with topic entity names removed first.
int count_hop_cues(const Question& q, const CueTable& cues);

/// Predicts the reasoning depth h in 1..H as argmax_h (w_h . features(q)).
class HopPredictor {
public:
    enum class Kind { Oracle, Fixed, Heuristic };

    using FeatureExtractor = std::function<std::vector<double>(const Question&)>;

    /// Uses Question::hop_label; predict() throws Error{MissingLabel} without one.
    static HopPredictor oracle(int max_hops = 3);
    static HopPredictor fixed(int hops, int max_hops = 3);
    /// Features are [cue count, 1]; class h scores 2h*c - h^2, which peaks
    /// at the h nearest to the cue count c.
    static HopPredictor heuristic(CueTable cues = default_hop_cues(), int max_hops = 3);
    /// Arbitrary linear model: one weight row per hop class 1..H.
    static HopPredictor linear(FeatureExtractor features, std::vector<std::vector<double>> class_weights);

    [[nodiscard]] int predict(const Question& q) const;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] int max_hops() const noexcept { return max_hops_; }

private:
    HopPredictor(Kind kind, int max_hops) : kind_(kind), max_hops_(max_hops) {}

    Kind kind_;
    int max_hops_;
    int fixed_ = 1;
    FeatureExtractor features_;
    std::vector<std::vector<double>> weights_;
};

// ---------------------------------------------------------------------------
// Variant generation

struct VariantOptions {
    /// Placeholders: {count}, {question}.
    std::string prompt_template;
    /// Additional requests made when too few valid variants come back.
    int max_retries = 2;
    DecodingParams params;
};

inline constexpr std::string_view kVariantPromptVersion = "variants-v1";
std::string default_variant_template();

/// Asks the gateway for `m` rephrasings, one per line. Lines missing any topic
/// entity verbatim are rejected; after the retries run out the remainder is
/// filled with copies of the original question. Gateway errors propagate.
std::vector<std::string> generate_variants(LlmGateway& gateway, const Question& q, std::size_t m,
                                           const VariantOptions& options = {});

// ---------------------------------------------------------------------------
// MetaQA QA files

struct QaDataset {
    std::string name;
    std::vector<Question> questions;
    std::vector<std::string> skipped;  // ids of lines without gold answers
};

/// Parses `question<TAB>answer1|answer2|...` lines, with an optional third
/// `<TAB>hops` column. Question ids are "<name>:<line>". Lines with no gold
/// answers are skipped and listed in QaDataset::skipped.
QaDataset load_metaqa_qa(std::istream& in, const std::string& name, std::optional<int> default_hops = std::nullopt);
QaDataset load_metaqa_qa_file(const std::string& path, std::optional<int> default_hops = std::nullopt);

/// "…/2-hop/…" -> 2.
std::optional<int> infer_hop_label(std::string_view path);

}  // namespace kgnav
