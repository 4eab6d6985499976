// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/question_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "kgnav/error.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

ParsedQuestion parse_topic_entities(std::string_view raw) {
    ParsedQuestion out;
    out.text.reserve(raw.size());
    std::optional<std::size_t> open;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (c == '[') {
            if (open) throw Error(ErrorCode::Parse, "nested '[' at offset " + std::to_string(i));
            open = out.text.size();
        } else if (c == ']') {
            if (!open) throw Error(ErrorCode::Parse, "unmatched ']' at offset " + std::to_string(i));
            out.entities.push_back(out.text.substr(*open));
            open.reset();
        } else {
            out.text.push_back(c);
        }
    }
    if (open) throw Error(ErrorCode::Parse, "unclosed '['");
    return out;
}

// ---------------------------------------------------------------------------
// Hop prediction

CueTable default_hop_cues() {
    CueTable cues;
    for (const char* verb : {"write", "writes", "wrote", "written", "direct", "directs", "directed", "star", "stars",
                             "starred", "starring", "act", "acts", "acted", "appear", "appears", "appeared",
                             "release", "released", "genre", "genres", "language", "languages"}) {
        cues.emplace_back(verb, 1);
    }
    for (const char* role : {"writer", "writers", "director", "directors", "screenwriter", "screenwriters", "actor",
                             "actors"}) {
        cues.emplace_back(std::string("the ") + role + " of", 1);
    }
    // "share X with", "the same X as" each imply an extra bridge entity.
    for (const char* bridge : {"share", "shares", "shared", "same"}) cues.emplace_back(bridge, 2);
    return cues;
}

CueTable load_hop_cues(std::istream& in) {
    CueTable cues;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto tab = view.rfind('\t');
        if (tab == std::string_view::npos) throw ParseError(line_no, "expected 'phrase<TAB>weight'");
        const auto phrase = text::normalize(view.substr(0, tab));
        int weight = 0;
        try {
            std::size_t used = 0;
            const std::string number(text::trim(view.substr(tab + 1)));
            weight = std::stoi(number, &used);
            if (used != number.size()) throw std::invalid_argument(number);
        } catch (const std::exception&) {
            throw ParseError(line_no, "cue weight is not an integer");
        }
        if (phrase.empty()) throw ParseError(line_no, "empty cue phrase");
        cues.emplace_back(phrase, weight);
    }
    return cues;
}

namespace {

// Lowercase tokens joined by single spaces and padded, so that " cue "
// matches whole-token sequences only.
std::string token_line(std::string s) {
    for (char& c : s) {
        const auto u = static_cast<unsigned char>(c);
        c = std::isalnum(u) ? static_cast<char>(std::tolower(u)) : ' ';
    }
    return " " + text::normalize(s) + " ";
}

}  // namespace

int count_hop_cues(const Question& q, const CueTable& cues) {
    std::string stripped = q.text;
    for (const auto& entity : q.topic_entities) {
        if (entity.empty()) continue;
        for (auto pos = stripped.find(entity); pos != std::string::npos; pos = stripped.find(entity, pos)) {
            stripped.replace(pos, entity.size(), " ");
        }
    }
    const auto line = token_line(std::move(stripped));
    int total = 0;
    for (const auto& [phrase, weight] : cues) {
        const auto needle = token_line(phrase);
        // Occurrences overlap on the shared padding space, so step by one less.
        std::size_t n = 0;
        for (auto pos = line.find(needle); pos != std::string::npos; pos = line.find(needle, pos + needle.size() - 1)) {
            ++n;
        }
        total += weight * static_cast<int>(n);
    }
    return total;
}

HopPredictor HopPredictor::oracle(int max_hops) {
    if (max_hops < 1) throw Error(ErrorCode::Config, "max hops must be >= 1");
    return HopPredictor(Kind::Oracle, max_hops);
}

HopPredictor HopPredictor::fixed(int hops, int max_hops) {
    if (max_hops < 1) throw Error(ErrorCode::Config, "max hops must be >= 1");
    if (hops < 1 || hops > max_hops) {
        throw Error(ErrorCode::Config, "fixed hop count " + std::to_string(hops) + " outside 1.." + std::to_string(max_hops));
    }
    HopPredictor p(Kind::Fixed, max_hops);
    p.fixed_ = hops;
    return p;
}

HopPredictor HopPredictor::heuristic(CueTable cues, int max_hops) {
    if (max_hops < 1) throw Error(ErrorCode::Config, "max hops must be >= 1");
    std::vector<std::vector<double>> weights;
    for (int h = 1; h <= max_hops; ++h) weights.push_back({2.0 * h, -1.0 * h * h});
    auto p = linear(
        [cues = std::move(cues)](const Question& q) {
            return std::vector<double>{static_cast<double>(count_hop_cues(q, cues)), 1.0};
        },
        std::move(weights));
    p.kind_ = Kind::Heuristic;
    return p;
}

HopPredictor HopPredictor::linear(FeatureExtractor features, std::vector<std::vector<double>> class_weights) {
    if (class_weights.empty()) throw Error(ErrorCode::Config, "linear hop predictor needs at least one class");
    HopPredictor p(Kind::Heuristic, static_cast<int>(class_weights.size()));
    p.features_ = std::move(features);
    p.weights_ = std::move(class_weights);
    return p;
}

int HopPredictor::predict(const Question& q) const {
    switch (kind_) {
        case Kind::Oracle:
            if (!q.hop_label) throw Error(ErrorCode::MissingLabel, "question '" + q.id + "' has no hop label");
            return std::clamp(*q.hop_label, 1, max_hops_);
        case Kind::Fixed:
            return fixed_;
        case Kind::Heuristic: {
            const auto v = features_(q);
            int best = 1;
            double best_score = -std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < weights_.size(); ++h) {
                double score = 0.0;
                for (std::size_t i = 0; i < std::min(v.size(), weights_[h].size()); ++i) score += weights_[h][i] * v[i];
                if (score > best_score) {
                    best_score = score;
                    best = static_cast<int>(h) + 1;
                }
            }
            return best;
        }
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Variant generation

std::string default_variant_template() {
    return "Generate {count} different questions that have exactly the same meaning as the question below. "
           "Keep every entity name exactly as written. Output one question per line, without numbering "
           "or any other text.\n"
           "\n"
           "Question: {question}\n";
}

std::vector<std::string> generate_variants(LlmGateway& gateway, const Question& q, std::size_t m,
                                           const VariantOptions& options) {
    std::vector<std::string> variants;
    if (m == 0) return variants;
    const auto pattern = options.prompt_template.empty() ? default_variant_template() : options.prompt_template;

    auto keeps_entities = [&](std::string_view line) {
        return std::all_of(q.topic_entities.begin(), q.topic_entities.end(),
                           [&](const std::string& e) { return line.find(e) != std::string_view::npos; });
    };

    for (int attempt = 0; attempt <= options.max_retries && variants.size() < m; ++attempt) {
        const auto wanted = m - variants.size();
        const auto count = std::to_string(wanted);
        CompletionRequest req;
        req.prompt = text::substitute(pattern, {{"count", count}, {"question", q.text}});
        req.params = options.params;
        req.hints = {
            {hint::kStage, hint::kStageVariants},
            {hint::kQuestionId, q.id},
            {hint::kQuestion, q.text},
            {hint::kTopicEntities, q.topic_entities},
            {hint::kCount, wanted},
            {hint::kAttempt, attempt},
        };
        const auto response = gateway.complete(std::move(req));
        for (auto line : text::split_lines(response.text)) {
            line = text::strip_list_marker(line);
            if (line.empty() || !keeps_entities(line)) continue;
            variants.emplace_back(line);
            if (variants.size() == m) break;
        }
    }
    while (variants.size() < m) variants.push_back(q.text);
    return variants;
}

// ---------------------------------------------------------------------------
// MetaQA QA files

std::optional<int> infer_hop_label(std::string_view path) {
    static const std::regex kHop(R"(([1-9])-hop)");
    std::cmatch m;
    const std::string s(path);
    if (std::regex_search(s.c_str(), m, kHop)) return m[1].str()[0] - '0';
    return std::nullopt;
}

QaDataset load_metaqa_qa(std::istream& in, const std::string& name, std::optional<int> default_hops) {
    QaDataset ds;
    ds.name = name;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (text::trim(view).empty()) continue;

        const auto tab = view.find('\t');
        if (tab == std::string_view::npos) throw ParseError(line_no, "expected 'question<TAB>answers'");
        auto answers_field = view.substr(tab + 1);
        std::optional<int> hops = default_hops;
        if (const auto tab2 = answers_field.find('\t'); tab2 != std::string_view::npos) {
            const std::string label(text::trim(answers_field.substr(tab2 + 1)));
            answers_field = answers_field.substr(0, tab2);
            if (label.size() != 1 || !std::isdigit(static_cast<unsigned char>(label[0])) || label[0] == '0') {
                throw ParseError(line_no, "hop label must be a single digit 1-9");
            }
            hops = label[0] - '0';
        }

        Question q;
        q.id = name + ":" + std::to_string(line_no);
        try {
            auto parsed = parse_topic_entities(view.substr(0, tab));
            q.text = std::string(text::trim(parsed.text));
            q.topic_entities = std::move(parsed.entities);
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        if (q.topic_entities.empty()) throw ParseError(line_no, "question has no [bracketed] topic entity");
        q.hop_label = hops;

        std::size_t start = 0;
        while (start <= answers_field.size()) {
            auto end = answers_field.find('|', start);
            if (end == std::string_view::npos) end = answers_field.size();
            const auto answer = text::trim(answers_field.substr(start, end - start));
            if (!answer.empty()) q.gold_answers.emplace_back(answer);
            start = end + 1;
        }
        if (q.gold_answers.empty()) {
            ds.skipped.push_back(q.id);
            continue;
        }
        ds.questions.push_back(std::move(q));
    }
    return ds;
}

QaDataset load_metaqa_qa_file(const std::string& path, std::optional<int> default_hops) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open QA file '" + path + "'");
    if (!default_hops) default_hops = infer_hop_label(path);
    const auto slash = path.find_last_of('/');
    return load_metaqa_qa(in, slash == std::string::npos ? path : path.substr(slash + 1), default_hops);
}

}  // namespace kgnav
