// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgnav Authors

#include "kgnav/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgnav/error.hpp"

namespace kgnav {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string numbered(std::string_view prefix, std::size_t n, int width) {
    auto digits = std::to_string(n);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return std::string(prefix) + digits;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

/// Undirected one-relation step over the whole graph.
std::set<EntityId> step(const KnowledgeGraph& g, const std::set<EntityId>& from, RelationId r) {
    std::set<EntityId> out;
    for (const auto e : from) {
        for (const auto& t : g.expand(e, r)) out.insert(t.head == e ? t.tail : t.head);
    }
    return out;
}

struct PendingQuestion {
    std::string line;
    std::vector<std::string> relations;
};

void finish(SyntheticData& data, const std::string& name, const std::vector<PendingQuestion>& questions) {
    std::string qa;
    for (const auto& q : questions) {
        qa += q.line + "\n";
        data.qa_lines.push_back(q.line);
    }
    std::istringstream in(qa);
    data.dataset = load_metaqa_qa(in, name);
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (!questions[i].relations.empty()) data.gold[data.dataset.questions[i].id] = questions[i].relations;
    }
}

}  // namespace

KnowledgeGraph SyntheticData::graph() const {
    KnowledgeGraphBuilder b;
    for (const auto& [h, r, t] : triples) b.add(h, r, t);
    return std::move(b).build();
}

void SyntheticData::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* file) {
        std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::NotFound, "cannot write '" + (dir / file).string() + "'");
        return out;
    };
    {
        auto out = open("kb.txt");
        for (const auto& [h, r, t] : triples) out << h << '|' << r << '|' << t << '\n';
    }
    {
        auto out = open("qa.txt");
        for (const auto& line : qa_lines) out << line << '\n';
    }
    if (!gold.empty()) {
        auto out = open("oracle.jsonl");
        for (const auto& q : dataset.questions) {
            auto it = gold.find(q.id);
            if (it == gold.end()) continue;
            out << nlohmann::json{{"question_id", q.id}, {"gold_relations", it->second}}.dump() << '\n';
        }
    }
}

SyntheticData generate_path_questions(const SyntheticOptions& options) {
    if (options.min_entities < 2 || options.min_entities > options.max_entities || options.min_relations < 1 ||
        options.min_relations > options.max_relations || options.max_hops < 1) {
        throw Error(ErrorCode::Usage, "inconsistent synthetic generator options");
    }
    std::mt19937_64 rng(options.seed);
    const auto n_entities = uniform(rng, options.min_entities, options.max_entities);
    const auto n_relations = uniform(rng, options.min_relations, options.max_relations);

    SyntheticData data;
    std::vector<std::string> entity_names;
    std::vector<std::string> relation_names;
    for (std::size_t i = 0; i < n_entities; ++i) entity_names.push_back(numbered("e", i, 3));
    for (std::size_t i = 0; i < n_relations; ++i) relation_names.push_back(numbered("rel_", i, 2));

    KnowledgeGraphBuilder builder;
    for (const auto& e : entity_names) builder.add_entity(e);
    std::set<std::array<std::size_t, 3>> seen;
    for (std::size_t h = 0; h < n_entities; ++h) {
        const auto degree = uniform(rng, 1, 3);
        for (std::size_t d = 0; d < degree; ++d) {
            auto t = uniform(rng, 0, n_entities - 2);
            if (t >= h) ++t;
            const auto r = uniform(rng, 0, n_relations - 1);
            if (!seen.insert({h, r, t}).second) continue;
            data.triples.push_back({entity_names[h], relation_names[r], entity_names[t]});
            builder.add(entity_names[h], relation_names[r], entity_names[t]);
        }
    }
    // Every relation name should occur at least once.
    for (std::size_t r = 0; r < n_relations; ++r) {
        const auto h = uniform(rng, 0, n_entities - 1);
        const auto t = (h + 1) % n_entities;
        if (!seen.insert({h, r, t}).second) continue;
        data.triples.push_back({entity_names[h], relation_names[r], entity_names[t]});
        builder.add(entity_names[h], relation_names[r], entity_names[t]);
    }
    const auto g = std::move(builder).build();

    std::vector<PendingQuestion> questions;
    std::set<std::pair<std::string, std::vector<std::string>>> used;
    for (int hops = 1; hops <= options.max_hops; ++hops) {
        std::size_t made = 0;
        for (std::size_t attempt = 0; made < options.questions_per_hop; ++attempt) {
            if (attempt > 200000) throw Error(ErrorCode::Setup, "synthetic generator could not place enough questions");
            std::vector<EntityId> walk{EntityId{static_cast<std::uint32_t>(uniform(rng, 0, n_entities - 1))}};
            std::vector<RelationId> path;
            bool ok = true;
            for (int i = 0; i < hops && ok; ++i) {
                const auto edges = g.out_edges(walk.back());
                if (edges.empty()) {
                    ok = false;
                    break;
                }
                const auto& e = edges[uniform(rng, 0, edges.size() - 1)];
                if (std::find(walk.begin(), walk.end(), e.other) != walk.end()) ok = false;
                walk.push_back(e.other);
                path.push_back(e.relation);
            }
            if (!ok) continue;

            std::set<EntityId> earlier;
            std::set<EntityId> w{walk[0]};
            for (int i = 1; i <= hops && ok; ++i) {
                earlier.insert(w.begin(), w.end());
                w = step(g, w, path[static_cast<std::size_t>(i - 1)]);
                if (earlier.count(walk[static_cast<std::size_t>(i)])) ok = false;
            }
            if (!ok) continue;

            std::vector<std::string> relations;
            for (const auto r : path) relations.push_back(g.name(r));
            if (!used.emplace(g.name(walk[0]), relations).second) continue;

            std::vector<std::string> answers;
            for (const auto e : w) answers.push_back(g.name(e));
            std::sort(answers.begin(), answers.end());
            std::string line = "which entity is reached from [" + g.name(walk[0]) + "] by following " +
                               join(relations, " then ") + "\t" + join(answers, "|") + "\t" + std::to_string(hops);
            questions.push_back({std::move(line), std::move(relations)});
            ++made;
        }
    }
    finish(data, "qa.txt", questions);
    return data;
}

// ---------------------------------------------------------------------------
// Movie sample

namespace {

constexpr std::array kTitleFirst = {"Silent", "Broken", "Golden", "Last",  "Midnight", "Crimson", "Hidden", "Lonely",
                                     "Wild",   "Frozen", "Distant", "Secret", "Burning", "Empty",   "Bright", "Fallen"};
constexpr std::array kTitleSecond = {"Harbor", "Road",  "Garden", "Empire", "Letter", "River", "Summer",  "Island",
                                      "Train",  "Mirror", "Valley", "Storm",  "Castle", "Dream", "Horizon", "Station"};
constexpr std::array kFirstNames = {"Anna",  "Boris",  "Carla", "David",  "Elena", "Frank", "Greta", "Hugo",
                                     "Irene", "Jonas",  "Karin", "Louis",  "Marta", "Nils",  "Olga",  "Pedro",
                                     "Rita",  "Stefan", "Tessa", "Victor", "Wanda", "Xavier", "Yara", "Zoltan"};
constexpr std::array kLastNames = {"Abbott", "Brandt",  "Castro", "Dumont", "Engel",  "Fischer", "Garner", "Holm",
                                    "Ivanov", "Jensen",  "Keller", "Larsen", "Moreau", "Novak",   "Olsen",  "Petrov",
                                    "Quinn",  "Romero",  "Sato",   "Tanaka", "Urban",  "Vidal",   "Weber",  "Young"};
constexpr std::array kLanguages = {"English", "French", "German", "Spanish", "Italian", "Japanese", "Swedish"};
constexpr std::array kGenres = {"Drama", "Comedy", "Thriller", "Horror", "Romance", "Western", "Documentary", "Action"};
constexpr std::array kTags = {"heist", "time travel", "friendship", "revenge", "coming of age", "space", "family",
                               "war", "music", "sports"};
constexpr std::array kRatings = {"Good", "Average", "Bad", "Famous"};
constexpr std::array kVotes = {"Popular", "Unknown"};

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const std::array<const char*, N>& items) {
    return items[uniform(rng, 0, N - 1)];
}

struct QuestionTemplate {
    const char* pattern;  // "{}" marks the entity
    const char* relation;
    bool from_movie;  // topic entity is the movie (head), else the person (tail)
};

constexpr std::array kTemplates = {
    QuestionTemplate{"who directed [{}]", "directed_by", true},
    QuestionTemplate{"who is the director of [{}]", "directed_by", true},
    QuestionTemplate{"who is the writer of [{}]", "written_by", true},
    QuestionTemplate{"who wrote [{}]", "written_by", true},
    QuestionTemplate{"who acted in [{}]", "starred_actors", true},
    QuestionTemplate{"who are the actors in [{}]", "starred_actors", true},
    QuestionTemplate{"when was [{}] released", "release_year", true},
    QuestionTemplate{"what language is [{}] in", "in_language", true},
    QuestionTemplate{"what genre is [{}]", "has_genre", true},
    QuestionTemplate{"what is [{}] about", "has_tags", true},
    QuestionTemplate{"how was [{}] rated", "has_imdb_rating", true},
    QuestionTemplate{"how many people voted for [{}]", "has_imdb_votes", true},
    QuestionTemplate{"what movies did [{}] direct", "directed_by", false},
    QuestionTemplate{"what films did [{}] write", "written_by", false},
    QuestionTemplate{"what movies was [{}] an actor in", "starred_actors", false},
};

}  // namespace

SyntheticData generate_movie_sample(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    SyntheticData data;

    std::vector<std::string> movies;
    for (const auto* a : kTitleFirst) {
        for (const auto* b : kTitleSecond) movies.push_back(std::string("The ") + a + " " + b);
    }
    std::shuffle(movies.begin(), movies.end(), rng);
    movies.resize(80);
    std::sort(movies.begin(), movies.end());

    std::vector<std::string> people;
    for (const auto* a : kFirstNames) {
        for (const auto* b : kLastNames) people.push_back(std::string(a) + " " + b);
    }
    std::shuffle(people.begin(), people.end(), rng);
    people.resize(90);
    std::sort(people.begin(), people.end());

    std::set<std::array<std::string, 3>> triples;
    auto person = [&] { return people[uniform(rng, 0, people.size() - 1)]; };
    for (const auto& m : movies) {
        triples.insert({m, "directed_by", person()});
        for (std::size_t i = uniform(rng, 1, 2); i > 0; --i) triples.insert({m, "written_by", person()});
        for (std::size_t i = uniform(rng, 2, 3); i > 0; --i) triples.insert({m, "starred_actors", person()});
        triples.insert({m, "release_year", std::to_string(uniform(rng, 1950, 2015))});
        triples.insert({m, "in_language", pick(rng, kLanguages)});
        for (std::size_t i = uniform(rng, 1, 2); i > 0; --i) triples.insert({m, "has_genre", pick(rng, kGenres)});
        for (std::size_t i = uniform(rng, 0, 2); i > 0; --i) triples.insert({m, "has_tags", pick(rng, kTags)});
        triples.insert({m, "has_imdb_rating", pick(rng, kRatings)});
        if (uniform(rng, 0, 2) == 0) triples.insert({m, "has_imdb_votes", pick(rng, kVotes)});
    }
    data.triples.assign(triples.begin(), triples.end());
    const auto g = data.graph();

    std::vector<PendingQuestion> questions;
    std::set<std::string> used;
    for (std::size_t attempt = 0; questions.size() < count; ++attempt) {
        if (attempt > 100000) throw Error(ErrorCode::Setup, "movie sample generator ran out of questions");
        const auto& tmpl = kTemplates[uniform(rng, 0, kTemplates.size() - 1)];
        const auto relation = g.relation(tmpl.relation);
        std::string topic;
        if (tmpl.from_movie) {
            topic = movies[uniform(rng, 0, movies.size() - 1)];
        } else {
            // A person with at least one edge of the relation.
            const auto& t = g.triples()[uniform(rng, 0, g.triple_count() - 1)];
            if (t.relation != relation) continue;
            topic = g.name(t.tail);
        }
        std::set<std::string> answers;
        for (const auto& t : g.expand(g.entity(topic), relation)) {
            answers.insert(g.name(tmpl.from_movie ? t.tail : t.head));
        }
        if (answers.empty()) continue;
        std::string text = tmpl.pattern;
        text.replace(text.find("{}"), 2, topic);
        if (!used.insert(text).second) continue;
        questions.push_back({text + "\t" + join({answers.begin(), answers.end()}, "|") + "\t1", {}});
    }
    finish(data, "qa.txt", questions);
    return data;
}

}  // namespace kgnav
