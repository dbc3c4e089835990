// Cookbook construction: pair eligibility, weighted scoring, ranking and
// the rank-relaxation build loop.
//
// A recipe is one question-answer pair. Eligibility is three conditions:
// the answer carries at least one code block, neither side has a dead
// link, and the question body is not above the character limit. Pair
// quality is a weighted mean of the two vote scores (0.3 question,
// 0.7 answer). The build loop admits pairs whose rank is within a cutoff,
// drops undersized chapters, and relaxes the cutoff in fixed steps until
// the cookbook holds at least r_min recipes.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crowdcook/html.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"
#include "crowdcook/linkcheck.hpp"

namespace crowdcook {

struct QaPair {
    Post question;
    Post answer;
    double score = 0.0;       // 0.3 * question.score + 0.7 * answer.score
    int rank = 0;             // 1 = best, assigned by rank_pairs
    std::int64_t thread_id = 0;
};

struct BuildParams {
    int r_min = 64;               // minimum recipes in a finished cookbook
    double ta = 0.5;              // dominant-topic adherence threshold
    int initial_max_rank = 200;   // ranking cutoff before any relaxation
    int rank_step = 10;           // cutoff increment per relaxation round
    int min_chapter_size = 3;     // smaller chapters are dropped
    int question_char_limit = 1300;

    void validate() const {
        if (r_min < 1) throw std::invalid_argument("r_min must be >= 1");
        if (ta < 0.0 || ta > 1.0) throw std::invalid_argument("ta must be in [0, 1]");
        if (initial_max_rank < 1) throw std::invalid_argument("initial_max_rank must be >= 1");
        if (rank_step < 1) throw std::invalid_argument("rank_step must be >= 1");
        if (min_chapter_size < 1) throw std::invalid_argument("min_chapter_size must be >= 1");
        if (question_char_limit < 1) throw std::invalid_argument("question_char_limit must be >= 1");
    }
};

struct Recipe {
    QaPair pair;
    double adherence = 0.0;
    int dominant_topic = 0;
};

struct Chapter {
    int topic_id = 0;
    std::vector<std::string> title_terms; // top-5 stemmed topic terms
    std::vector<Recipe> recipes;          // descending pair score (ascending rank)
};

struct Cookbook {
    std::string api_tag;
    std::vector<Chapter> chapters; // descending recipe count, ties by topic id
    BuildParams params;
    std::uint64_t model_seed = 0;
    int final_max_rank = 0;

    std::size_t total_recipes() const {
        std::size_t n = 0;
        for (const Chapter& chapter : chapters) n += chapter.recipes.size();
        return n;
    }
};

class InsufficientEligiblePairsError : public std::runtime_error {
public:
    InsufficientEligiblePairsError(std::size_t eligible, int r_min)
        : std::runtime_error("only " + std::to_string(eligible) +
                             " eligible pairs; cannot reach r_min=" + std::to_string(r_min)) {}
};

// Condition #1: at least one <pre><code> block in the answer.
inline bool answer_has_code(const Post& answer) {
    return !strip_code(answer.body).code_blocks.empty();
}

// Condition #3: strictly above the limit is too long. Counts code points
// of the body exactly as stored in the dump, markup included.
inline bool question_too_long(const Post& question, int limit) {
    return utf8_length(question.body) > static_cast<std::size_t>(limit);
}

// 0.3 * question + 0.7 * answer, computed over the integer scores with a
// single rounding so hand arithmetic like (-2, 4) -> 2.2 holds exactly.
inline double pair_score(int question_score, int answer_score) {
    return (3.0 * question_score + 7.0 * answer_score) / 10.0;
}

// Convenience passthrough to the checker for one body's links.
inline std::vector<LinkStatus> check_links(const std::vector<std::string>& urls,
                                           LinkChecker& checker) {
    return checker.check_all(urls);
}

// The eligible pair of a thread: the highest-scored answer with code whose
// links (combined with the question's) are all alive, provided the
// question is within the length limit. Score ties prefer the accepted
// answer, then the lower answer id. Absence is a value: nullopt.
inline std::optional<QaPair> select_pair(const Thread& thread, LinkChecker& checker, int limit) {
    if (question_too_long(thread.question, limit)) return std::nullopt;

    std::vector<const Post*> candidates;
    for (const Post& answer : thread.answers)
        if (answer_has_code(answer)) candidates.push_back(&answer);
    if (candidates.empty()) return std::nullopt;

    const std::int64_t accepted =
        thread.question.accepted_answer_id ? *thread.question.accepted_answer_id : -1;
    std::sort(candidates.begin(), candidates.end(), [&](const Post* a, const Post* b) {
        if (a->score != b->score) return a->score > b->score;
        const bool a_accepted = a->id == accepted;
        const bool b_accepted = b->id == accepted;
        if (a_accepted != b_accepted) return a_accepted;
        return a->id < b->id;
    });

    if (!checker.all_alive(extract_links(thread.question.body))) return std::nullopt;
    for (const Post* answer : candidates) {
        if (!checker.all_alive(extract_links(answer->body))) continue;
        QaPair pair;
        pair.question = thread.question;
        pair.answer = *answer;
        pair.score = pair_score(thread.question.score, answer->score);
        pair.thread_id = thread.question.id;
        return pair;
    }
    return std::nullopt;
}

// Rank 1 is the best score. Ties: higher answer score first, then lower
// question id, making the ranking a total order.
inline std::vector<QaPair> rank_pairs(std::vector<QaPair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const QaPair& a, const QaPair& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.answer.score != b.answer.score) return a.answer.score > b.answer.score;
        return a.question.id < b.question.id;
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].rank = static_cast<int>(i) + 1;
    return pairs;
}

// (rank, score) records of an already-ranked list, for plotting the curve
// that guides the manual choice of the initial rank cutoff.
inline std::vector<std::pair<int, double>> export_score_curve(const std::vector<QaPair>& ranked) {
    std::vector<std::pair<int, double>> curve;
    curve.reserve(ranked.size());
    for (const QaPair& pair : ranked) curve.emplace_back(pair.rank, pair.score);
    return curve;
}

inline Cookbook remove_small_chapters(Cookbook cookbook, int min_size) {
    if (min_size < 1) throw std::invalid_argument("min_size must be >= 1");
    std::vector<Chapter> kept;
    for (Chapter& chapter : cookbook.chapters)
        if (static_cast<int>(chapter.recipes.size()) >= min_size)
            kept.push_back(std::move(chapter));
    cookbook.chapters = std::move(kept);
    return cookbook;
}

// The build loop. Eligibility, scores, ranks, dominant topics and link
// checks are computed once up front and reused across relaxation rounds;
// each round still rebuilds the cookbook from scratch, so the semantics
// match a literal restart.
//
// `threads` is the full how-to thread store. The ranking spans every
// eligible pair in it — also pairs of threads whose document fell out of
// the corpus during preprocessing — so rank positions mean the same thing
// as in the exported score curve.
inline Cookbook build_cookbook(const Corpus& corpus, const TopicModel& model,
                               const std::vector<Thread>& threads, const BuildParams& params,
                               LinkChecker& checker, const std::string& api_tag) {
    params.validate();
    if (model.num_documents() != corpus.size())
        throw std::invalid_argument("model was not fitted on this corpus (document count differs)");
    for (std::size_t j = 0; j < corpus.size(); ++j)
        if (model.doc_thread_ids[j] != corpus.documents[j].thread_id)
            throw std::invalid_argument("model was not fitted on this corpus (thread ids differ)");

    std::vector<QaPair> all_pairs;
    std::unordered_map<std::int64_t, const QaPair*> pair_by_thread;
    for (const Thread& thread : threads)
        if (auto pair = select_pair(thread, checker, params.question_char_limit))
            all_pairs.push_back(std::move(*pair));
    const std::vector<QaPair> ranked = rank_pairs(std::move(all_pairs));
    for (const QaPair& pair : ranked) pair_by_thread.emplace(pair.thread_id, &pair);
    const std::size_t total_pairs = ranked.size();

    std::unordered_set<std::int64_t> known_threads;
    for (const Thread& thread : threads) known_threads.insert(thread.question.id);

    struct DocEntry {
        int dominant = 0;
        double adherence = 0.0;
        const QaPair* pair = nullptr; // ranked, or null when ineligible
    };
    std::vector<DocEntry> entries(corpus.size());
    for (std::size_t j = 0; j < corpus.size(); ++j) {
        const std::int64_t thread_id = corpus.documents[j].thread_id;
        if (!known_threads.count(thread_id))
            throw std::invalid_argument("corpus document " + std::to_string(thread_id) +
                                        " has no thread in the store");
        const auto [topic, adherence] = dominant_topic(model, j);
        entries[j].dominant = topic;
        entries[j].adherence = adherence;
        const auto it = pair_by_thread.find(thread_id);
        entries[j].pair = it == pair_by_thread.end() ? nullptr : it->second;
    }

    int max_rank = params.initial_max_rank;
    while (true) {
        std::map<int, std::vector<Recipe>> by_topic;
        for (const DocEntry& entry : entries) {
            if (entry.adherence < params.ta) continue;
            if (entry.pair == nullptr || entry.pair->rank > max_rank) continue;
            by_topic[entry.dominant].push_back(Recipe{*entry.pair, entry.adherence, entry.dominant});
        }

        std::vector<Chapter> chapters;
        std::size_t recipes = 0;
        for (auto& [topic, topic_recipes] : by_topic) {
            if (static_cast<int>(topic_recipes.size()) < params.min_chapter_size) continue;
            std::sort(topic_recipes.begin(), topic_recipes.end(),
                      [](const Recipe& a, const Recipe& b) { return a.pair.rank < b.pair.rank; });
            Chapter chapter;
            chapter.topic_id = topic;
            for (const auto& [term, prob] : topic_terms(model, topic, 5))
                chapter.title_terms.push_back(term);
            recipes += topic_recipes.size();
            chapter.recipes = std::move(topic_recipes);
            chapters.push_back(std::move(chapter));
        }

        if (recipes >= static_cast<std::size_t>(params.r_min)) {
            std::sort(chapters.begin(), chapters.end(), [](const Chapter& a, const Chapter& b) {
                if (a.recipes.size() != b.recipes.size()) return a.recipes.size() > b.recipes.size();
                return a.topic_id < b.topic_id;
            });
            Cookbook cookbook;
            cookbook.api_tag = api_tag;
            cookbook.chapters = std::move(chapters);
            cookbook.params = params;
            cookbook.model_seed = model.seed;
            cookbook.final_max_rank = max_rank;
            return cookbook;
        }
        // Once the cutoff covers every ranked pair, relaxing further
        // cannot add recipes.
        if (static_cast<std::size_t>(max_rank) >= total_pairs)
            throw InsufficientEligiblePairsError(total_pairs, params.r_min);
        max_rank += params.rank_step;
    }
}

// Post-hoc audit: re-verifies every recipe and chapter of a built cookbook
// against the three eligibility conditions, the adherence threshold, the
// rank cutoff and the structural rules. Returns human-readable violations;
// empty means the cookbook is sound.
inline std::vector<std::string> audit_cookbook(const Cookbook& cookbook, LinkChecker& checker) {
    std::vector<std::string> violations;
    std::unordered_set<std::int64_t> seen_threads;
    for (std::size_t c = 0; c < cookbook.chapters.size(); ++c) {
        const Chapter& chapter = cookbook.chapters[c];
        const std::string where = "chapter " + std::to_string(c + 1);
        if (static_cast<int>(chapter.recipes.size()) < cookbook.params.min_chapter_size)
            violations.push_back(where + ": below min_chapter_size");
        const std::unordered_set<std::string> distinct_terms(chapter.title_terms.begin(),
                                                             chapter.title_terms.end());
        if (chapter.title_terms.size() != 5 || distinct_terms.size() != 5)
            violations.push_back(where + ": title is not five distinct terms");
        for (std::size_t r = 0; r < chapter.recipes.size(); ++r) {
            const Recipe& recipe = chapter.recipes[r];
            const std::string tag = where + ", recipe " + std::to_string(r + 1);
            if (!answer_has_code(recipe.pair.answer))
                violations.push_back(tag + ": answer has no code block");
            if (question_too_long(recipe.pair.question, cookbook.params.question_char_limit))
                violations.push_back(tag + ": question above character limit");
            std::vector<std::string> urls = extract_links(recipe.pair.question.body);
            const std::vector<std::string> answer_urls = extract_links(recipe.pair.answer.body);
            urls.insert(urls.end(), answer_urls.begin(), answer_urls.end());
            for (const LinkStatus& status : checker.check_all(urls))
                if (!status.alive) violations.push_back(tag + ": dead link " + status.url);
            if (recipe.adherence < cookbook.params.ta)
                violations.push_back(tag + ": adherence below ta");
            if (recipe.pair.rank < 1 || recipe.pair.rank > cookbook.final_max_rank)
                violations.push_back(tag + ": rank outside final_max_rank");
            if (recipe.dominant_topic != chapter.topic_id)
                violations.push_back(tag + ": dominant topic differs from chapter");
            const double expected =
                pair_score(recipe.pair.question.score, recipe.pair.answer.score);
            if (recipe.pair.score != expected)
                violations.push_back(tag + ": stored score does not match weighted mean");
            if (!seen_threads.insert(recipe.pair.thread_id).second)
                violations.push_back(tag + ": thread appears in more than one recipe");
        }
    }
    return violations;
}

} // namespace crowdcook
