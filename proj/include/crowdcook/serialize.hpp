// JSON serialization for every pipeline artifact.
//
// Checkpoints are newline-delimited JSON (one record per line); the model
// and cookbook are single versioned JSON documents. Keys serialize in
// sorted order and doubles round-trip exactly, so identical values mean
// identical bytes.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdcook/classify.hpp"
#include "crowdcook/cookbook.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"
#include "crowdcook/text.hpp"

namespace crowdcook {

using json = nlohmann::json;

inline json to_json(const Post& post) {
    json j;
    j["id"] = post.id;
    j["post_type"] = post.is_question() ? "question" : "answer";
    if (post.parent_id) j["parent_id"] = *post.parent_id;
    if (post.title) j["title"] = *post.title;
    j["body"] = post.body;
    if (!post.tags.empty()) j["tags"] = post.tags;
    j["score"] = post.score;
    if (post.accepted_answer_id) j["accepted_answer_id"] = *post.accepted_answer_id;
    j["creation_date"] = post.creation_date;
    return j;
}

inline Post post_from_json(const json& j) {
    Post post;
    post.id = j.at("id").get<std::int64_t>();
    post.post_type = j.at("post_type").get<std::string>() == "question" ? PostType::Question
                                                                        : PostType::Answer;
    if (j.contains("parent_id")) post.parent_id = j["parent_id"].get<std::int64_t>();
    if (j.contains("title")) post.title = j["title"].get<std::string>();
    post.body = j.at("body").get<std::string>();
    if (j.contains("tags")) post.tags = j["tags"].get<std::vector<std::string>>();
    post.score = j.at("score").get<int>();
    if (j.contains("accepted_answer_id"))
        post.accepted_answer_id = j["accepted_answer_id"].get<std::int64_t>();
    post.creation_date = j.value("creation_date", "");
    return post;
}

inline json to_json(const Thread& thread) {
    json j;
    j["question"] = to_json(thread.question);
    json answers = json::array();
    for (const Post& answer : thread.answers) answers.push_back(to_json(answer));
    j["answers"] = std::move(answers);
    return j;
}

inline Thread thread_from_json(const json& j) {
    Thread thread;
    thread.question = post_from_json(j.at("question"));
    for (const json& answer : j.at("answers")) thread.answers.push_back(post_from_json(answer));
    return thread;
}

// ---- NDJSON thread stores ----

inline void save_threads(const std::vector<Thread>& threads, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write thread store: " + path);
    for (const Thread& thread : threads) out << to_json(thread).dump() << '\n';
}

inline std::vector<Thread> load_threads(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open thread store: " + path);
    std::vector<Thread> threads;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        threads.push_back(thread_from_json(json::parse(line)));
    }
    return threads;
}

// Labeled store: the thread record plus label and triggered_rules.
inline void save_classified(const std::vector<ClassifiedThread>& classified,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write labeled store: " + path);
    for (const ClassifiedThread& item : classified) {
        json j = to_json(item.thread);
        j["label"] = label_name(item.label);
        json rules = json::array();
        for (const Rule rule : item.triggered_rules) rules.push_back(rule_name(rule));
        j["triggered_rules"] = std::move(rules);
        out << j.dump() << '\n';
    }
}

inline std::vector<ClassifiedThread> load_classified(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open labeled store: " + path);
    std::vector<ClassifiedThread> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        ClassifiedThread item;
        item.thread = thread_from_json(j);
        item.label = label_from_name(j.at("label").get<std::string>());
        for (const json& rule : j.at("triggered_rules"))
            item.triggered_rules.push_back(rule_from_name(rule.get<std::string>()));
        items.push_back(std::move(item));
    }
    return items;
}

// ---- Corpus checkpoint ----

inline void save_documents(const std::vector<Document>& documents, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus: " + path);
    for (const Document& doc : documents) {
        json j;
        j["thread_id"] = doc.thread_id;
        j["tokens"] = doc.tokens;
        out << j.dump() << '\n';
    }
}

inline std::vector<Document> load_documents(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus: " + path);
    std::vector<Document> documents;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        Document doc;
        doc.thread_id = j.at("thread_id").get<std::int64_t>();
        doc.tokens = j.at("tokens").get<std::vector<std::string>>();
        documents.push_back(std::move(doc));
    }
    return documents;
}

// ---- Model checkpoint ----

inline constexpr const char* kModelFormat = "crowdcook-model";
inline constexpr int kModelVersion = 1;

inline void save_model(const TopicModel& model, const std::string& path) {
    json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["k"] = model.k;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["seed"] = model.seed;
    j["iterations"] = model.iterations;
    j["vocabulary"] = model.vocabulary;
    j["doc_thread_ids"] = model.doc_thread_ids;
    j["phi"] = model.phi;
    j["theta"] = model.theta;
    j["assignments"] = model.assignments;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model: " + path);
    out << j.dump(2) << '\n';
}

inline TopicModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    const json j = json::parse(in);
    if (j.value("format", "") != kModelFormat || j.value("version", 0) != kModelVersion)
        throw std::runtime_error("not a model checkpoint (or unsupported version): " + path);
    TopicModel model;
    model.k = j.at("k").get<int>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.iterations = j.at("iterations").get<int>();
    model.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    model.doc_thread_ids = j.at("doc_thread_ids").get<std::vector<std::int64_t>>();
    model.phi = j.at("phi").get<std::vector<std::vector<double>>>();
    model.theta = j.at("theta").get<std::vector<std::vector<double>>>();
    model.assignments = j.at("assignments").get<std::vector<std::vector<int>>>();
    return model;
}

// ---- Cookbook ----

inline constexpr const char* kCookbookFormat = "crowdcook-cookbook";
inline constexpr int kCookbookVersion = 1;

inline json to_json(const BuildParams& params) {
    json j;
    j["r_min"] = params.r_min;
    j["ta"] = params.ta;
    j["initial_max_rank"] = params.initial_max_rank;
    j["rank_step"] = params.rank_step;
    j["min_chapter_size"] = params.min_chapter_size;
    j["question_char_limit"] = params.question_char_limit;
    return j;
}

inline BuildParams build_params_from_json(const json& j) {
    BuildParams params;
    params.r_min = j.at("r_min").get<int>();
    params.ta = j.at("ta").get<double>();
    params.initial_max_rank = j.at("initial_max_rank").get<int>();
    params.rank_step = j.at("rank_step").get<int>();
    params.min_chapter_size = j.at("min_chapter_size").get<int>();
    params.question_char_limit = j.at("question_char_limit").get<int>();
    return params;
}

inline json to_json(const Recipe& recipe) {
    json rj;
    rj["question"] = to_json(recipe.pair.question);
    rj["answer"] = to_json(recipe.pair.answer);
    rj["score"] = recipe.pair.score;
    rj["rank"] = recipe.pair.rank;
    rj["thread_id"] = recipe.pair.thread_id;
    rj["adherence"] = recipe.adherence;
    rj["dominant_topic"] = recipe.dominant_topic;
    return rj;
}

inline Recipe recipe_from_json(const json& rj) {
    Recipe recipe;
    recipe.pair.question = post_from_json(rj.at("question"));
    recipe.pair.answer = post_from_json(rj.at("answer"));
    recipe.pair.score = rj.at("score").get<double>();
    recipe.pair.rank = rj.at("rank").get<int>();
    recipe.pair.thread_id = rj.at("thread_id").get<std::int64_t>();
    recipe.adherence = rj.at("adherence").get<double>();
    recipe.dominant_topic = rj.at("dominant_topic").get<int>();
    return recipe;
}

inline json to_json(const Chapter& chapter) {
    json cj;
    cj["topic_id"] = chapter.topic_id;
    cj["title_terms"] = chapter.title_terms;
    json recipes = json::array();
    for (const Recipe& recipe : chapter.recipes) recipes.push_back(to_json(recipe));
    cj["recipes"] = std::move(recipes);
    return cj;
}

inline Chapter chapter_from_json(const json& cj) {
    Chapter chapter;
    chapter.topic_id = cj.at("topic_id").get<int>();
    chapter.title_terms = cj.at("title_terms").get<std::vector<std::string>>();
    for (const json& rj : cj.at("recipes")) chapter.recipes.push_back(recipe_from_json(rj));
    return chapter;
}

inline json to_json(const Cookbook& cookbook) {
    json j;
    j["format"] = kCookbookFormat;
    j["version"] = kCookbookVersion;
    j["api_tag"] = cookbook.api_tag;
    j["model_seed"] = cookbook.model_seed;
    j["final_max_rank"] = cookbook.final_max_rank;
    j["params"] = to_json(cookbook.params);
    json chapters = json::array();
    for (const Chapter& chapter : cookbook.chapters) chapters.push_back(to_json(chapter));
    j["chapters"] = std::move(chapters);
    return j;
}

inline Cookbook cookbook_from_json(const json& j) {
    if (j.value("format", "") != kCookbookFormat || j.value("version", 0) != kCookbookVersion)
        throw std::runtime_error("not a cookbook document (or unsupported version)");
    Cookbook cookbook;
    cookbook.api_tag = j.at("api_tag").get<std::string>();
    cookbook.model_seed = j.at("model_seed").get<std::uint64_t>();
    cookbook.final_max_rank = j.at("final_max_rank").get<int>();
    cookbook.params = build_params_from_json(j.at("params"));
    for (const json& cj : j.at("chapters")) cookbook.chapters.push_back(chapter_from_json(cj));
    return cookbook;
}

inline void save_cookbook(const Cookbook& cookbook, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cookbook: " + path);
    out << to_json(cookbook).dump(2) << '\n';
}

inline Cookbook load_cookbook(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open cookbook: " + path);
    return cookbook_from_json(json::parse(in));
}

// ---- Score curve ----

inline void save_score_curve(const std::vector<std::pair<int, double>>& curve,
                             const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write score curve: " + path);
    out << "rank,score\n";
    for (const auto& [rank, score] : curve) {
        json score_json = score; // shortest round-trip formatting
        out << rank << ',' << score_json.dump() << '\n';
    }
}

} // namespace crowdcook
