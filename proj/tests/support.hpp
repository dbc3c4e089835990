// Shared helpers for the test suites.

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return CROWDCOOK_TEST_DATA_DIR; }
inline std::filesystem::path repo_dir() { return CROWDCOOK_REPO_DIR; }

inline std::string data_file(const std::string& name) {
    return (data_dir() / name).string();
}

// A scratch directory under the current working directory, wiped on entry.
inline std::filesystem::path fresh_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path("test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline crowdcook::Post make_question(std::int64_t id, std::string title, std::string body,
                                     std::vector<std::string> tags = {"swt"}, int score = 1) {
    crowdcook::Post post;
    post.id = id;
    post.post_type = crowdcook::PostType::Question;
    post.title = std::move(title);
    post.body = std::move(body);
    post.tags = std::move(tags);
    post.score = score;
    post.creation_date = "2013-01-01T00:00:00.000";
    return post;
}

inline crowdcook::Post make_answer(std::int64_t id, std::int64_t parent, std::string body,
                                   int score = 1) {
    crowdcook::Post post;
    post.id = id;
    post.post_type = crowdcook::PostType::Answer;
    post.parent_id = parent;
    post.body = std::move(body);
    post.score = score;
    post.creation_date = "2013-01-02T00:00:00.000";
    return post;
}

inline crowdcook::Thread make_thread(crowdcook::Post question, std::vector<crowdcook::Post> answers) {
    return crowdcook::Thread{std::move(question), std::move(answers)};
}

// Synthetic corpus drawn from `groups` disjoint vocabularies: document j
// uses only words of group j % groups. Returns the documents plus each
// document's generating group, keyed by thread id.
struct DisjointCorpus {
    std::vector<crowdcook::Document> documents;
    std::vector<int> group_of; // indexed like documents (ascending thread id)
};

inline DisjointCorpus make_disjoint_corpus(int num_docs, int groups, int words_per_group,
                                           int doc_len, unsigned seed) {
    std::mt19937 rng(seed);
    DisjointCorpus corpus;
    for (int j = 0; j < num_docs; ++j) {
        const int group = j % groups;
        crowdcook::Document doc;
        doc.thread_id = j + 1;
        for (int t = 0; t < doc_len; ++t) {
            const int word = static_cast<int>(rng() % words_per_group);
            doc.tokens.push_back("g" + std::to_string(group) + "w" + std::to_string(word));
        }
        corpus.documents.push_back(std::move(doc));
        corpus.group_of.push_back(group);
    }
    return corpus;
}

// Fraction of documents whose dominant topic matches their group under the
// best topic-to-group assignment (brute force over topic permutations for
// two groups; majority vote otherwise).
inline double topic_purity(const crowdcook::TopicModel& model, const std::vector<int>& group_of) {
    const std::size_t docs = model.num_documents();
    std::vector<int> dominant(docs);
    for (std::size_t j = 0; j < docs; ++j)
        dominant[j] = crowdcook::dominant_topic(model, j).first;
    // count agreement for topic==group and for the swapped assignment
    std::size_t direct = 0, swapped = 0;
    for (std::size_t j = 0; j < docs; ++j) {
        if (dominant[j] == group_of[j]) ++direct;
        if (dominant[j] == 1 - group_of[j]) ++swapped;
    }
    return static_cast<double>(std::max(direct, swapped)) / static_cast<double>(docs);
}

} // namespace testsupport
