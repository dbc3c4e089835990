// Turning threads into LDA-ready documents: tokenization, stopword
// removal and stemming, glued together by build_document().

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crowdcook/html.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/porter.hpp"

namespace crowdcook {

// One preprocessed thread: the LDA input unit.
struct Document {
    std::int64_t thread_id = 0;
    std::vector<std::string> tokens; // stemmed, lowercase, stopword-free
};

// Split on every non-alphanumeric byte, lowercase, drop empty and
// pure-digit tokens. Mixed alphanumerics ("qt4") survive; non-ASCII
// bytes act as separators.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    bool has_alpha = false;
    auto flush = [&] {
        if (!current.empty() && has_alpha) tokens.push_back(current);
        current.clear();
        has_alpha = false;
    };
    for (const char c : text) {
        if (c >= 'a' && c <= 'z') {
            current.push_back(c);
            has_alpha = true;
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
            has_alpha = true;
        } else if (c >= '0' && c <= '9') {
            current.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::vector<std::string> words)
        : words_(words.begin(), words.end()) {}

    bool contains(const std::string& token) const { return words_.count(token) != 0; }
    std::size_t size() const { return words_.size(); }

    // One lowercase word per line; '#' starts a comment; blank lines ignored.
    static StopwordSet load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open stopword list: " + path);
        std::vector<std::string> words;
        std::string line;
        while (std::getline(in, line)) {
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::size_t begin = line.find_first_not_of(" \t\r");
            if (begin == std::string::npos) continue;
            std::size_t end = line.find_last_not_of(" \t\r");
            words.push_back(line.substr(begin, end - begin + 1));
        }
        return StopwordSet(std::move(words));
    }

private:
    std::unordered_set<std::string> words_;
};

// The default list: the classic 33-word English analyzer stop set plus
// "how", which is structural rather than topical in a how-to corpus.
// data/stopwords_en.txt ships the same list for overriding.
inline const StopwordSet& default_stopwords() {
    static const StopwordSet set(std::vector<std::string>{
        "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "how",
        "if", "in", "into", "is", "it", "no", "not", "of", "on", "or", "such",
        "that", "the", "their", "then", "there", "these", "they", "this",
        "to", "was", "will", "with"});
    return set;
}

// Stopwords are matched in surface form, before stemming.
inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                                 const StopwordSet& stopwords) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& token : tokens)
        if (!stopwords.contains(token)) out.push_back(token);
    return out;
}

// Concatenate question title, question body and all answer bodies (in
// thread order), then strip code, strip HTML, tokenize, drop stopwords and
// stem. Returns nullopt when nothing survives; such threads are excluded
// from the corpus.
inline std::optional<Document> build_document(const Thread& thread, const StopwordSet& stopwords) {
    Document doc;
    doc.thread_id = thread.question.id;
    auto add_text = [&](std::string_view html) {
        const CleanedBody cleaned = strip_code(html);
        const std::string plain = strip_html(cleaned.text);
        for (std::string& token : tokenize(plain)) {
            if (stopwords.contains(token)) continue;
            doc.tokens.push_back(porter_stem(token));
        }
    };
    if (thread.question.title) add_text(*thread.question.title);
    add_text(thread.question.body);
    for (const Post& answer : thread.answers) add_text(answer.body);
    if (doc.tokens.empty()) return std::nullopt;
    return doc;
}

struct CorpusBuildResult {
    std::vector<Document> documents;
    std::uint64_t empty_documents = 0; // threads that produced no tokens
};

inline CorpusBuildResult build_documents(const std::vector<Thread>& threads,
                                         const StopwordSet& stopwords,
                                         const WarnFn& warn = {}) {
    CorpusBuildResult result;
    for (const Thread& thread : threads) {
        if (auto doc = build_document(thread, stopwords)) {
            result.documents.push_back(std::move(*doc));
        } else {
            ++result.empty_documents;
            if (warn)
                warn("thread " + std::to_string(thread.question.id) +
                     " produced an empty document; excluded from corpus");
        }
    }
    return result;
}

} // namespace crowdcook
