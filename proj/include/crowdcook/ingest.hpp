// Stack Exchange Posts dump ingestion: a streaming row parser, thread
// assembly and tag filtering.
//
// The dump is one <row .../> element per post with the public schema
// attribute names (Id, PostTypeId, ParentId, Title, Body, Tags, Score,
// AcceptedAnswerId, CreationDate). Attribute values are XML-escaped; they
// are decoded exactly once here, so downstream code sees plain HTML markup.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crowdcook/html.hpp"

namespace crowdcook {

enum class PostType { Question, Answer };

struct Post {
    std::int64_t id = 0;
    PostType post_type = PostType::Question;
    std::optional<std::int64_t> parent_id;           // answers only
    std::optional<std::string> title;                // questions only
    std::string body;                                // HTML markup
    std::vector<std::string> tags;                   // questions only, lowercase
    int score = 0;
    std::optional<std::int64_t> accepted_answer_id;  // questions only
    std::string creation_date;                       // ISO-8601 as stored in the dump

    bool is_question() const { return post_type == PostType::Question; }
    bool is_answer() const { return post_type == PostType::Answer; }
};

struct Thread {
    Post question;
    std::vector<Post> answers; // score descending, ties by ascending id
};

class MalformedXmlError : public std::runtime_error {
public:
    MalformedXmlError(const std::string& what, std::uint64_t byte_offset)
        : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    std::uint64_t offset() const { return offset_; }

private:
    std::uint64_t offset_;
};

struct ParseStats {
    std::uint64_t rows = 0;              // row elements seen
    std::uint64_t posts = 0;             // questions + answers yielded
    std::uint64_t skipped_other_type = 0; // PostTypeId not 1 or 2
    std::uint64_t skipped_bad_row = 0;    // missing/unparsable required attribute
};

using WarnFn = std::function<void(const std::string&)>;

// Pulls posts one at a time out of a dump stream. Only questions and
// answers are yielded; other row types are counted and skipped, rows with
// a missing required attribute are counted, reported through `warn` and
// skipped. Structural problems abort with MalformedXmlError.
class PostStream {
public:
    explicit PostStream(std::istream& in, WarnFn warn = {}) : in_(in), warn_(std::move(warn)) {}

    const ParseStats& stats() const { return stats_; }

    std::optional<Post> next() {
        if (!bom_checked_) {
            bom_checked_ = true;
            if (ensure(3) && std::string_view(buf_).substr(pos_, 3) == "\xef\xbb\xbf") advance(3);
        }
        while (true) {
            skip_whitespace();
            if (!ensure(1)) return std::nullopt; // clean EOF between elements
            if (peek() != '<')
                throw MalformedXmlError("text outside of markup", offset());
            if (match("<?")) { skip_until("?>"); continue; }
            if (match("<!--")) { skip_until("-->"); continue; }
            if (match("<!")) { skip_past('>'); continue; }
            if (match("</")) { skip_past('>'); continue; }
            if (match_word("<row")) {
                ++stats_.rows;
                auto attrs = parse_attributes();
                if (auto post = to_post(attrs)) {
                    ++stats_.posts;
                    return post;
                }
                continue;
            }
            // some other opening element (the <posts> root)
            advance(1);
            std::string name;
            while (ensure(1) && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                name.push_back(take());
            if (name.empty())
                throw MalformedXmlError("malformed tag", offset());
            skip_past('>');
        }
    }

private:
    std::istream& in_;
    WarnFn warn_;
    ParseStats stats_;
    std::string buf_;
    std::size_t pos_ = 0;          // cursor within buf_
    std::uint64_t consumed_ = 0;   // bytes dropped from the front of buf_
    bool eof_ = false;
    bool bom_checked_ = false;

    std::uint64_t offset() const { return consumed_ + pos_; }

    bool ensure(std::size_t n) {
        while (buf_.size() - pos_ < n && !eof_) refill();
        return buf_.size() - pos_ >= n;
    }

    void refill() {
        if (pos_ > (1u << 16) && pos_ == buf_.size()) {
            consumed_ += pos_;
            buf_.clear();
            pos_ = 0;
        }
        char chunk[65536];
        in_.read(chunk, sizeof chunk);
        const std::streamsize got = in_.gcount();
        if (got > 0) buf_.append(chunk, static_cast<std::size_t>(got));
        else eof_ = true;
    }

    char peek() { return buf_[pos_]; }
    char take() { return buf_[pos_++]; }
    void advance(std::size_t n) { pos_ += n; }

    void compact() {
        if (pos_ > (1u << 20)) {
            consumed_ += pos_;
            buf_.erase(0, pos_);
            pos_ = 0;
        }
    }

    void skip_whitespace() {
        while (ensure(1) && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
        compact();
    }

    bool match(std::string_view lit) {
        if (!ensure(lit.size())) return false;
        if (std::string_view(buf_).substr(pos_, lit.size()) != lit) return false;
        advance(lit.size());
        return true;
    }

    // Matches "<row" only when followed by a delimiter.
    bool match_word(std::string_view lit) {
        if (!ensure(lit.size() + 1)) {
            if (!ensure(lit.size())) return false;
        }
        if (std::string_view(buf_).substr(pos_, lit.size()) != lit) return false;
        if (buf_.size() - pos_ > lit.size()) {
            const char c = buf_[pos_ + lit.size()];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
        }
        advance(lit.size());
        return true;
    }

    void skip_until(std::string_view terminator) {
        while (true) {
            if (!ensure(terminator.size()))
                throw MalformedXmlError("unterminated markup", offset());
            const std::size_t found = buf_.find(terminator, pos_);
            if (found != std::string::npos) {
                pos_ = found + terminator.size();
                compact();
                return;
            }
            pos_ = buf_.size() - terminator.size() + 1;
            compact();
            if (eof_) throw MalformedXmlError("unterminated markup", offset());
        }
    }

    void skip_past(char c) { skip_until(std::string_view(&c, 1)); }

    std::unordered_map<std::string, std::string> parse_attributes() {
        std::unordered_map<std::string, std::string> attrs;
        while (true) {
            skip_whitespace();
            if (!ensure(1)) throw MalformedXmlError("unterminated row element", offset());
            if (match("/>")) return attrs;
            if (match(">")) return attrs; // tolerate non-self-closing rows
            std::string name;
            while (ensure(1) && (std::isalnum(static_cast<unsigned char>(peek())) ||
                                 peek() == '_' || peek() == '-' || peek() == ':'))
                name.push_back(take());
            if (name.empty())
                throw MalformedXmlError("expected attribute name", offset());
            skip_whitespace();
            if (!match("="))
                throw MalformedXmlError("expected '=' after attribute " + name, offset());
            skip_whitespace();
            if (!ensure(1) || (peek() != '"' && peek() != '\''))
                throw MalformedXmlError("expected quoted value for attribute " + name, offset());
            const char quote = take();
            std::string raw;
            while (true) {
                if (!ensure(1))
                    throw MalformedXmlError("unterminated attribute value for " + name, offset());
                const char c = take();
                if (c == quote) break;
                raw.push_back(c);
            }
            attrs[name] = decode_entities(raw); // the one and only decode
            compact();
        }
    }

    void warn(const std::string& msg) {
        if (warn_) warn_(msg);
    }

    static std::optional<std::int64_t> to_int(const std::unordered_map<std::string, std::string>& a,
                                              const char* key) {
        const auto it = a.find(key);
        if (it == a.end()) return std::nullopt;
        try {
            std::size_t used = 0;
            const std::int64_t v = std::stoll(it->second, &used);
            if (used != it->second.size()) return std::nullopt;
            return v;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    // "<swt><java>" (classic) or "|swt|java|" (newer dumps) -> ["swt","java"]
    static std::vector<std::string> split_tags(const std::string& value) {
        std::vector<std::string> tags;
        std::string current;
        for (const char c : value) {
            if (c == '<' || c == '>' || c == '|') {
                if (!current.empty()) tags.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(detail::ascii_lower(c));
            }
        }
        if (!current.empty()) tags.push_back(std::move(current));
        return tags;
    }

    std::optional<Post> to_post(const std::unordered_map<std::string, std::string>& attrs) {
        const auto id = to_int(attrs, "Id");
        if (!id) {
            ++stats_.skipped_bad_row;
            warn("row skipped: missing or invalid Id");
            return std::nullopt;
        }
        const auto type = to_int(attrs, "PostTypeId");
        if (!type) {
            ++stats_.skipped_bad_row;
            warn("row " + std::to_string(*id) + " skipped: missing PostTypeId");
            return std::nullopt;
        }
        if (*type != 1 && *type != 2) {
            ++stats_.skipped_other_type;
            return std::nullopt;
        }
        const auto body = attrs.find("Body");
        if (body == attrs.end()) {
            ++stats_.skipped_bad_row;
            warn("row " + std::to_string(*id) + " skipped: missing Body");
            return std::nullopt;
        }

        Post post;
        post.id = *id;
        post.body = body->second;
        if (const auto score = to_int(attrs, "Score")) post.score = static_cast<int>(*score);
        if (const auto date = attrs.find("CreationDate"); date != attrs.end())
            post.creation_date = date->second;

        if (*type == 1) {
            post.post_type = PostType::Question;
            if (const auto title = attrs.find("Title"); title != attrs.end())
                post.title = title->second;
            if (const auto tags = attrs.find("Tags"); tags != attrs.end())
                post.tags = split_tags(tags->second);
            post.accepted_answer_id = to_int(attrs, "AcceptedAnswerId");
        } else {
            post.post_type = PostType::Answer;
            const auto parent = to_int(attrs, "ParentId");
            if (!parent) {
                ++stats_.skipped_bad_row;
                warn("row " + std::to_string(*id) + " skipped: answer without ParentId");
                return std::nullopt;
            }
            post.parent_id = *parent;
        }
        return post;
    }
};

// Convenience wrapper: drain a stream into a vector.
inline std::vector<Post> parse_posts(std::istream& in, ParseStats* stats_out = nullptr,
                                     WarnFn warn = {}) {
    PostStream stream(in, std::move(warn));
    std::vector<Post> posts;
    while (auto post = stream.next()) posts.push_back(std::move(*post));
    if (stats_out) *stats_out = stream.stats();
    return posts;
}

struct AssembleResult {
    std::vector<Thread> threads;          // one per question, input order
    std::uint64_t orphan_answers = 0;     // parent never seen
    std::uint64_t duplicate_answers = 0;  // same answer id seen twice
};

inline AssembleResult assemble_threads(const std::vector<Post>& posts) {
    AssembleResult result;
    std::unordered_map<std::int64_t, std::size_t> by_question;
    for (const Post& post : posts) {
        if (post.is_question() && !by_question.count(post.id)) {
            by_question.emplace(post.id, result.threads.size());
            result.threads.push_back(Thread{post, {}});
        }
    }
    std::unordered_set<std::int64_t> seen_answers;
    for (const Post& post : posts) {
        if (!post.is_answer()) continue;
        if (!seen_answers.insert(post.id).second) {
            ++result.duplicate_answers;
            continue;
        }
        const auto it = by_question.find(*post.parent_id);
        if (it == by_question.end()) {
            ++result.orphan_answers;
            continue;
        }
        result.threads[it->second].answers.push_back(post);
    }
    for (Thread& thread : result.threads) {
        std::sort(thread.answers.begin(), thread.answers.end(), [](const Post& a, const Post& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
    }
    return result;
}

inline std::vector<Thread> filter_by_tag(const std::vector<Thread>& threads,
                                         std::string_view api_tag) {
    std::vector<Thread> out;
    for (const Thread& thread : threads) {
        for (const std::string& tag : thread.question.tags) {
            if (tag == api_tag) {
                out.push_back(thread);
                break;
            }
        }
    }
    return out;
}

} // namespace crowdcook
