// The three-rule how-to-do-it gate and its evaluation harness.
//
// A question passes when it mentions "how" (title or prose body), its prose
// body carries none of the nine debug-flavoured terms, and its code blocks
// do not contain "error". Prose matching is whole-word and case-insensitive;
// code matching is substring, since identifiers like onError have no word
// boundaries. Both policies sit behind TermMatcher so they can be swapped.

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crowdcook/html.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/text.hpp"

namespace crowdcook {

enum class Label { HowToDoIt, Other };

enum class Rule { NoHow, DebugTermInBody, ErrorInCode };

inline const std::array<std::string_view, 9>& debug_terms() {
    static const std::array<std::string_view, 9> terms = {
        "fail", "problem", "error", "wrong", "fix", "bug", "issue", "solve", "trouble"};
    return terms;
}

enum class MatchPolicy { WholeWord, Substring };

// One text, many term lookups. WholeWord tokenizes once and matches exact
// lowercase tokens; Substring matches case-insensitively anywhere.
class TermMatcher {
public:
    TermMatcher(std::string_view text, MatchPolicy policy) : policy_(policy) {
        if (policy_ == MatchPolicy::WholeWord) {
            for (std::string& token : tokenize(text)) tokens_.insert(std::move(token));
        } else {
            lowered_.reserve(text.size());
            for (const char c : text) lowered_.push_back(detail::ascii_lower(c));
        }
    }

    bool contains(std::string_view term) const {
        if (policy_ == MatchPolicy::WholeWord) return tokens_.count(std::string(term)) != 0;
        return lowered_.find(term) != std::string::npos;
    }

private:
    MatchPolicy policy_;
    std::unordered_set<std::string> tokens_;
    std::string lowered_;
};

// Natural-language text of a body: code blocks removed, tags stripped.
inline std::string prose_of(const Post& post) {
    return strip_html(strip_code(post.body).text);
}

// Rule 1: the word "how" in title or prose body.
inline bool contains_how(const Post& question) {
    if (question.title && TermMatcher(*question.title, MatchPolicy::WholeWord).contains("how"))
        return true;
    return TermMatcher(prose_of(question), MatchPolicy::WholeWord).contains("how");
}

// Rule 2: any debug term in the prose body. Exact tokens only; "errors"
// does not match "error".
inline bool has_debug_terms(const Post& question) {
    const TermMatcher matcher(prose_of(question), MatchPolicy::WholeWord);
    for (const std::string_view term : debug_terms())
        if (matcher.contains(term)) return true;
    return false;
}

// Rule 3: "error" anywhere inside the question's code blocks.
inline bool code_has_error(const Post& question) {
    const CleanedBody cleaned = strip_code(question.body);
    for (const std::string& block : cleaned.code_blocks)
        if (TermMatcher(block, MatchPolicy::Substring).contains("error")) return true;
    return false;
}

struct ClassifiedThread {
    Thread thread;
    Label label = Label::Other;
    std::vector<Rule> triggered_rules; // every failed rule; empty iff HowToDoIt
};

inline ClassifiedThread classify(const Thread& thread) {
    ClassifiedThread result{thread, Label::Other, {}};
    if (!contains_how(thread.question)) result.triggered_rules.push_back(Rule::NoHow);
    if (has_debug_terms(thread.question)) result.triggered_rules.push_back(Rule::DebugTermInBody);
    if (code_has_error(thread.question)) result.triggered_rules.push_back(Rule::ErrorInCode);
    result.label = result.triggered_rules.empty() ? Label::HowToDoIt : Label::Other;
    return result;
}

class EmptyDatasetError : public std::runtime_error {
public:
    EmptyDatasetError() : std::runtime_error("evaluation dataset is empty") {}
};

struct EvalMetrics {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double precision = 0.0; // 0 when no positive predictions
    double recall = 0.0;    // 0 when no positive gold items
};

// HowToDoIt is the positive class.
inline EvalMetrics evaluate(const std::vector<std::pair<Thread, Label>>& labeled) {
    if (labeled.empty()) throw EmptyDatasetError();
    EvalMetrics m;
    for (const auto& [thread, gold] : labeled) {
        const Label predicted = classify(thread).label;
        if (predicted == Label::HowToDoIt)
            (gold == Label::HowToDoIt ? m.tp : m.fp) += 1;
        else
            (gold == Label::HowToDoIt ? m.fn : m.tn) += 1;
    }
    const double total = static_cast<double>(m.tp + m.fp + m.tn + m.fn);
    m.accuracy = static_cast<double>(m.tp + m.tn) / total;
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    return m;
}

inline std::string label_name(Label label) {
    return label == Label::HowToDoIt ? "how_to_do_it" : "other";
}

inline Label label_from_name(std::string_view name) {
    std::string lowered;
    for (const char c : name) lowered.push_back(detail::ascii_lower(c));
    if (lowered == "how_to_do_it" || lowered == "how-to-do-it" || lowered == "howtodoit")
        return Label::HowToDoIt;
    if (lowered == "other") return Label::Other;
    throw std::runtime_error("unknown label: " + std::string(name));
}

inline std::string rule_name(Rule rule) {
    switch (rule) {
        case Rule::NoHow: return "no_how";
        case Rule::DebugTermInBody: return "debug_term_in_body";
        case Rule::ErrorInCode: return "error_in_code";
    }
    return "unknown";
}

inline Rule rule_from_name(std::string_view name) {
    if (name == "no_how") return Rule::NoHow;
    if (name == "debug_term_in_body") return Rule::DebugTermInBody;
    if (name == "error_in_code") return Rule::ErrorInCode;
    throw std::runtime_error("unknown rule: " + std::string(name));
}

// Gold-label CSV: header optional, rows "thread_id,gold_label".
inline std::unordered_map<std::int64_t, Label> load_gold_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gold label file: " + path);
    std::unordered_map<std::int64_t, Label> gold;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("bad gold label row: " + line);
        const std::string id_text = line.substr(0, comma);
        if (first && id_text == "thread_id") {
            first = false;
            continue;
        }
        first = false;
        gold[std::stoll(id_text)] = label_from_name(line.substr(comma + 1));
    }
    return gold;
}

} // namespace crowdcook
