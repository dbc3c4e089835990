// Cookbook rendering: canonical JSON, one Markdown file, or a static
// HTML site (an index page plus one page per chapter).
//
// Question and answer bodies are already sanitized HTML from the dump;
// they are embedded verbatim, never re-escaped, so entities written as
// &amp; stay &amp; in the output. Text the renderer itself produces
// (titles, terms) is escaped.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "crowdcook/cookbook.hpp"
#include "crowdcook/serialize.hpp"
#include "crowdcook/text.hpp"

namespace crowdcook {

// Per-stem surface forms, for showing chapter titles as real words. Maps
// each stem to its most frequent surface token (ties: lexicographically
// first) among the threads' prose.
class SurfaceMap {
public:
    SurfaceMap() = default;

    static SurfaceMap build(const std::vector<Thread>& threads, const StopwordSet& stopwords) {
        std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> counts;
        auto add_text = [&](std::string_view html) {
            const std::string plain = strip_html(strip_code(html).text);
            for (const std::string& token : tokenize(plain)) {
                if (stopwords.contains(token)) continue;
                ++counts[porter_stem(token)][token];
            }
        };
        for (const Thread& thread : threads) {
            if (thread.question.title) add_text(*thread.question.title);
            add_text(thread.question.body);
            for (const Post& answer : thread.answers) add_text(answer.body);
        }
        SurfaceMap map;
        for (const auto& [stem, surfaces] : counts) {
            std::string best;
            std::uint64_t best_count = 0;
            for (const auto& [surface, count] : surfaces) {
                if (count > best_count || (count == best_count && surface < best)) {
                    best = surface;
                    best_count = count;
                }
            }
            map.surface_[stem] = best;
        }
        return map;
    }

    std::string resolve(const std::string& stem) const {
        const auto it = surface_.find(stem);
        return it == surface_.end() ? stem : it->second;
    }

private:
    std::unordered_map<std::string, std::string> surface_;
};

struct RenderOptions {
    bool unstem_titles = false;     // display surface forms instead of stems
    const SurfaceMap* surface_map = nullptr;
};

inline std::string question_url(std::int64_t question_id) {
    return "https://stackoverflow.com/questions/" + std::to_string(question_id);
}

namespace detail {

inline std::string escape_html_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string chapter_title(const Chapter& chapter, const RenderOptions& options) {
    std::string title;
    for (const std::string& term : chapter.title_terms) {
        if (!title.empty()) title += ' ';
        title += (options.unstem_titles && options.surface_map)
                     ? options.surface_map->resolve(term)
                     : term;
    }
    return title;
}

} // namespace detail

// One Markdown document. Chapters are level-2 headings; each recipe is a
// level-3 heading numbered "Recipe <chapter>.<n>".
inline std::string render_markdown(const Cookbook& cookbook, const RenderOptions& options = {}) {
    std::ostringstream out;
    out << "# Crowd cookbook: " << cookbook.api_tag << "\n\n";
    out << cookbook.chapters.size() << " chapters, " << cookbook.total_recipes()
        << " recipes. Adherence threshold " << cookbook.params.ta << ", final rank cutoff "
        << cookbook.final_max_rank << ", model seed " << cookbook.model_seed << ".\n";
    for (std::size_t c = 0; c < cookbook.chapters.size(); ++c) {
        const Chapter& chapter = cookbook.chapters[c];
        out << "\n## Chapter " << (c + 1) << ": " << detail::chapter_title(chapter, options)
            << "\n";
        for (std::size_t r = 0; r < chapter.recipes.size(); ++r) {
            const Recipe& recipe = chapter.recipes[r];
            const Post& question = recipe.pair.question;
            out << "\n### Recipe " << (c + 1) << "." << (r + 1) << ": "
                << (question.title ? *question.title : std::string("(untitled)")) << "\n\n";
            out << "*score " << recipe.pair.score << ", rank " << recipe.pair.rank
                << ", adherence " << recipe.adherence << " — [source thread]("
                << question_url(question.id) << ")*\n\n";
            out << "**Problem**\n\n" << question.body << "\n\n";
            out << "**Solution** (answer score " << recipe.pair.answer.score << ")\n\n"
                << recipe.pair.answer.body << "\n";
        }
    }
    return out.str();
}

// Static site: index.html listing the chapters, chapter-<n>.html with one
// anchored section per recipe.
inline void render_html(const Cookbook& cookbook, const std::filesystem::path& dir,
                        const RenderOptions& options = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto open = [&](const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("output directory not writable: " + path.string());
        return out;
    };

    {
        std::ofstream out = open(dir / "index.html");
        out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n<title>"
            << detail::escape_html_text(cookbook.api_tag) << " cookbook</title></head>\n<body>\n";
        out << "<h1>Crowd cookbook: " << detail::escape_html_text(cookbook.api_tag) << "</h1>\n";
        out << "<p>" << cookbook.chapters.size() << " chapters, " << cookbook.total_recipes()
            << " recipes.</p>\n<ol>\n";
        for (std::size_t c = 0; c < cookbook.chapters.size(); ++c) {
            const Chapter& chapter = cookbook.chapters[c];
            out << "<li><a href=\"chapter-" << (c + 1) << ".html\">"
                << detail::escape_html_text(detail::chapter_title(chapter, options)) << "</a> ("
                << chapter.recipes.size() << " recipes)</li>\n";
        }
        out << "</ol>\n</body></html>\n";
    }

    for (std::size_t c = 0; c < cookbook.chapters.size(); ++c) {
        const Chapter& chapter = cookbook.chapters[c];
        std::ofstream out = open(dir / ("chapter-" + std::to_string(c + 1) + ".html"));
        const std::string title = detail::chapter_title(chapter, options);
        out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n<title>Chapter " << (c + 1)
            << ": " << detail::escape_html_text(title) << "</title></head>\n<body>\n";
        out << "<p><a href=\"index.html\">&#8592; contents</a></p>\n";
        out << "<h1>Chapter " << (c + 1) << ": " << detail::escape_html_text(title) << "</h1>\n";
        for (std::size_t r = 0; r < chapter.recipes.size(); ++r) {
            const Recipe& recipe = chapter.recipes[r];
            const Post& question = recipe.pair.question;
            out << "<section id=\"recipe-" << (c + 1) << "-" << (r + 1) << "\">\n";
            out << "<h2>Recipe " << (c + 1) << "." << (r + 1) << ": "
                << detail::escape_html_text(question.title ? *question.title : "(untitled)")
                << "</h2>\n";
            out << "<p><em>score " << recipe.pair.score << ", rank " << recipe.pair.rank
                << ", adherence " << recipe.adherence << " &#183; <a href=\""
                << question_url(question.id) << "\">source thread</a></em></p>\n";
            // bodies are dump HTML: embedded as-is, no re-escaping
            out << "<h3>Problem</h3>\n<div class=\"question\">\n" << question.body << "\n</div>\n";
            out << "<h3>Solution (answer score " << recipe.pair.answer.score
                << ")</h3>\n<div class=\"answer\">\n" << recipe.pair.answer.body << "\n</div>\n";
            out << "</section>\n";
        }
        out << "</body></html>\n";
    }
}

inline void render_markdown_file(const Cookbook& cookbook, const std::filesystem::path& path,
                                 const RenderOptions& options = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("output directory not writable: " + path.string());
    out << render_markdown(cookbook, options);
}

} // namespace crowdcook
