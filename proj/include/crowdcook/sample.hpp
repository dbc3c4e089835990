// Question-size histogram and the stratified cookbook sampler.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdcook/cookbook.hpp"
#include "crowdcook/html.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"

namespace crowdcook {

class EmptyQuestionSetError : public std::runtime_error {
public:
    EmptyQuestionSetError() : std::runtime_error("no questions to histogram") {}
};

class EmptyCookbookError : public std::runtime_error {
public:
    EmptyCookbookError() : std::runtime_error("cookbook has no chapters") {}
};

struct Histogram {
    std::vector<long> bin_edges;       // ascending boundaries, size = bins + 1
    std::vector<std::uint64_t> counts; // per bin
    std::vector<double> percentages;   // per bin, sums to 100
};

// The size ranges used for the reference histogram: eight bins from 0 to
// 26,900 characters with the eligibility boundary at 1,300.
inline std::vector<long> default_histogram_edges() {
    return {0, 100, 300, 500, 700, 900, 1100, 1300, 26900};
}

// Bins are half-open on the left, (lo, hi], with the first bin closed on
// both ends; a question of exactly 1,300 characters therefore lands in
// the 1,100-1,300 bin, matching the "above 1,300 is too long" rule. The
// outermost bins absorb anything beyond the edge list, so every question
// is counted exactly once. Sizes are code points of the raw body markup.
inline Histogram question_size_histogram(const std::vector<Post>& questions,
                                         const std::vector<long>& bin_edges) {
    if (bin_edges.size() < 2) throw std::invalid_argument("need at least two bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i)
        if (bin_edges[i] <= bin_edges[i - 1])
            throw std::invalid_argument("bin edges must be strictly ascending");
    if (questions.empty()) throw EmptyQuestionSetError();

    Histogram histogram;
    histogram.bin_edges = bin_edges;
    const std::size_t bins = bin_edges.size() - 1;
    histogram.counts.assign(bins, 0);
    for (const Post& question : questions) {
        const long size = static_cast<long>(utf8_length(question.body));
        std::size_t bin = bins - 1; // anything past the last edge: tail capture
        for (std::size_t i = 0; i < bins; ++i) {
            if (size <= bin_edges[i + 1]) { // first bin also absorbs size < edges[0]
                bin = i;
                break;
            }
        }
        ++histogram.counts[bin];
    }
    histogram.percentages.resize(bins);
    const double total = static_cast<double>(questions.size());
    for (std::size_t i = 0; i < bins; ++i)
        histogram.percentages[i] = 100.0 * static_cast<double>(histogram.counts[i]) / total;
    return histogram;
}

inline void save_histogram(const Histogram& histogram, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write histogram: " + path);
    out << "lo,hi,count,percent\n";
    for (std::size_t i = 0; i + 1 < histogram.bin_edges.size(); ++i)
        out << histogram.bin_edges[i] << ',' << histogram.bin_edges[i + 1] << ','
            << histogram.counts[i] << ',' << histogram.percentages[i] << '\n';
}

struct SampleResult {
    std::vector<Recipe> recipes;   // one per chapter plus the extras
    std::vector<Chapter> chapters; // two below / two above the median size
};

// Stratified sample for manual evaluation: one uniformly drawn recipe per
// chapter, then `extras` more from the remainder (without replacement,
// capped at what is left). Chapter sampling takes two chapters below and
// two above the median recipe count when there are at least four chapters,
// topping up from median-sized ones when strict inequality leaves a short
// pool; otherwise every chapter is returned. Deterministic under the seed.
inline SampleResult stratified_sample(const Cookbook& cookbook, std::size_t extras,
                                      std::uint64_t seed) {
    if (cookbook.chapters.empty()) throw EmptyCookbookError();
    detail::SeededDraws draws(seed);
    SampleResult result;

    std::vector<std::pair<std::size_t, std::size_t>> remainder; // (chapter, recipe)
    for (std::size_t c = 0; c < cookbook.chapters.size(); ++c) {
        const Chapter& chapter = cookbook.chapters[c];
        const std::size_t pick = draws.below(static_cast<std::uint32_t>(chapter.recipes.size()));
        result.recipes.push_back(chapter.recipes[pick]);
        for (std::size_t r = 0; r < chapter.recipes.size(); ++r)
            if (r != pick) remainder.emplace_back(c, r);
    }
    const std::size_t extra_count = std::min(extras, remainder.size());
    for (std::size_t i = 0; i < extra_count; ++i) {
        const std::size_t pick = draws.below(static_cast<std::uint32_t>(remainder.size()));
        const auto [c, r] = remainder[pick];
        result.recipes.push_back(cookbook.chapters[c].recipes[r]);
        remainder.erase(remainder.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    if (cookbook.chapters.size() < 4) {
        result.chapters = cookbook.chapters;
        return result;
    }
    std::vector<std::size_t> sizes;
    for (const Chapter& chapter : cookbook.chapters) sizes.push_back(chapter.recipes.size());
    std::vector<std::size_t> sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    const double median =
        sorted.size() % 2 == 1
            ? static_cast<double>(sorted[sorted.size() / 2])
            : (static_cast<double>(sorted[sorted.size() / 2 - 1]) +
               static_cast<double>(sorted[sorted.size() / 2])) /
                  2.0;
    std::vector<std::size_t> below, above, at;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (static_cast<double>(sizes[c]) < median) below.push_back(c);
        else if (static_cast<double>(sizes[c]) > median) above.push_back(c);
        else at.push_back(c);
    }
    auto draw_from = [&](std::vector<std::size_t>& pool, std::size_t want,
                         std::vector<std::size_t>& into) {
        while (want > 0 && !pool.empty()) {
            const std::size_t pick = draws.below(static_cast<std::uint32_t>(pool.size()));
            into.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            --want;
        }
        return want;
    };
    std::vector<std::size_t> chosen;
    std::size_t short_by = draw_from(below, 2, chosen);
    short_by += draw_from(above, 2, chosen);
    draw_from(at, short_by, chosen);
    std::sort(chosen.begin(), chosen.end());
    for (const std::size_t c : chosen) result.chapters.push_back(cookbook.chapters[c]);
    return result;
}

} // namespace crowdcook
