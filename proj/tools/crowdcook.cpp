// crowdcook — build browsable API cookbooks from Stack Overflow data dumps.
//
// Subcommands mirror the pipeline stages (ingest, filter-tag, classify,
// corpus, topics, curve, histogram, build, render, sample) plus `run`,
// which executes everything from a config file. Exit codes: 0 success,
// 1 usage error, 2 stage failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crowdcook/classify.hpp"
#include "crowdcook/cookbook.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"
#include "crowdcook/linkcheck.hpp"
#include "crowdcook/linkcheck_live.hpp"
#include "crowdcook/pipeline.hpp"
#include "crowdcook/render.hpp"
#include "crowdcook/sample.hpp"
#include "crowdcook/serialize.hpp"
#include "crowdcook/text.hpp"

namespace cc = crowdcook;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool force = false;
};

void log_line(const std::string& message) { std::cerr << "[crowdcook] " << message << '\n'; }

cc::WarnFn warner() {
    return [](const std::string& message) { log_line(message); };
}

std::unique_ptr<cc::LinkChecker> make_checker(bool live, const std::string& manifest) {
    if (live) return std::make_unique<cc::LiveLinkChecker>();
    if (!manifest.empty()) return std::make_unique<cc::ManifestLinkChecker>(manifest);
    return std::make_unique<cc::ManifestLinkChecker>(std::unordered_map<std::string, int>{});
}

std::vector<cc::Thread> howto_threads(const std::string& labeled_path) {
    std::vector<cc::Thread> howto;
    for (cc::ClassifiedThread& item : cc::load_classified(labeled_path))
        if (item.label == cc::Label::HowToDoIt) howto.push_back(std::move(item.thread));
    return howto;
}

const CLI::Validator lowercase_tag{
    [](std::string& tag) -> std::string {
        if (tag.empty()) return "tag must be non-empty";
        for (const char c : tag)
            if (c >= 'A' && c <= 'Z') return "tag must be lowercase";
        return {};
    },
    "LOWERCASE"};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crowdcook: build browsable API cookbooks from Stack Overflow data dumps"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts global;
    app.add_option("--config", global.config_path, "pipeline config file (JSON)");
    app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", global.seed, "RNG seed")->each([&](const std::string&) {
        global.seed_given = true;
    });
    app.add_flag("--force", global.force, "re-run stages even when up to date");

    std::function<void()> action;

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "parse a Posts dump into a thread store");
    {
        auto dump = std::make_shared<std::string>();
        auto before = std::make_shared<std::string>();
        ingest->add_option("--dump", *dump, "Posts XML dump file")
            ->required()
            ->check(CLI::ExistingFile);
        ingest->add_option("--before", *before,
                           "keep only posts created strictly before this ISO date");
        ingest->callback([&, dump, before] {
            action = [&, dump, before] {
                fs::create_directories(global.out_dir);
                cc::OutputLock lock(global.out_dir);
                std::ifstream in(*dump, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open dump: " + *dump);
                cc::ParseStats stats;
                std::vector<cc::Post> posts = cc::parse_posts(in, &stats, warner());
                if (!before->empty()) {
                    std::vector<cc::Post> kept;
                    for (cc::Post& post : posts)
                        if (post.creation_date < *before) kept.push_back(std::move(post));
                    posts = std::move(kept);
                }
                const cc::AssembleResult assembled = cc::assemble_threads(posts);
                const fs::path out = fs::path(global.out_dir) / "threads.ndjson";
                cc::save_threads(assembled.threads, out.string());
                log_line(std::to_string(stats.posts) + " posts -> " +
                         std::to_string(assembled.threads.size()) + " threads (" +
                         std::to_string(stats.skipped_other_type) + " other-type rows, " +
                         std::to_string(stats.skipped_bad_row) + " bad rows, " +
                         std::to_string(assembled.orphan_answers) + " orphan answers)");
                log_line("wrote " + out.string());
            };
        });
    }

    // ---- filter-tag ----
    auto* filter = app.add_subcommand("filter-tag", "keep threads whose question has the tag");
    {
        auto threads_path = std::make_shared<std::string>();
        auto tag = std::make_shared<std::string>();
        filter->add_option("--threads", *threads_path, "thread store (default <out>/threads.ndjson)");
        filter->add_option("--tag", *tag, "API tag, lowercase")->required()->check(lowercase_tag);
        filter->callback([&, threads_path, tag] {
            action = [&, threads_path, tag] {
                cc::OutputLock lock(global.out_dir);
                const std::string in = threads_path->empty()
                                           ? (fs::path(global.out_dir) / "threads.ndjson").string()
                                           : *threads_path;
                const std::vector<cc::Thread> filtered =
                    cc::filter_by_tag(cc::load_threads(in), *tag);
                if (filtered.empty())
                    throw std::runtime_error("no threads with tag '" + *tag + "'");
                const fs::path out = fs::path(global.out_dir) / "filtered.ndjson";
                cc::save_threads(filtered, out.string());
                log_line(std::to_string(filtered.size()) + " threads tagged '" + *tag + "' -> " +
                         out.string());
            };
        });
    }

    // ---- classify ----
    auto* classify_cmd =
        app.add_subcommand("classify", "label threads how-to-do-it / other; optionally evaluate");
    {
        auto threads_path = std::make_shared<std::string>();
        auto gold_path = std::make_shared<std::string>();
        classify_cmd->add_option("--threads", *threads_path,
                                 "thread store (default <out>/filtered.ndjson)");
        classify_cmd->add_option("--eval", *gold_path,
                                 "gold CSV (thread_id,gold_label): print metrics instead of writing");
        classify_cmd->callback([&, threads_path, gold_path] {
            action = [&, threads_path, gold_path] {
                const std::string in = threads_path->empty()
                                           ? (fs::path(global.out_dir) / "filtered.ndjson").string()
                                           : *threads_path;
                const std::vector<cc::Thread> threads = cc::load_threads(in);
                if (!gold_path->empty()) {
                    const auto gold = cc::load_gold_labels(*gold_path);
                    std::vector<std::pair<cc::Thread, cc::Label>> labeled;
                    std::size_t missing = 0;
                    for (const cc::Thread& thread : threads) {
                        const auto it = gold.find(thread.question.id);
                        if (it == gold.end()) { ++missing; continue; }
                        labeled.emplace_back(thread, it->second);
                    }
                    const cc::EvalMetrics m = cc::evaluate(labeled);
                    std::cout << "items      " << labeled.size() << " (" << missing
                              << " threads without gold label)\n"
                              << "accuracy   " << m.accuracy << "\n"
                              << "precision  " << m.precision << "\n"
                              << "recall     " << m.recall << "\n"
                              << "confusion  tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn
                              << " fn=" << m.fn << "\n";
                    return;
                }
                cc::OutputLock lock(global.out_dir);
                std::vector<cc::ClassifiedThread> classified;
                classified.reserve(threads.size());
                std::size_t kept = 0;
                for (const cc::Thread& thread : threads) {
                    classified.push_back(cc::classify(thread));
                    if (classified.back().label == cc::Label::HowToDoIt) ++kept;
                }
                const fs::path out = fs::path(global.out_dir) / "labeled.ndjson";
                cc::save_classified(classified, out.string());
                log_line(std::to_string(kept) + " of " + std::to_string(threads.size()) +
                         " threads are how-to-do-it -> " + out.string());
            };
        });
    }

    // ---- corpus ----
    auto* corpus_cmd = app.add_subcommand("corpus", "build LDA documents from how-to threads");
    {
        auto labeled_path = std::make_shared<std::string>();
        auto stopwords_path = std::make_shared<std::string>();
        corpus_cmd->add_option("--labeled", *labeled_path,
                               "labeled store (default <out>/labeled.ndjson)");
        corpus_cmd->add_option("--stopwords", *stopwords_path,
                               "stopword list file (default: built-in)");
        corpus_cmd->callback([&, labeled_path, stopwords_path] {
            action = [&, labeled_path, stopwords_path] {
                cc::OutputLock lock(global.out_dir);
                const std::string in = labeled_path->empty()
                                           ? (fs::path(global.out_dir) / "labeled.ndjson").string()
                                           : *labeled_path;
                const cc::StopwordSet stopwords = stopwords_path->empty()
                                                      ? cc::default_stopwords()
                                                      : cc::StopwordSet::load(*stopwords_path);
                const cc::CorpusBuildResult built =
                    cc::build_documents(howto_threads(in), stopwords, warner());
                const fs::path out = fs::path(global.out_dir) / "corpus.ndjson";
                cc::save_documents(built.documents, out.string());
                log_line(std::to_string(built.documents.size()) + " documents (" +
                         std::to_string(built.empty_documents) + " empty, dropped) -> " +
                         out.string());
            };
        });
    }

    // ---- topics ----
    auto* topics = app.add_subcommand("topics", "fit or inspect the topic model");
    topics->require_subcommand(1);
    {
        auto* fit = topics->add_subcommand("fit", "fit LDA by collapsed Gibbs sampling");
        auto corpus_path = std::make_shared<std::string>();
        auto k = std::make_shared<int>(15);
        auto alpha = std::make_shared<std::string>("auto");
        auto beta = std::make_shared<double>(0.01);
        auto iters = std::make_shared<int>(1000);
        fit->add_option("--corpus", *corpus_path, "corpus file (default <out>/corpus.ndjson)");
        fit->add_option("--k", *k, "number of topics")->capture_default_str();
        fit->add_option("--alpha", *alpha, "document-topic prior, or 'auto' for 50/k")
            ->capture_default_str();
        fit->add_option("--beta", *beta, "topic-term prior")->capture_default_str();
        fit->add_option("--iters", *iters, "Gibbs sweeps")->capture_default_str();
        fit->callback([&, corpus_path, k, alpha, beta, iters] {
            action = [&, corpus_path, k, alpha, beta, iters] {
                cc::OutputLock lock(global.out_dir);
                const std::string in = corpus_path->empty()
                                           ? (fs::path(global.out_dir) / "corpus.ndjson").string()
                                           : *corpus_path;
                const cc::Corpus corpus = cc::make_corpus(cc::load_documents(in));
                cc::FitParams params;
                params.k = *k;
                if (*alpha != "auto") params.alpha = std::stod(*alpha);
                params.beta = *beta;
                params.iterations = *iters;
                params.seed = global.seed;
                const cc::TopicModel model = cc::fit_lda(corpus, params);
                const fs::path out = fs::path(global.out_dir) / "model.json";
                cc::save_model(model, out.string());
                log_line("fitted k=" + std::to_string(model.k) + " over " +
                         std::to_string(model.num_documents()) + " documents, vocabulary " +
                         std::to_string(model.vocab_size()) + " -> " + out.string());
            };
        });

        auto* terms = topics->add_subcommand("terms", "print the top terms of a topic");
        auto model_path = std::make_shared<std::string>();
        auto topic = std::make_shared<int>(0);
        auto count = std::make_shared<int>(10);
        terms->add_option("--model", *model_path, "model file (default <out>/model.json)");
        terms->add_option("--topic", *topic, "topic id")->capture_default_str();
        terms->add_option("-n,--count", *count, "how many terms")->capture_default_str();
        terms->callback([&, model_path, topic, count] {
            action = [&, model_path, topic, count] {
                const std::string in = model_path->empty()
                                           ? (fs::path(global.out_dir) / "model.json").string()
                                           : *model_path;
                const cc::TopicModel model = cc::load_model(in);
                for (const auto& [term, prob] :
                     cc::topic_terms(model, *topic, static_cast<std::size_t>(*count)))
                    std::cout << term << ' ' << prob << '\n';
            };
        });
    }

    // ---- curve ----
    auto* curve_cmd = app.add_subcommand("curve", "rank eligible pairs and export rank,score CSV");
    {
        auto labeled_path = std::make_shared<std::string>();
        auto manifest = std::make_shared<std::string>();
        auto live = std::make_shared<bool>(false);
        auto limit = std::make_shared<int>(1300);
        curve_cmd->add_option("--labeled", *labeled_path,
                              "labeled store (default <out>/labeled.ndjson)");
        curve_cmd->add_option("--manifest", *manifest, "link manifest JSON (offline checking)");
        curve_cmd->add_flag("--live", *live, "check links over the network");
        curve_cmd->add_option("--limit", *limit, "question character limit")->capture_default_str();
        curve_cmd->callback([&, labeled_path, manifest, live, limit] {
            action = [&, labeled_path, manifest, live, limit] {
                cc::OutputLock lock(global.out_dir);
                const std::string in = labeled_path->empty()
                                           ? (fs::path(global.out_dir) / "labeled.ndjson").string()
                                           : *labeled_path;
                auto checker = make_checker(*live, *manifest);
                std::vector<cc::QaPair> pairs;
                for (const cc::Thread& thread : howto_threads(in))
                    if (auto pair = cc::select_pair(thread, *checker, *limit))
                        pairs.push_back(std::move(*pair));
                const std::vector<cc::QaPair> ranked = cc::rank_pairs(std::move(pairs));
                const fs::path out = fs::path(global.out_dir) / "curve.csv";
                cc::save_score_curve(cc::export_score_curve(ranked), out.string());
                log_line(std::to_string(ranked.size()) + " eligible pairs -> " + out.string());
            };
        });
    }

    // ---- histogram ----
    auto* histogram_cmd =
        app.add_subcommand("histogram", "question sizes per character range");
    {
        auto threads_path = std::make_shared<std::string>();
        auto edges = std::make_shared<std::vector<long>>();
        histogram_cmd->add_option("--threads", *threads_path,
                                  "thread store (default <out>/filtered.ndjson)");
        histogram_cmd->add_option("--edges", *edges, "bin edges (default: the reference ranges)");
        histogram_cmd->callback([&, threads_path, edges] {
            action = [&, threads_path, edges] {
                cc::OutputLock lock(global.out_dir);
                const std::string in = threads_path->empty()
                                           ? (fs::path(global.out_dir) / "filtered.ndjson").string()
                                           : *threads_path;
                std::vector<cc::Post> questions;
                for (const cc::Thread& thread : cc::load_threads(in))
                    questions.push_back(thread.question);
                const std::vector<long> bin_edges =
                    edges->empty() ? cc::default_histogram_edges() : *edges;
                const cc::Histogram histogram = cc::question_size_histogram(questions, bin_edges);
                const fs::path out = fs::path(global.out_dir) / "histogram.csv";
                cc::save_histogram(histogram, out.string());
                for (std::size_t i = 0; i + 1 < histogram.bin_edges.size(); ++i)
                    std::cout << histogram.bin_edges[i] << "-" << histogram.bin_edges[i + 1] << "\t"
                              << histogram.counts[i] << "\t" << histogram.percentages[i] << "%\n";
                log_line("wrote " + out.string());
            };
        });
    }

    // ---- build ----
    auto* build_cmd = app.add_subcommand("build", "run the cookbook construction loop");
    {
        auto corpus_path = std::make_shared<std::string>();
        auto model_path = std::make_shared<std::string>();
        auto labeled_path = std::make_shared<std::string>();
        auto tag = std::make_shared<std::string>();
        auto manifest = std::make_shared<std::string>();
        auto live = std::make_shared<bool>(false);
        auto audit = std::make_shared<bool>(false);
        auto params = std::make_shared<cc::BuildParams>();
        build_cmd->add_option("--corpus", *corpus_path, "corpus file (default <out>/corpus.ndjson)");
        build_cmd->add_option("--model", *model_path, "model file (default <out>/model.json)");
        build_cmd->add_option("--labeled", *labeled_path,
                              "labeled store (default <out>/labeled.ndjson)");
        build_cmd->add_option("--tag", *tag, "API tag for the cookbook")
            ->required()
            ->check(lowercase_tag);
        build_cmd->add_option("--manifest", *manifest, "link manifest JSON (offline checking)");
        build_cmd->add_flag("--live", *live, "check links over the network");
        build_cmd->add_flag("--audit", *audit, "re-verify every recipe after building");
        build_cmd->add_option("--r-min", params->r_min, "minimum recipes")->capture_default_str();
        build_cmd->add_option("--ta", params->ta, "adherence threshold")->capture_default_str();
        build_cmd->add_option("--initial-max-rank", params->initial_max_rank, "rank cutoff")
            ->capture_default_str();
        build_cmd->add_option("--rank-step", params->rank_step, "cutoff relaxation step")
            ->capture_default_str();
        build_cmd->add_option("--min-chapter-size", params->min_chapter_size, "smallest chapter")
            ->capture_default_str();
        build_cmd->add_option("--question-char-limit", params->question_char_limit,
                              "question size limit")
            ->capture_default_str();
        build_cmd->callback([&, corpus_path, model_path, labeled_path, tag, manifest, live, audit,
                             params] {
            action = [&, corpus_path, model_path, labeled_path, tag, manifest, live, audit,
                      params] {
                cc::OutputLock lock(global.out_dir);
                const fs::path out_dir(global.out_dir);
                const std::string corpus_file =
                    corpus_path->empty() ? (out_dir / "corpus.ndjson").string() : *corpus_path;
                const std::string model_file =
                    model_path->empty() ? (out_dir / "model.json").string() : *model_path;
                const std::string labeled_file =
                    labeled_path->empty() ? (out_dir / "labeled.ndjson").string() : *labeled_path;
                const cc::Corpus corpus = cc::make_corpus(cc::load_documents(corpus_file));
                const cc::TopicModel model = cc::load_model(model_file);
                auto checker = make_checker(*live, *manifest);
                const cc::Cookbook cookbook = cc::build_cookbook(
                    corpus, model, howto_threads(labeled_file), *params, *checker, *tag);
                const fs::path out = out_dir / "cookbook.json";
                cc::save_cookbook(cookbook, out.string());
                log_line(std::to_string(cookbook.chapters.size()) + " chapters, " +
                         std::to_string(cookbook.total_recipes()) + " recipes, final rank cutoff " +
                         std::to_string(cookbook.final_max_rank) + " -> " + out.string());
                if (*audit) {
                    const std::vector<std::string> violations =
                        cc::audit_cookbook(cookbook, *checker);
                    for (const std::string& violation : violations)
                        std::cerr << "audit: " << violation << '\n';
                    if (!violations.empty())
                        throw std::runtime_error("audit found " +
                                                 std::to_string(violations.size()) + " violations");
                    log_line("audit clean");
                }
            };
        });
    }

    // ---- render ----
    auto* render_cmd = app.add_subcommand("render", "write JSON / Markdown / HTML views");
    {
        auto cookbook_path = std::make_shared<std::string>();
        auto formats = std::make_shared<std::vector<std::string>>();
        auto unstem = std::make_shared<bool>(false);
        auto labeled_path = std::make_shared<std::string>();
        auto stopwords_path = std::make_shared<std::string>();
        render_cmd->add_option("--cookbook", *cookbook_path,
                               "cookbook file (default <out>/cookbook.json)");
        render_cmd->add_option("--format", *formats, "json, markdown, html (default: all)")
            ->check(CLI::IsMember({"json", "markdown", "html"}));
        render_cmd->add_flag("--unstem", *unstem, "show chapter titles as surface words");
        render_cmd->add_option("--labeled", *labeled_path,
                               "labeled store for --unstem (default <out>/labeled.ndjson)");
        render_cmd->add_option("--stopwords", *stopwords_path, "stopword list for --unstem");
        render_cmd->callback([&, cookbook_path, formats, unstem, labeled_path, stopwords_path] {
            action = [&, cookbook_path, formats, unstem, labeled_path, stopwords_path] {
                cc::OutputLock lock(global.out_dir);
                const fs::path out_dir(global.out_dir);
                const std::string in =
                    cookbook_path->empty() ? (out_dir / "cookbook.json").string() : *cookbook_path;
                const cc::Cookbook cookbook = cc::load_cookbook(in);
                std::vector<std::string> wanted = *formats;
                if (wanted.empty()) wanted = {"json", "markdown", "html"};
                cc::RenderOptions options;
                cc::SurfaceMap surface;
                if (*unstem) {
                    const std::string labeled_file = labeled_path->empty()
                                                         ? (out_dir / "labeled.ndjson").string()
                                                         : *labeled_path;
                    const cc::StopwordSet stopwords =
                        stopwords_path->empty() ? cc::default_stopwords()
                                                : cc::StopwordSet::load(*stopwords_path);
                    surface = cc::SurfaceMap::build(howto_threads(labeled_file), stopwords);
                    options.unstem_titles = true;
                    options.surface_map = &surface;
                }
                const fs::path render_dir = out_dir / "render";
                fs::create_directories(render_dir);
                for (const std::string& format : wanted) {
                    if (format == "json")
                        cc::save_cookbook(cookbook, (render_dir / "cookbook.json").string());
                    else if (format == "markdown")
                        cc::render_markdown_file(cookbook, render_dir / "cookbook.md", options);
                    else
                        cc::render_html(cookbook, render_dir / "html", options);
                }
                log_line("rendered " + std::to_string(wanted.size()) + " format(s) into " +
                         render_dir.string());
            };
        });
    }

    // ---- sample ----
    auto* sample_cmd =
        app.add_subcommand("sample", "stratified recipe and chapter sample for evaluation");
    {
        auto cookbook_path = std::make_shared<std::string>();
        auto extras = std::make_shared<std::size_t>(4);
        auto inject = std::make_shared<std::string>();
        sample_cmd->add_option("--cookbook", *cookbook_path,
                               "cookbook file (default <out>/cookbook.json)");
        sample_cmd->add_option("--extras", *extras, "extra recipes beyond one per chapter")
            ->capture_default_str();
        sample_cmd->add_option("--inject", *inject,
                               "JSON file with extra recipes/chapters to splice into the sample");
        sample_cmd->callback([&, cookbook_path, extras, inject] {
            action = [&, cookbook_path, extras, inject] {
                cc::OutputLock lock(global.out_dir);
                const fs::path out_dir(global.out_dir);
                const std::string in =
                    cookbook_path->empty() ? (out_dir / "cookbook.json").string() : *cookbook_path;
                const cc::Cookbook cookbook = cc::load_cookbook(in);
                cc::SampleResult result = cc::stratified_sample(cookbook, *extras, global.seed);
                if (!inject->empty()) {
                    std::ifstream injected_in(*inject);
                    if (!injected_in)
                        throw std::runtime_error("cannot open injection file: " + *inject);
                    const cc::json doc = cc::json::parse(injected_in);
                    if (doc.contains("recipes"))
                        for (const cc::json& rj : doc["recipes"])
                            result.recipes.push_back(cc::recipe_from_json(rj));
                    if (doc.contains("chapters"))
                        for (const cc::json& cj : doc["chapters"])
                            result.chapters.push_back(cc::chapter_from_json(cj));
                }
                cc::json j;
                j["api_tag"] = cookbook.api_tag;
                j["seed"] = global.seed;
                cc::json recipes = cc::json::array();
                for (const cc::Recipe& recipe : result.recipes)
                    recipes.push_back(cc::to_json(recipe));
                j["recipes"] = std::move(recipes);
                cc::json chapters = cc::json::array();
                for (const cc::Chapter& chapter : result.chapters)
                    chapters.push_back(cc::to_json(chapter));
                j["chapters"] = std::move(chapters);
                const fs::path out = out_dir / "sample.json";
                std::ofstream out_stream(out, std::ios::binary);
                if (!out_stream)
                    throw std::runtime_error("cannot write sample: " + out.string());
                out_stream << j.dump(2) << '\n';
                log_line(std::to_string(result.recipes.size()) + " recipes, " +
                         std::to_string(result.chapters.size()) + " chapters -> " + out.string());
            };
        });
    }

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "execute the whole pipeline");
    {
        auto dump = std::make_shared<std::string>();
        auto tag = std::make_shared<std::string>();
        auto live = std::make_shared<bool>(false);
        auto manifest = std::make_shared<std::string>();
        run_cmd->add_option("--dump", *dump, "Posts XML dump (overrides config)");
        run_cmd->add_option("--tag", *tag, "API tag (overrides config)")->check(lowercase_tag);
        run_cmd->add_option("--manifest", *manifest, "link manifest (overrides config)");
        run_cmd->add_flag("--live", *live, "live link checking (overrides config)");
        run_cmd->callback([&, dump, tag, live, manifest] {
            action = [&, dump, tag, live, manifest] {
                cc::PipelineConfig config;
                if (!global.config_path.empty()) config = cc::load_config(global.config_path);
                if (!dump->empty()) config.dump_path = *dump;
                if (!tag->empty()) config.api_tag = *tag;
                if (!manifest->empty()) config.link_manifest = *manifest;
                if (*live) config.link_mode = cc::LinkMode::Live;
                if (global.out_dir != ".") config.out_dir = global.out_dir;
                if (config.out_dir.empty()) config.out_dir = global.out_dir;
                if (global.seed_given) config.model.seed = global.seed;
                config.force = config.force || global.force;
                config.validate();
                cc::OutputLock lock(config.out_dir);
                std::unique_ptr<cc::LinkChecker> checker =
                    config.link_mode == cc::LinkMode::Live
                        ? make_checker(true, "")
                        : make_checker(false, config.link_manifest);
                const cc::Cookbook cookbook = cc::run_pipeline(config, *checker, &std::cerr);
                log_line("done: " + std::to_string(cookbook.chapters.size()) + " chapters, " +
                         std::to_string(cookbook.total_recipes()) + " recipes");
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        action();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
