// End-to-end pipeline: ingest -> tag filter -> classify -> corpus ->
// topic model -> rank/curve -> cookbook -> render.
//
// Every stage writes a checkpoint into the output directory and records a
// stamp (a hash of its inputs and parameters). A stage re-runs only when
// its stamp changed or --force is given, so interrupted runs resume where
// they stopped. One CLI process per output directory, enforced with a
// lock file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdcook/classify.hpp"
#include "crowdcook/cookbook.hpp"
#include "crowdcook/ingest.hpp"
#include "crowdcook/lda.hpp"
#include "crowdcook/linkcheck.hpp"
#include "crowdcook/render.hpp"
#include "crowdcook/sample.hpp"
#include "crowdcook/serialize.hpp"
#include "crowdcook/text.hpp"

namespace crowdcook {

struct ModelParams {
    int k = 15;
    std::optional<double> alpha; // per-topic; empty means 50/k
    double beta = 0.01;
    int iterations = 1000;
    std::uint64_t seed = 0;
};

enum class LinkMode { Offline, Live };

struct PipelineConfig {
    std::string dump_path;
    std::string api_tag;
    std::string out_dir;
    BuildParams build;
    ModelParams model;
    std::string stopwords_path;            // empty: built-in default list
    LinkMode link_mode = LinkMode::Offline;
    std::string link_manifest;             // offline mode; empty means all alive
    std::optional<std::string> before_date; // keep posts created strictly before
    bool force = false;
    bool render_markdown_out = true;
    bool render_html_out = true;
    bool unstem_titles = false;

    void validate() const {
        if (dump_path.empty()) throw std::invalid_argument("dump path is required");
        if (api_tag.empty()) throw std::invalid_argument("api tag is required");
        for (const char c : api_tag)
            if (c >= 'A' && c <= 'Z')
                throw std::invalid_argument("api tag must be lowercase");
        if (out_dir.empty()) throw std::invalid_argument("output directory is required");
        build.validate();
        if (model.k < 2) throw std::invalid_argument("k must be >= 2");
        if (model.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    }
};

inline PipelineConfig config_from_json(const json& j) {
    PipelineConfig config;
    config.dump_path = j.value("dump", "");
    config.api_tag = j.value("tag", "");
    config.out_dir = j.value("out", "");
    if (j.contains("build")) {
        const json& b = j["build"];
        config.build.r_min = b.value("r_min", config.build.r_min);
        config.build.ta = b.value("ta", config.build.ta);
        config.build.initial_max_rank = b.value("initial_max_rank", config.build.initial_max_rank);
        config.build.rank_step = b.value("rank_step", config.build.rank_step);
        config.build.min_chapter_size = b.value("min_chapter_size", config.build.min_chapter_size);
        config.build.question_char_limit =
            b.value("question_char_limit", config.build.question_char_limit);
    }
    if (j.contains("model")) {
        const json& m = j["model"];
        config.model.k = m.value("k", config.model.k);
        if (m.contains("alpha") && !m["alpha"].is_string()) // "auto" keeps the default
            config.model.alpha = m["alpha"].get<double>();
        config.model.beta = m.value("beta", config.model.beta);
        config.model.iterations = m.value("iterations", config.model.iterations);
        config.model.seed = m.value("seed", config.model.seed);
    }
    config.stopwords_path = j.value("stopwords", "");
    if (j.contains("links")) {
        const json& l = j["links"];
        const std::string mode = l.value("mode", "offline");
        if (mode == "live") config.link_mode = LinkMode::Live;
        else if (mode == "offline") config.link_mode = LinkMode::Offline;
        else throw std::invalid_argument("links.mode must be \"offline\" or \"live\"");
        config.link_manifest = l.value("manifest", "");
    }
    if (j.contains("before")) config.before_date = j["before"].get<std::string>();
    if (j.contains("render")) {
        const json& r = j["render"];
        config.render_markdown_out = r.value("markdown", true);
        config.render_html_out = r.value("html", true);
        config.unstem_titles = r.value("unstem_titles", false);
    }
    return config;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return config_from_json(json::parse(in));
}

class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// One process per output directory.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& out_dir) {
        std::filesystem::create_directories(out_dir);
        path_ = out_dir / ".crowdcook.lock";
        if (std::filesystem::exists(path_))
            throw std::runtime_error("output directory is locked by another run: " +
                                     path_.string() + " (delete the lock if that run is gone)");
        std::ofstream out(path_);
        out << "locked\n";
    }
    ~OutputLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 0xcbf29ce484222325ull) {
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::uint64_t hash_file(const std::filesystem::path& path, std::uint64_t hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    char chunk[65536];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0)
        hash = fnv1a(std::string_view(chunk, static_cast<std::size_t>(in.gcount())), hash);
    return hash;
}

// Skip-or-run bookkeeping for one pipeline stage.
class StageRunner {
public:
    StageRunner(const std::filesystem::path& out_dir, bool force, std::ostream* log)
        : stamps_(out_dir / ".stamps"), force_(force), log_(log) {
        std::filesystem::create_directories(stamps_);
    }

    // Runs `body` unless the stamp for `name` matches and all outputs
    // exist. `fingerprint` must cover everything the stage depends on.
    template <typename Body>
    void run(const std::string& name, std::uint64_t fingerprint,
             const std::vector<std::filesystem::path>& outputs, Body&& body) {
        const std::filesystem::path stamp = stamps_ / (name + ".stamp");
        const std::string want = std::to_string(fingerprint);
        if (!force_ && std::filesystem::exists(stamp)) {
            std::ifstream in(stamp);
            std::string have;
            std::getline(in, have);
            bool complete = have == want;
            for (const auto& output : outputs)
                complete = complete && std::filesystem::exists(output);
            if (complete) {
                say(name + ": up to date, skipped");
                return;
            }
        }
        std::error_code ec;
        std::filesystem::remove(stamp, ec);
        say(name + ": running");
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
        std::ofstream out(stamp);
        out << want << '\n';
    }

    void say(const std::string& message) {
        if (log_) (*log_) << "[crowdcook] " << message << '\n';
    }

private:
    std::filesystem::path stamps_;
    bool force_;
    std::ostream* log_;
};

} // namespace detail

inline ManifestLinkChecker make_offline_checker(const PipelineConfig& config) {
    if (!config.link_manifest.empty())
        return ManifestLinkChecker(ManifestLinkChecker::load_manifest(config.link_manifest));
    return ManifestLinkChecker(std::unordered_map<std::string, int>{});
}

// The whole pipeline. The caller supplies the link checker (manifest-backed
// or live); everything else comes from the config. Returns the built
// cookbook; all checkpoints and rendered artifacts land in config.out_dir.
inline Cookbook run_pipeline(const PipelineConfig& config, LinkChecker& checker,
                             std::ostream* log = nullptr) {
    config.validate();
    const std::filesystem::path out_dir(config.out_dir);
    std::filesystem::create_directories(out_dir);
    detail::StageRunner stages(out_dir, config.force, log);

    const std::filesystem::path threads_path = out_dir / "threads.ndjson";
    const std::filesystem::path filtered_path = out_dir / "filtered.ndjson";
    const std::filesystem::path labeled_path = out_dir / "labeled.ndjson";
    const std::filesystem::path corpus_path = out_dir / "corpus.ndjson";
    const std::filesystem::path model_path = out_dir / "model.json";
    const std::filesystem::path curve_path = out_dir / "curve.csv";
    const std::filesystem::path cookbook_path = out_dir / "cookbook.json";
    const std::filesystem::path render_dir = out_dir / "render";

    auto warn = [&](const std::string& message) { stages.say("  " + message); };

    // ingest
    std::uint64_t dump_hash = detail::hash_file(config.dump_path, detail::fnv1a("ingest"));
    if (config.before_date) dump_hash = detail::fnv1a(*config.before_date, dump_hash);
    stages.run("ingest", dump_hash, {threads_path}, [&] {
        std::ifstream in(config.dump_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open dump: " + config.dump_path);
        ParseStats stats;
        std::vector<Post> posts = parse_posts(in, &stats, warn);
        if (config.before_date) {
            std::vector<Post> kept;
            for (Post& post : posts)
                if (post.creation_date < *config.before_date) kept.push_back(std::move(post));
            posts = std::move(kept);
        }
        const AssembleResult assembled = assemble_threads(posts);
        save_threads(assembled.threads, threads_path.string());
        stages.say("  " + std::to_string(stats.posts) + " posts, " +
                   std::to_string(assembled.threads.size()) + " threads, " +
                   std::to_string(stats.skipped_other_type) + " other-type rows, " +
                   std::to_string(assembled.orphan_answers) + " orphan answers");
    });

    // tag filter
    const std::uint64_t filter_hash =
        detail::fnv1a(config.api_tag, detail::hash_file(threads_path, detail::fnv1a("filter")));
    stages.run("filter-tag", filter_hash, {filtered_path}, [&] {
        const std::vector<Thread> threads = load_threads(threads_path.string());
        const std::vector<Thread> filtered = filter_by_tag(threads, config.api_tag);
        if (filtered.empty())
            throw std::runtime_error("no threads with tag '" + config.api_tag + "'");
        save_threads(filtered, filtered_path.string());
        stages.say("  " + std::to_string(filtered.size()) + " threads tagged '" +
                   config.api_tag + "'");
    });

    // classify
    const std::uint64_t classify_hash = detail::hash_file(filtered_path, detail::fnv1a("classify"));
    stages.run("classify", classify_hash, {labeled_path}, [&] {
        const std::vector<Thread> threads = load_threads(filtered_path.string());
        std::vector<ClassifiedThread> classified;
        classified.reserve(threads.size());
        std::size_t kept = 0;
        for (const Thread& thread : threads) {
            classified.push_back(classify(thread));
            if (classified.back().label == Label::HowToDoIt) ++kept;
        }
        save_classified(classified, labeled_path.string());
        stages.say("  " + std::to_string(kept) + " of " + std::to_string(threads.size()) +
                   " threads are how-to-do-it");
    });

    // corpus
    std::uint64_t corpus_hash = detail::hash_file(labeled_path, detail::fnv1a("corpus"));
    if (!config.stopwords_path.empty())
        corpus_hash = detail::hash_file(config.stopwords_path, corpus_hash);
    stages.run("corpus", corpus_hash, {corpus_path}, [&] {
        const StopwordSet stopwords = config.stopwords_path.empty()
                                          ? default_stopwords()
                                          : StopwordSet::load(config.stopwords_path);
        std::vector<Thread> howto;
        for (ClassifiedThread& item : load_classified(labeled_path.string()))
            if (item.label == Label::HowToDoIt) howto.push_back(std::move(item.thread));
        const CorpusBuildResult built = build_documents(howto, stopwords, warn);
        save_documents(built.documents, corpus_path.string());
        stages.say("  " + std::to_string(built.documents.size()) + " documents (" +
                   std::to_string(built.empty_documents) + " empty, dropped)");
    });

    // topic model
    std::ostringstream model_param_text;
    model_param_text << config.model.k << '|'
                     << (config.model.alpha ? std::to_string(*config.model.alpha) : "auto") << '|'
                     << config.model.beta << '|' << config.model.iterations << '|'
                     << config.model.seed;
    const std::uint64_t model_hash = detail::fnv1a(
        model_param_text.str(), detail::hash_file(corpus_path, detail::fnv1a("topics")));
    stages.run("topics", model_hash, {model_path}, [&] {
        const Corpus corpus = make_corpus(load_documents(corpus_path.string()));
        FitParams params;
        params.k = config.model.k;
        params.alpha = config.model.alpha;
        params.beta = config.model.beta;
        params.iterations = config.model.iterations;
        params.seed = config.model.seed;
        const TopicModel model = fit_lda(corpus, params);
        save_model(model, model_path.string());
        stages.say("  k=" + std::to_string(model.k) + ", vocabulary " +
                   std::to_string(model.vocab_size()) + " terms");
    });

    // ranking curve
    std::ostringstream curve_param_text;
    curve_param_text << config.build.question_char_limit;
    std::uint64_t curve_hash = detail::fnv1a(
        curve_param_text.str(), detail::hash_file(labeled_path, detail::fnv1a("curve")));
    if (!config.link_manifest.empty())
        curve_hash = detail::hash_file(config.link_manifest, curve_hash);
    stages.run("curve", curve_hash, {curve_path}, [&] {
        std::vector<QaPair> pairs;
        for (const ClassifiedThread& item : load_classified(labeled_path.string())) {
            if (item.label != Label::HowToDoIt) continue;
            if (auto pair = select_pair(item.thread, checker, config.build.question_char_limit))
                pairs.push_back(std::move(*pair));
        }
        const std::vector<QaPair> ranked = rank_pairs(std::move(pairs));
        save_score_curve(export_score_curve(ranked), curve_path.string());
        stages.say("  " + std::to_string(ranked.size()) + " eligible pairs ranked");
    });

    // cookbook
    std::uint64_t build_hash = detail::fnv1a(to_json(config.build).dump(),
                                             detail::hash_file(model_path, detail::fnv1a("build")));
    build_hash = detail::hash_file(labeled_path, build_hash);
    if (!config.link_manifest.empty())
        build_hash = detail::hash_file(config.link_manifest, build_hash);
    stages.run("build", build_hash, {cookbook_path}, [&] {
        const Corpus corpus = make_corpus(load_documents(corpus_path.string()));
        const TopicModel model = load_model(model_path.string());
        std::vector<Thread> howto;
        for (ClassifiedThread& item : load_classified(labeled_path.string()))
            if (item.label == Label::HowToDoIt) howto.push_back(std::move(item.thread));
        const Cookbook cookbook =
            build_cookbook(corpus, model, howto, config.build, checker, config.api_tag);
        save_cookbook(cookbook, cookbook_path.string());
        stages.say("  " + std::to_string(cookbook.chapters.size()) + " chapters, " +
                   std::to_string(cookbook.total_recipes()) + " recipes, final rank cutoff " +
                   std::to_string(cookbook.final_max_rank));
    });

    // render
    std::ostringstream render_param_text;
    render_param_text << config.render_markdown_out << '|' << config.render_html_out << '|'
                      << config.unstem_titles;
    std::uint64_t render_hash = detail::fnv1a(
        render_param_text.str(), detail::hash_file(cookbook_path, detail::fnv1a("render")));
    if (config.unstem_titles) // surface forms come from the labeled store
        render_hash = detail::hash_file(labeled_path, render_hash);
    std::vector<std::filesystem::path> render_outputs;
    if (config.render_markdown_out) render_outputs.push_back(render_dir / "cookbook.md");
    if (config.render_html_out) render_outputs.push_back(render_dir / "html" / "index.html");
    stages.run("render", render_hash, render_outputs, [&] {
        const Cookbook cookbook = load_cookbook(cookbook_path.string());
        std::filesystem::create_directories(render_dir);
        RenderOptions options;
        SurfaceMap surface;
        if (config.unstem_titles) {
            const StopwordSet stopwords = config.stopwords_path.empty()
                                              ? default_stopwords()
                                              : StopwordSet::load(config.stopwords_path);
            std::vector<Thread> howto;
            for (ClassifiedThread& item : load_classified(labeled_path.string()))
                if (item.label == Label::HowToDoIt) howto.push_back(std::move(item.thread));
            surface = SurfaceMap::build(howto, stopwords);
            options.unstem_titles = true;
            options.surface_map = &surface;
        }
        if (config.render_markdown_out)
            render_markdown_file(cookbook, render_dir / "cookbook.md", options);
        if (config.render_html_out) render_html(cookbook, render_dir / "html", options);
    });

    return load_cookbook(cookbook_path.string());
}

} // namespace crowdcook
