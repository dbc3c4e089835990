#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "crowdcook/pipeline.hpp"
#include "crowdcook/render.hpp"
#include "crowdcook/sample.hpp"
#include "crowdcook/serialize.hpp"
#include "support.hpp"

using namespace crowdcook;
using testsupport::make_answer;
using testsupport::make_question;
using testsupport::make_thread;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<Post> questions_of_size(const std::vector<int>& sizes) {
    std::vector<Post> questions;
    std::int64_t id = 1;
    for (const int size : sizes)
        questions.push_back(make_question(id++, "t", std::string(static_cast<std::size_t>(size), 'x')));
    return questions;
}

Cookbook demo_cookbook() {
    Cookbook cookbook;
    cookbook.api_tag = "swt";
    cookbook.model_seed = 7;
    cookbook.final_max_rank = 25;
    cookbook.params.r_min = 4;
    cookbook.params.ta = 0.3;
    cookbook.params.min_chapter_size = 1;
    int rank = 1;
    std::int64_t id = 100;
    for (int c = 0; c < 3; ++c) {
        Chapter chapter;
        chapter.topic_id = c;
        chapter.title_terms = {"tabl", "column", "row", "cell", "sort"};
        const int recipes = 4 - c; // 4, 3, 2
        for (int r = 0; r < recipes; ++r) {
            Recipe recipe;
            Post question =
                make_question(id, "How to do thing " + std::to_string(id),
                              "<p>body &amp; entities stay <code>x&lt;1</code></p>");
            Post answer = make_answer(id + 1, id,
                                      "<p>answer</p><pre><code>run();</code></pre>", 10 - r);
            recipe.pair.question = question;
            recipe.pair.answer = answer;
            recipe.pair.score = pair_score(question.score, answer.score);
            recipe.pair.rank = rank++;
            recipe.pair.thread_id = id;
            recipe.adherence = 0.5;
            recipe.dominant_topic = c;
            chapter.recipes.push_back(std::move(recipe));
            id += 10;
        }
        cookbook.chapters.push_back(std::move(chapter));
    }
    return cookbook;
}

} // namespace

TEST_CASE("histogram: hand-counted fixture with the reference edges", "[emit]") {
    const Histogram h =
        question_size_histogram(questions_of_size({50, 150, 150, 2000}),
                                default_histogram_edges());
    REQUIRE(h.percentages.size() == 8);
    CHECK(h.percentages[0] == 25.0); // 50
    CHECK(h.percentages[1] == 50.0); // 150, 150
    CHECK(h.percentages[7] == 25.0); // 2000 in the tail
    for (const std::size_t i : {2, 3, 4, 5, 6}) CHECK(h.percentages[i] == 0.0);
    double sum = 0.0;
    for (const double p : h.percentages) sum += p;
    CHECK(std::abs(sum - 100.0) < 0.01);
}

TEST_CASE("histogram: all sizes in one bin", "[emit]") {
    const Histogram h =
        question_size_histogram(questions_of_size({200, 250, 299}), default_histogram_edges());
    CHECK(h.percentages[1] == 100.0);
}

TEST_CASE("histogram: 1300 falls strictly below the tail bin", "[emit]") {
    const Histogram h =
        question_size_histogram(questions_of_size({1300, 1301}), default_histogram_edges());
    CHECK(h.counts[6] == 1); // 1,100 -| 1,300 holds the boundary value
    CHECK(h.counts[7] == 1); // 1,301 starts the tail
}

TEST_CASE("histogram: every question counted exactly once", "[emit][property]") {
    std::mt19937 rng(8);
    for (int round = 0; round < 30; ++round) {
        std::vector<int> sizes;
        const int n = 1 + static_cast<int>(rng() % 50);
        for (int i = 0; i < n; ++i) sizes.push_back(static_cast<int>(rng() % 30000));
        const Histogram h = question_size_histogram(questions_of_size(sizes),
                                                    default_histogram_edges());
        std::uint64_t total = 0;
        for (const std::uint64_t c : h.counts) total += c;
        CHECK(total == sizes.size());
        double sum = 0.0;
        for (const double p : h.percentages) sum += p;
        CHECK(std::abs(sum - 100.0) < 0.01);
    }
}

TEST_CASE("histogram: errors", "[emit]") {
    CHECK_THROWS_AS(question_size_histogram({}, default_histogram_edges()),
                    EmptyQuestionSetError);
    CHECK_THROWS_AS(question_size_histogram(questions_of_size({1}), {100}),
                    std::invalid_argument);
    CHECK_THROWS_AS(question_size_histogram(questions_of_size({1}), {100, 100}),
                    std::invalid_argument);
}

TEST_CASE("labeled store round-trips with labels and rules", "[emit][serialize]") {
    std::vector<ClassifiedThread> items;
    items.push_back(classify(make_thread(
        make_question(1, "How to draw", "<p>clean body</p>"), {make_answer(2, 1, "<p>a</p>")})));
    items.push_back(classify(make_thread(
        make_question(3, "Broken", "<p>this is a bug and an error</p>"), {})));
    const auto dir = testsupport::fresh_dir("emit_labeled");
    const std::string path = (dir / "labeled.ndjson").string();
    save_classified(items, path);
    const std::vector<ClassifiedThread> loaded = load_classified(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].label == Label::HowToDoIt);
    CHECK(loaded[0].triggered_rules.empty());
    CHECK(loaded[1].label == Label::Other);
    CHECK(loaded[1].triggered_rules ==
          std::vector<Rule>{Rule::NoHow, Rule::DebugTermInBody});
    CHECK(to_json(loaded[1].thread).dump() == to_json(items[1].thread).dump());
}

TEST_CASE("corpus checkpoint round-trips", "[emit][serialize]") {
    const std::vector<Document> docs = {{7, {"tabl", "column"}}, {9, {"qt4", "widget"}}};
    const auto dir = testsupport::fresh_dir("emit_corpus");
    const std::string path = (dir / "corpus.ndjson").string();
    save_documents(docs, path);
    const std::vector<Document> loaded = load_documents(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].thread_id == 7);
    CHECK(loaded[0].tokens == docs[0].tokens);
    CHECK(loaded[1].tokens == docs[1].tokens);
}

TEST_CASE("versioned documents reject foreign files", "[emit][serialize]") {
    const auto dir = testsupport::fresh_dir("emit_version");
    const std::string path = (dir / "other.json").string();
    {
        std::ofstream out(path);
        out << "{\"format\": \"something-else\", \"version\": 1}\n";
    }
    CHECK_THROWS_AS(load_model(path), std::runtime_error);
    CHECK_THROWS_AS(load_cookbook(path), std::runtime_error);
}

TEST_CASE("cookbook JSON round-trips identically", "[emit][serialize]") {
    const Cookbook cookbook = demo_cookbook();
    const auto dir = testsupport::fresh_dir("emit_json");
    const std::string path = (dir / "cookbook.json").string();
    save_cookbook(cookbook, path);
    const Cookbook loaded = load_cookbook(path);
    CHECK(to_json(loaded).dump() == to_json(cookbook).dump());
    // canonical: saving the loaded cookbook reproduces the bytes
    const std::string path2 = (dir / "cookbook2.json").string();
    save_cookbook(loaded, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("markdown render numbers recipes chapter.n", "[emit]") {
    const std::string md = render_markdown(demo_cookbook());
    CHECK(md.find("## Chapter 1: tabl column row cell sort") != std::string::npos);
    CHECK(md.find("### Recipe 1.1:") != std::string::npos);
    CHECK(md.find("### Recipe 2.3:") != std::string::npos); // 2nd chapter, 3rd recipe
    CHECK(md.find("### Recipe 3.2:") != std::string::npos);
    CHECK(md.find("### Recipe 2.4:") == std::string::npos); // chapter 2 has 3 recipes
    CHECK(md.find("https://stackoverflow.com/questions/100") != std::string::npos);
}

TEST_CASE("html render embeds bodies without double escaping", "[emit]") {
    const auto dir = testsupport::fresh_dir("emit_html");
    render_html(demo_cookbook(), dir);
    const std::string index = slurp(dir / "index.html");
    CHECK(index.find("chapter-1.html") != std::string::npos);
    CHECK(index.find("chapter-3.html") != std::string::npos);
    const std::string chapter = slurp(dir / "chapter-1.html");
    // the body's entity arrives exactly once-escaped, not twice
    CHECK(chapter.find("body &amp; entities") != std::string::npos);
    CHECK(chapter.find("&amp;amp;") == std::string::npos);
    CHECK(chapter.find("<code>x&lt;1</code>") != std::string::npos);
    CHECK(chapter.find("id=\"recipe-1-1\"") != std::string::npos);
}

TEST_CASE("empty cookbook renders valid files", "[emit]") {
    Cookbook cookbook;
    cookbook.api_tag = "swt";
    const auto dir = testsupport::fresh_dir("emit_empty");
    render_html(cookbook, dir);
    CHECK(slurp(dir / "index.html").find("0 chapters") != std::string::npos);
    const std::string md = render_markdown(cookbook);
    CHECK(md.find("# Crowd cookbook: swt") != std::string::npos);
}

TEST_CASE("unstemmed chapter titles use the most frequent surface form", "[emit]") {
    std::vector<Thread> threads;
    threads.push_back(make_thread(
        make_question(1, "How to sort tables",
                      "<p>tables tables table sorting columns column column</p>"),
        {}));
    const SurfaceMap map = SurfaceMap::build(threads, default_stopwords());
    CHECK(map.resolve("tabl") == "tables");   // 3 x "tables" beats 1 x "table"
    CHECK(map.resolve("column") == "column"); // 2 x "column" beats 1 x "columns"
    CHECK(map.resolve("sort") == "sort");     // 1:1 tie with "sorting": lexicographic
    CHECK(map.resolve("unseen") == "unseen");

    Cookbook cookbook = demo_cookbook();
    RenderOptions options;
    options.unstem_titles = true;
    options.surface_map = &map;
    const std::string md = render_markdown(cookbook, options);
    CHECK(md.find("## Chapter 1: tables column row cell sort") != std::string::npos);
}

TEST_CASE("stratified_sample: one recipe per chapter plus extras, no duplicates", "[emit]") {
    const Cookbook cookbook = demo_cookbook(); // chapters of 4, 3, 2 recipes
    const SampleResult sample = stratified_sample(cookbook, 4, 99);
    CHECK(sample.recipes.size() == 3 + 4);
    std::set<std::int64_t> ids;
    for (const Recipe& recipe : sample.recipes) ids.insert(recipe.pair.thread_id);
    CHECK(ids.size() == sample.recipes.size()); // distinct
    // every chapter contributed at least one recipe
    for (const Chapter& chapter : cookbook.chapters) {
        bool covered = false;
        for (const Recipe& recipe : chapter.recipes) covered = covered || ids.count(recipe.pair.thread_id);
        CHECK(covered);
    }
    CHECK(sample.chapters.size() == cookbook.chapters.size()); // < 4 chapters: all
}

TEST_CASE("stratified_sample: deterministic under the seed", "[emit]") {
    const Cookbook cookbook = demo_cookbook();
    const SampleResult a = stratified_sample(cookbook, 2, 5);
    const SampleResult b = stratified_sample(cookbook, 2, 5);
    REQUIRE(a.recipes.size() == b.recipes.size());
    for (std::size_t i = 0; i < a.recipes.size(); ++i)
        CHECK(a.recipes[i].pair.thread_id == b.recipes[i].pair.thread_id);
    const SampleResult c = stratified_sample(cookbook, 2, 6);
    bool any_difference = c.recipes.size() != a.recipes.size();
    for (std::size_t i = 0; !any_difference && i < a.recipes.size(); ++i)
        any_difference = a.recipes[i].pair.thread_id != c.recipes[i].pair.thread_id;
    CHECK(any_difference); // different seed, different draw
}

TEST_CASE("stratified_sample: below/above median chapters when there are many", "[emit]") {
    Cookbook cookbook = demo_cookbook();
    // grow to 6 chapters with sizes 4,3,2,1,1,5
    for (const int size : {1, 1, 5}) {
        Chapter chapter;
        chapter.topic_id = static_cast<int>(cookbook.chapters.size());
        chapter.title_terms = {"a", "b", "c", "d", "e"};
        for (int r = 0; r < size; ++r) {
            Recipe recipe = cookbook.chapters[0].recipes[0];
            recipe.pair.thread_id = 10000 + chapter.topic_id * 100 + r;
            chapter.recipes.push_back(std::move(recipe));
        }
        cookbook.chapters.push_back(std::move(chapter));
    }
    const SampleResult sample = stratified_sample(cookbook, 0, 3);
    CHECK(sample.recipes.size() == cookbook.chapters.size());
    REQUIRE(sample.chapters.size() == 4);
    // median of {1,1,2,3,4,5} is 2.5: below = sizes 1,1,2; above = 3,4,5
    int below = 0, above = 0;
    for (const Chapter& chapter : sample.chapters) {
        if (chapter.recipes.size() < 2.5) ++below;
        else ++above;
    }
    CHECK(below == 2);
    CHECK(above == 2);
}

TEST_CASE("stratified_sample: single chapter, no extras", "[emit]") {
    Cookbook cookbook = demo_cookbook();
    cookbook.chapters.resize(1);
    const SampleResult sample = stratified_sample(cookbook, 0, 1);
    CHECK(sample.recipes.size() == 1);
    CHECK(sample.chapters.size() == 1);

    Cookbook empty;
    CHECK_THROWS_AS(stratified_sample(empty, 0, 1), EmptyCookbookError);
}

TEST_CASE("run_pipeline: byte-identical artifacts across two runs", "[emit][pipeline]") {
    PipelineConfig config;
    config.dump_path = testsupport::data_file("mini_dump.xml");
    config.api_tag = "swt";
    config.build.r_min = 28;
    config.build.ta = 0.35;
    config.build.initial_max_rank = 15;
    config.build.rank_step = 10;
    config.build.min_chapter_size = 2;
    config.model.k = 5;
    config.model.alpha = 0.5;
    config.model.iterations = 120; // quick fit for the unit suite
    config.model.seed = 7;
    config.link_manifest = testsupport::data_file("mini_links.json");

    const auto dir_a = testsupport::fresh_dir("pipeline_a");
    const auto dir_b = testsupport::fresh_dir("pipeline_b");

    config.out_dir = dir_a.string();
    ManifestLinkChecker checker_a = make_offline_checker(config);
    const Cookbook run_a = run_pipeline(config, checker_a);

    config.out_dir = dir_b.string();
    ManifestLinkChecker checker_b = make_offline_checker(config);
    const Cookbook run_b = run_pipeline(config, checker_b);

    CHECK(run_a.total_recipes() >= 28);
    for (const char* artifact : {"threads.ndjson", "filtered.ndjson", "labeled.ndjson",
                                 "corpus.ndjson", "model.json", "curve.csv", "cookbook.json"})
        CHECK(slurp(dir_a / artifact) == slurp(dir_b / artifact));
    CHECK(slurp(dir_a / "render" / "cookbook.md") == slurp(dir_b / "render" / "cookbook.md"));
    CHECK(slurp(dir_a / "render" / "html" / "index.html") ==
          slurp(dir_b / "render" / "html" / "index.html"));

    // built cookbook passes the audit
    CHECK(audit_cookbook(run_a, checker_a).empty());
}

TEST_CASE("run_pipeline: stages skip when inputs are unchanged", "[emit][pipeline]") {
    PipelineConfig config;
    config.dump_path = testsupport::data_file("mini_dump.xml");
    config.api_tag = "swt";
    config.build.r_min = 10;
    config.build.ta = 0.3;
    config.build.initial_max_rank = 40;
    config.build.min_chapter_size = 2;
    config.model.k = 4;
    config.model.alpha = 0.5;
    config.model.iterations = 40;
    config.model.seed = 3;
    config.link_manifest = testsupport::data_file("mini_links.json");
    config.out_dir = testsupport::fresh_dir("pipeline_resume").string();

    ManifestLinkChecker checker = make_offline_checker(config);
    std::ostringstream first_log;
    run_pipeline(config, checker, &first_log);
    CHECK(first_log.str().find("ingest: running") != std::string::npos);

    std::ostringstream second_log;
    run_pipeline(config, checker, &second_log);
    CHECK(second_log.str().find("ingest: up to date, skipped") != std::string::npos);
    CHECK(second_log.str().find("build: up to date, skipped") != std::string::npos);
    CHECK(second_log.str().find(": running") == std::string::npos);

    // --force re-runs everything
    config.force = true;
    std::ostringstream forced_log;
    run_pipeline(config, checker, &forced_log);
    CHECK(forced_log.str().find("ingest: running") != std::string::npos);

    // changing a model parameter re-runs from the topics stage only
    config.force = false;
    config.model.seed = 4;
    std::ostringstream changed_log;
    run_pipeline(config, checker, &changed_log);
    CHECK(changed_log.str().find("ingest: up to date, skipped") != std::string::npos);
    CHECK(changed_log.str().find("topics: running") != std::string::npos);
    CHECK(changed_log.str().find("build: running") != std::string::npos);
}

TEST_CASE("run_pipeline: the before-date filter drops newer posts", "[emit][pipeline]") {
    PipelineConfig config;
    config.dump_path = testsupport::data_file("mini_dump.xml");
    config.api_tag = "swt";
    config.model.k = 2;
    config.model.iterations = 5;
    config.out_dir = testsupport::fresh_dir("pipeline_before").string();
    config.before_date = "2013-04-01"; // mini dump dates span 2013-01 .. 2013-09
    ManifestLinkChecker checker(std::unordered_map<std::string, int>{});
    try {
        run_pipeline(config, checker);
    } catch (const StageError&) {
        // fine: the cut-down corpus may be too small to finish the build
    }
    const auto kept = load_threads(config.out_dir + "/threads.ndjson");
    std::size_t full_count = 0;
    {
        std::ifstream in(testsupport::data_file("mini_dump.xml"), std::ios::binary);
        ParseStats stats;
        full_count = assemble_threads(parse_posts(in, &stats)).threads.size();
    }
    CHECK(kept.size() < full_count);
    CHECK(!kept.empty());
    for (const Thread& thread : kept) {
        CHECK(thread.question.creation_date < "2013-04-01");
        for (const Post& answer : thread.answers) CHECK(answer.creation_date < "2013-04-01");
    }
}

TEST_CASE("run_pipeline: unknown tag fails at the filter stage", "[emit][pipeline]") {
    PipelineConfig config;
    config.dump_path = testsupport::data_file("mini_dump.xml");
    config.api_tag = "nosuchtag";
    config.model.k = 4;
    config.model.iterations = 5;
    config.out_dir = testsupport::fresh_dir("pipeline_badtag").string();
    ManifestLinkChecker checker(std::unordered_map<std::string, int>{});
    try {
        run_pipeline(config, checker);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "filter-tag");
        CHECK(std::string(e.what()).find("nosuchtag") != std::string::npos);
    }
}

TEST_CASE("config file round-trips through the loader", "[emit][pipeline]") {
    const PipelineConfig config = load_config(testsupport::data_file("mini_config.json"));
    CHECK(config.dump_path == "tests/data/mini_dump.xml");
    CHECK(config.api_tag == "swt");
    CHECK(config.build.r_min == 28);
    CHECK(config.build.ta == 0.35);
    CHECK(config.build.initial_max_rank == 15);
    CHECK(config.model.k == 6);
    CHECK(config.model.alpha.has_value());
    CHECK(*config.model.alpha == 0.5);
    CHECK(config.model.seed == 7);
    CHECK(config.link_mode == LinkMode::Offline);
    CHECK(config.link_manifest == "tests/data/mini_links.json");

    // "auto" alpha stays unset (resolved to 50/k at fit time)
    const json with_auto = {{"dump", "d"}, {"tag", "t"}, {"out", "o"},
                            {"model", {{"alpha", "auto"}, {"k", 10}}}};
    CHECK_FALSE(config_from_json(with_auto).model.alpha.has_value());
}

TEST_CASE("output lock: one process per output directory", "[emit][pipeline]") {
    const auto dir = testsupport::fresh_dir("lock_test");
    {
        OutputLock lock(dir);
        CHECK_THROWS_AS(OutputLock(dir), std::runtime_error);
    }
    // released on destruction
    CHECK_NOTHROW(OutputLock(dir));
}
