#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "shingledate/error.hpp"
#include "shingledate/evaluate.hpp"
#include "shingledate/experiment.hpp"
#include "shingledate/heatmap.hpp"
#include "shingledate/synthetic.hpp"

using namespace shingledate;

namespace {

Estimate plain(double value) {
    Estimate est;
    est.value = value;
    est.effective_neighbors = 1;
    return est;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("evaluate computes mae and the mean-predictor baseline") {
    const std::map<std::string, int> truth = {{"a", 1200}, {"b", 1300}};

    SUBCASE("perfect predictions") {
        const std::map<std::string, Estimate> predictions = {
            {"a", plain(1200.0)}, {"b", plain(1300.0)}};
        const EvalReport report = evaluate(predictions, truth, 1250.0);
        CHECK(report.mae == 0.0);
        CHECK(report.baseline_mae == 50.0);
    }
    SUBCASE("errors of 10 and 20 average to 15") {
        const std::map<std::string, Estimate> predictions = {
            {"a", plain(1210.0)}, {"b", plain(1280.0)}};
        const EvalReport report = evaluate(predictions, truth, 1250.0);
        CHECK(report.mae == 15.0);
    }
    SUBCASE("key mismatch lists the differences") {
        const std::map<std::string, Estimate> predictions = {
            {"a", plain(1210.0)}, {"x", plain(1280.0)}};
        CHECK_THROWS_WITH_AS(
            evaluate(predictions, truth, 1250.0),
            doctest::Contains("missing from predictions: [b]"), InvalidInput);
    }
    SUBCASE("empty inputs are rejected") {
        CHECK_THROWS_AS(evaluate({}, truth, 1250.0), InvalidInput);
    }
}

TEST_CASE("evaluate is permutation-invariant in document order") {
    std::map<std::string, Estimate> predictions;
    std::map<std::string, int> truth;
    for (int i = 0; i < 20; ++i) {
        const std::string id = "doc" + std::to_string((i * 7) % 20);
        truth["doc" + std::to_string(i)] = 1200 + i;
        predictions[id] = plain(1195.0 + (i * 7) % 20);
    }
    const EvalReport a = evaluate(predictions, truth, 1210.0);
    // maps iterate sorted, so rebuilding from shuffled insertions must agree
    std::map<std::string, Estimate> reversed(predictions.rbegin(),
                                             predictions.rend());
    const EvalReport b = evaluate(reversed, truth, 1210.0);
    CHECK(a.mae == b.mae);
    CHECK(a.rows.size() == b.rows.size());
}

TEST_CASE("scatter output pins true year, estimate, zero-error column") {
    const std::map<std::string, int> truth = {{"a", 1237}};
    const std::map<std::string, Estimate> predictions = {{"a", plain(1240.0)}};
    const EvalReport report = evaluate(predictions, truth, 1250.0);
    std::ostringstream os;
    write_scatter_tsv(os, report);
    CHECK(os.str() == "1237\t1240.0\t1237\n");
}

TEST_CASE("scatter rows are sorted by true year with matching columns") {
    std::map<std::string, Estimate> predictions;
    std::map<std::string, int> truth;
    const int years[] = {1300, 1200, 1250, 1225};
    for (int i = 0; i < 4; ++i) {
        const std::string id = "d" + std::to_string(i);
        truth[id] = years[i];
        predictions[id] = plain(double(years[i]));  // perfect
    }
    const EvalReport report = evaluate(predictions, truth, 1250.0);
    std::ostringstream os;
    write_scatter_tsv(os, report);

    std::istringstream lines(os.str());
    std::string line;
    int previous = 0;
    while (std::getline(lines, line)) {
        int true_year = 0;
        double estimate = 0.0;
        int zero_line = 0;
        REQUIRE(std::sscanf(line.c_str(), "%d\t%lf\t%d", &true_year,
                            &estimate, &zero_line) == 3);
        CHECK(true_year >= previous);
        CHECK(estimate == double(true_year));  // columns 2 and 3 agree
        CHECK(zero_line == true_year);
        previous = true_year;
    }
}

namespace {

Corpus dated_ids(const std::vector<std::pair<std::string, int>>& docs) {
    Corpus corpus;
    for (const auto& [id, year] : docs) {
        Document doc;
        doc.id = id;
        doc.date = year;
        doc.tokens = {"verbum"};
        corpus.add(std::move(doc));
    }
    return corpus;
}

}  // namespace

TEST_CASE("heatmap applies clip, floor, grouping, normalization and ramp") {
    // two validation rows, six training docs in date order t0..t5,
    // group_size 5: one group of 5 plus the absorbed remainder -> 1 column?
    // use 11 docs -> 2 columns: t0..t4 and t5..t10 (absorbs the 11th)
    std::vector<std::pair<std::string, int>> train_docs;
    for (int i = 0; i < 11; ++i)
        train_docs.emplace_back("t" + std::string(1, char('a' + i)),
                                1200 + i);
    const Corpus training = dated_ids(train_docs);
    const Corpus validation = dated_ids({{"v1", 1205}, {"v2", 1210}});

    // crafted resemblances; everything absent is zero
    std::ostringstream tsv;
    // v1: ta 0.45 (clips to 0.3), tb 0.05 (floors to 0), tf..tj 0.25 each
    tsv << "v1\tta\t2\t0.45\n";
    tsv << "v1\ttb\t2\t0.05\n";
    for (char c : {'f', 'g', 'h', 'i', 'j'}) tsv << "v1\tt" << c << "\t2\t0.25\n";
    // v2: one group sums to max 0.2 avg, other to 0.18 avg -> ratio 0.9
    tsv << "v2\tta\t2\t0.5\n";   // clips to 0.3
    tsv << "v2\ttb\t2\t0.3\n";
    tsv << "v2\ttc\t2\t0.4\n";   // clips to 0.3; group avg (0.3+0.3+0.3+0.12)/5
    tsv << "v2\ttd\t2\t0.12\n";
    for (char c : {'f', 'g', 'h', 'i', 'j'})
        tsv << "v2\tt" << c << "\t2\t0.18\n";  // group avg 0.18*5/6 = 0.15
    std::istringstream in(tsv.str());
    const DistanceStore store = DistanceStore::from_tsv(in);

    HeatmapParams params;  // defaults 0.3 / 0.1 / 5 / 0.8
    const HeatmapImage image =
        render_heatmap(validation, training, store, 2, params);
    REQUIRE(image.rows == 2);
    REQUIRE(image.cols == 2);

    // row v1: group1 avg = 0.3/5 = 0.06 (0.45 clipped, 0.05 floored);
    // group2 avg = (5*0.25 + 0)/6; normalize -> (0.288, 1.0);
    // 0.288 <= 0.8 -> white, 1.0 -> black
    CHECK(image.at(0, 0) == 255);
    CHECK(image.at(0, 1) == 0);

    // row v2: group avgs 0.204 and 0.15 -> normalized (1.0, 0.735); the
    // second cell sits below the white threshold
    CHECK(image.at(1, 0) == 0);
    CHECK(image.at(1, 1) == 255);
}

TEST_CASE("heatmap linear ramp hits the documented midpoint") {
    // one row, two groups of one; group values 0.2 and 0.18 give a
    // normalized second cell of 0.9 -> pixel 128
    const Corpus training = dated_ids({{"ta", 1200}, {"tb", 1201}});
    const Corpus validation = dated_ids({{"v", 1200}});
    std::istringstream in(
        "v\tta\t2\t0.2\n"
        "v\ttb\t2\t0.18\n");
    const DistanceStore store = DistanceStore::from_tsv(in);
    HeatmapParams params;
    params.group_size = 1;
    const HeatmapImage image =
        render_heatmap(validation, training, store, 2, params);
    REQUIRE(image.cols == 2);
    CHECK(image.at(0, 0) == 0);    // normalized 1.0 -> black
    CHECK(image.at(0, 1) == 128);  // round(255 * (1 - (0.9-0.8)/0.2))
}

TEST_CASE("non-zero heatmap rows contain a black pixel") {
    SyntheticSpec spec;
    spec.n_documents = 60;
    spec.date_lo = 1100;
    spec.date_hi = 1300;
    spec.vocab_size = 400;
    spec.drift_rate = 1.5;
    spec.length_lo = 60;
    spec.length_hi = 120;
    spec.seed = 12;
    const Corpus corpus = generate_synthetic(spec);
    SplitSpec split_spec;
    split_spec.train_fraction = 0.8;
    split_spec.validation_fraction = 0.2;
    split_spec.test_fraction = 0.0;
    split_spec.seed = 3;
    const SplitResult split = split_corpus(corpus, split_spec);
    const DistanceStore store =
        DistanceStore::build(split.validation, split.train, {1});
    HeatmapParams params;
    params.group_size = 3;
    const HeatmapImage image =
        render_heatmap(split.validation, split.train, store, 1, params);
    for (std::size_t r = 0; r < image.rows; ++r) {
        bool all_white = true;
        bool has_black = false;
        for (std::size_t c = 0; c < image.cols; ++c) {
            if (image.at(r, c) != 255) all_white = false;
            if (image.at(r, c) == 0) has_black = true;
        }
        CHECK((all_white || has_black));
    }
}

TEST_CASE("pgm bytes") {
    HeatmapImage image;
    image.rows = 2;
    image.cols = 3;
    image.pixels = {0, 128, 255, 10, 20, 30};
    std::ostringstream os;
    write_pgm(os, image);
    const std::string expected = std::string("P5\n3 2\n255\n") +
                                 std::string("\x00\x80\xff\x0a\x14\x1e", 6);
    CHECK(os.str() == expected);
}

TEST_CASE("heatmap parameter validation and empty corpora") {
    HeatmapParams params;
    params.zero_floor = 0.5;
    params.clip_high = 0.4;
    CHECK_THROWS_AS(params.validate(), InvalidInput);

    const Corpus training = dated_ids({{"t", 1200}});
    const Corpus empty;
    std::istringstream in("v\tt\t1\t0.5\n");
    const DistanceStore store = DistanceStore::from_tsv(in);
    CHECK_THROWS_AS(
        render_heatmap(empty, training, store, 1, HeatmapParams{}),
        InvalidInput);
}

TEST_CASE("synthetic corpora are deterministic in the seed") {
    SyntheticSpec spec;
    spec.n_documents = 30;
    spec.date_lo = 1100;
    spec.date_hi = 1200;
    spec.vocab_size = 200;
    spec.drift_rate = 2.0;
    spec.length_lo = 20;
    spec.length_hi = 40;
    spec.seed = 42;

    const Corpus a = generate_synthetic(spec);
    const Corpus b = generate_synthetic(spec);
    std::ostringstream ma;
    std::ostringstream mb;
    write_manifest(ma, a);
    write_manifest(mb, b);
    CHECK(ma.str() == mb.str());

    spec.seed = 43;
    std::ostringstream mc;
    write_manifest(mc, generate_synthetic(spec));
    CHECK(ma.str() != mc.str());
}

TEST_CASE("synthetic drift controls vocabulary sharing") {
    SyntheticSpec spec;
    spec.n_documents = 40;
    spec.date_lo = 1100;
    spec.date_hi = 1399;
    spec.vocab_size = 300;
    spec.length_lo = 40;
    spec.length_hi = 60;
    spec.seed = 9;

    SUBCASE("zero drift: all documents draw from one window") {
        spec.drift_rate = 0.0;
        const Corpus corpus = generate_synthetic(spec);
        for (const Document& doc : corpus.documents())
            for (const std::string& token : doc.tokens) {
                const int index = std::stoi(token.substr(1));
                CHECK(index < 300);
            }
    }
    SUBCASE("fast drift: documents 100+ years apart share nothing") {
        spec.drift_rate = 3.0;  // 100 years moves a full window
        const Corpus corpus = generate_synthetic(spec);
        const auto& docs = corpus.documents();
        for (std::size_t i = 0; i < docs.size(); ++i)
            for (std::size_t j = i + 1; j < docs.size(); ++j) {
                if (std::abs(*docs[i].date - *docs[j].date) < 100) continue;
                const double d = exact_resemblance_distance(
                    docs[i].tokens, docs[j].tokens, 1);
                CHECK(d == 1.0);  // disjoint vocabulary by construction
            }
    }
}

TEST_CASE("experiment config parsing") {
    std::istringstream in(
        "# experiment\n"
        "synthetic.n_documents = 50\n"
        "synthetic.date_lo = 1100\n"
        "synthetic.date_hi = 1200\n"
        "synthetic.vocab_size = 150\n"
        "synthetic.drift_rate = 1.5\n"
        "synthetic.length_lo = 20\n"
        "synthetic.length_hi = 40\n"
        "seed = 13\n"
        "orders = 1,2\n"
        "train_fraction = 0.8\n"
        "validation_fraction = 0.2\n"
        "test_fraction = 0\n"
        "grid.h_count = 4\n"
        "grid.m = 3,5\n"
        "threads = 2\n");
    const ExperimentConfig config = ExperimentConfig::parse(in);
    CHECK(config.synthetic->n_documents == 50);
    CHECK(config.synthetic->seed == 13);
    CHECK(config.split.seed == 13);
    CHECK(config.orders == std::vector<int>{1, 2});
    CHECK(config.grid_m == std::vector<int>{3, 5});
    CHECK_NOTHROW(config.validate());

    std::istringstream bad("nonsense_key = 1\n");
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse(bad),
                         doctest::Contains("unknown key"), InvalidInput);

    std::istringstream both(
        "manifest = x.tsv\nsynthetic.n_documents = 5\n");
    CHECK_THROWS_AS(ExperimentConfig::parse(both).validate(), InvalidInput);
}

TEST_CASE("experiment stage errors name the stage") {
    ExperimentConfig config;
    config.manifest_path = "/nonexistent/manifest.tsv";
    try {
        run_experiment(config);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).rfind("corpus:", 0) == 0);
    }
}

namespace {

ExperimentConfig small_experiment(const std::string& output_dir) {
    std::istringstream in(
        "synthetic.n_documents = 90\n"
        "synthetic.date_lo = 1100\n"
        "synthetic.date_hi = 1300\n"
        "synthetic.vocab_size = 400\n"
        "synthetic.drift_rate = 2\n"
        "synthetic.length_lo = 40\n"
        "synthetic.length_hi = 80\n"
        "seed = 29\n"
        "orders = 2\n"
        "train_fraction = 0.8\n"
        "validation_fraction = 0.1\n"
        "test_fraction = 0.1\n"
        "grid.h_count = 5\n"
        "grid.m = 5,10\n"
        "heatmap.group_size = 3\n");
    ExperimentConfig config = ExperimentConfig::parse(in);
    config.output_dir = output_dir;
    return config;
}

}  // namespace

TEST_CASE("experiment reruns are byte-identical across thread counts") {
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "shingledate_test_runs";
    std::filesystem::remove_all(base);

    ExperimentConfig first = small_experiment((base / "run1").string());
    first.threads = 1;
    ExperimentConfig second = small_experiment((base / "run2").string());
    second.threads = 4;

    const ExperimentResult r1 = run_experiment(first);
    const ExperimentResult r2 = run_experiment(second);
    REQUIRE(r1.artifacts == r2.artifacts);
    CHECK(r1.artifacts == std::vector<std::string>{
                              "summary.tsv", "loss_surface.tsv",
                              "validation_report.tsv", "test_report.tsv",
                              "scatter.tsv", "heatmap.pgm",
                              "synthetic_manifest.tsv"});
    for (const std::string& name : r1.artifacts)
        CHECK(slurp(base / "run1" / name) == slurp(base / "run2" / name));

    std::filesystem::remove_all(base);
}

TEST_CASE("zero test fraction leaves the summary without a test section") {
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "shingledate_test_notest";
    std::filesystem::remove_all(base);

    ExperimentConfig config = small_experiment(base.string());
    config.split.test_fraction = 0.0;
    config.split.validation_fraction = 0.2;
    config.split.train_fraction = 0.8;
    const ExperimentResult result = run_experiment(config);
    CHECK_FALSE(result.test.has_value());

    const std::string summary = slurp(base / "summary.tsv");
    CHECK(summary.find("test_mae") == std::string::npos);
    CHECK(summary.find("validation_mae") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(base / "test_report.tsv"));

    std::filesystem::remove_all(base);
}

TEST_CASE("undated documents get predictions") {
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "shingledate_test_undated";
    std::filesystem::remove_all(base);
    std::filesystem::create_directories(base);

    // manifest with dated training material and two undated documents
    SyntheticSpec spec;
    spec.n_documents = 40;
    spec.date_lo = 1100;
    spec.date_hi = 1200;
    spec.vocab_size = 150;
    spec.drift_rate = 1.0;
    spec.length_lo = 30;
    spec.length_hi = 50;
    spec.seed = 4;
    Corpus corpus = generate_synthetic(spec);
    Document u1;
    u1.id = "zz_undated1";
    u1.tokens = corpus.documents()[5].tokens;
    corpus.add(std::move(u1));
    Document u2;
    u2.id = "zz_undated2";
    u2.tokens = corpus.documents()[30].tokens;
    corpus.add(std::move(u2));

    const auto manifest_path = base / "manifest.tsv";
    {
        std::ofstream os(manifest_path);
        write_manifest(os, corpus);
    }

    ExperimentConfig config;
    config.manifest_path = manifest_path.string();
    config.orders = {2};
    config.split.train_fraction = 1.0;
    config.split.validation_fraction = 0.0;
    config.split.test_fraction = 0.0;
    config.grid_h_count = 3;
    config.grid_m = {5};
    config.output_dir = (base / "out").string();

    const ExperimentResult result = run_experiment(config);
    CHECK(result.n_undated == 2);
    const std::string predictions =
        slurp(base / "out" / "undated_predictions.tsv");
    CHECK(predictions.find("zz_undated1\t") != std::string::npos);
    CHECK(predictions.find("zz_undated2\t") != std::string::npos);

    std::filesystem::remove_all(base);
}

TEST_CASE("edge documents are biased toward the center") {
    // near the ends of the date range candidate neighbors exist on one side
    // only, so estimates get pulled inward
    SyntheticSpec spec;
    spec.n_documents = 500;
    spec.date_lo = 1100;
    spec.date_hi = 1399;
    spec.vocab_size = 900;
    spec.drift_rate = 6.0;
    spec.length_lo = 80;
    spec.length_hi = 160;
    spec.seed = 61;
    const Corpus corpus = generate_synthetic(spec);
    SplitSpec split_spec;
    split_spec.train_fraction = 0.75;
    split_spec.validation_fraction = 0.25;
    split_spec.test_fraction = 0.0;
    split_spec.seed = 8;
    const SplitResult split = split_corpus(corpus, split_spec);
    const DistanceStore store =
        DistanceStore::build(split.validation, split.train, {2});

    KernelConfig cfg;
    cfg.bandwidths = {0.05};
    cfg.m = 20;
    double earliest = 0.0;
    double latest = 0.0;
    int n_early = 0;
    int n_late = 0;
    for (const Document& doc : split.validation.documents()) {
        const int year = *doc.date;
        if (year > spec.date_lo + 20 && year < spec.date_hi - 20) continue;
        const CandidatePool pool = candidate_pool(doc.id, cfg.m, store);
        const Estimate est =
            impute_date(doc.id, pool, split.train, store, cfg);
        const double signed_error = est.value - double(year);
        if (year <= spec.date_lo + 20) {
            earliest += signed_error;
            ++n_early;
        } else {
            latest += signed_error;
            ++n_late;
        }
    }
    REQUIRE(n_early >= 4);
    REQUIRE(n_late >= 4);
    CHECK(earliest / n_early > 0.0);  // pulled later
    CHECK(latest / n_late < 0.0);     // pulled earlier
}
