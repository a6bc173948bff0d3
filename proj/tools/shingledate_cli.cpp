// Command-line front end: shingle, resemble, tune, impute, evaluate,
// heatmap, synth, run. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "shingledate/error.hpp"
#include "shingledate/estimator.hpp"
#include "shingledate/evaluate.hpp"
#include "shingledate/experiment.hpp"
#include "shingledate/heatmap.hpp"
#include "shingledate/neighbors.hpp"
#include "shingledate/shingle.hpp"
#include "shingledate/synthetic.hpp"
#include "shingledate/tuner.hpp"

namespace {

using namespace shingledate;

// options shared by every subcommand; --seed and --threads are ignored by
// subcommands that have no randomness or parallel stage
struct CommonOptions {
    std::uint64_t seed = 0;
    std::vector<int> orders = {2};
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--seed", common.seed, "Random seed");
    cmd->add_option("--orders", common.orders,
                    "Shingle orders (comma separated)")
        ->delimiter(',');
    cmd->add_option("--threads", common.threads,
                    "Worker threads (0 = hardware)");
}

// "-" selects stdout
class OutputFile {
public:
    explicit OutputFile(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw InvalidInput("cannot write: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        if (file_.is_open()) {
            file_.flush();
            if (!file_) throw Error("write failed");
        } else {
            std::cout.flush();
        }
    }

private:
    std::ofstream file_;
};

Kernel parse_kernel(const std::string& name) {
    if (name == "exponential") return Kernel::exponential;
    if (name == "boxcar") return Kernel::boxcar;
    throw InvalidInput("unknown kernel: " + name);
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "mean") return EstimatorKind::weighted_mean;
    if (name == "median") return EstimatorKind::local_median;
    if (name == "huber") return EstimatorKind::huber;
    throw InvalidInput("unknown estimator: " + name);
}

struct ShingleArgs {
    CommonOptions common;
    std::string manifest;
    std::string output = "-";
};

int run_shingle(const ShingleArgs& args) {
    const Corpus corpus = load_manifest(args.manifest);
    OutputFile out(args.output);
    for (const std::string& id : corpus.sorted_ids()) {
        const Document& doc = corpus.at(id);
        for (const int k : args.common.orders) {
            if (doc.tokens.size() < static_cast<std::size_t>(k)) {
                std::cerr << "skipping " << id << " at order " << k
                          << ": too short\n";
                continue;
            }
            out.stream() << id << '\t' << k << '\t'
                         << extract_shingles(doc.tokens, k).count() << '\n';
        }
    }
    out.finish();
    return 0;
}

struct ResembleArgs {
    CommonOptions common;
    std::string manifest;
    std::string targets;
    std::string output = "-";
};

int run_resemble(const ResembleArgs& args) {
    const Corpus corpus = load_manifest(args.manifest);
    OutputFile out(args.output);
    if (args.targets.empty()) {
        write_resemblance_tsv(out.stream(), corpus, args.common.orders,
                              args.common.threads);
    } else {
        const Corpus targets = load_manifest(args.targets);
        write_resemblance_tsv(out.stream(), targets, corpus,
                              args.common.orders, args.common.threads);
    }
    out.finish();
    return 0;
}

struct SynthArgs {
    CommonOptions common;
    SyntheticSpec spec;
    std::string output = "-";
};

int run_synth(SynthArgs& args) {
    args.spec.seed = args.common.seed;
    const Corpus corpus = generate_synthetic(args.spec);
    OutputFile out(args.output);
    write_manifest(out.stream(), corpus);
    out.finish();
    return 0;
}

struct GridArgs {
    double h_min = 1e-4;
    double h_max = 1.0;
    int h_count = 25;
    bool no_inf = false;
    std::vector<int> m = {5, 10, 20, 50};
};

BandwidthGrid make_grid(const GridArgs& grid, std::size_t n_orders) {
    ExperimentConfig config;
    config.orders.assign(n_orders, 1);
    config.grid_h_min = grid.h_min;
    config.grid_h_max = grid.h_max;
    config.grid_h_count = grid.h_count;
    config.grid_include_inf = !grid.no_inf;
    config.grid_m = grid.m;
    return config.make_grid();
}

struct TuneArgs {
    CommonOptions common;
    std::string train;
    std::string kernel = "exponential";
    GridArgs grid;
    std::string surface;
};

int run_tune(const TuneArgs& args) {
    const Corpus train = load_manifest(args.train);
    const DistanceStore store = DistanceStore::build(
        train, train, args.common.orders, args.common.threads);
    const TuneResult result =
        tune(train, make_grid(args.grid, args.common.orders.size()), store,
             parse_kernel(args.kernel), args.common.threads);

    std::string bandwidths;
    char buffer[64];
    for (std::size_t i = 0; i < result.best_bandwidths.size(); ++i) {
        if (i) bandwidths += ',';
        if (std::isinf(result.best_bandwidths[i])) {
            bandwidths += "inf";
        } else {
            std::snprintf(buffer, sizeof(buffer), "%.10g",
                          result.best_bandwidths[i]);
            bandwidths += buffer;
        }
    }
    std::snprintf(buffer, sizeof(buffer), "%.10g", result.cv_loss);
    std::cout << "best_m\t" << result.best_m << "\nbest_bandwidths\t"
              << bandwidths << "\ncv_loss\t" << buffer << '\n';

    if (!args.surface.empty()) {
        OutputFile out(args.surface);
        write_loss_surface(out.stream(), result);
        out.finish();
    }
    return 0;
}

struct ImputeArgs {
    CommonOptions common;
    std::string train;
    std::string targets;
    std::vector<std::string> bandwidths;
    int m = 5;
    std::string kernel = "exponential";
    std::string estimator = "mean";
    double huber_c = 1.345;
    std::string output = "-";
};

std::vector<double> parse_bandwidths(const std::vector<std::string>& text) {
    std::vector<double> out;
    for (const std::string& item : text) {
        if (item == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("bad bandwidth: " + item);
        }
    }
    return out;
}

int run_impute(const ImputeArgs& args) {
    const Corpus train = load_manifest(args.train);
    const Corpus targets = load_manifest(args.targets);
    const DistanceStore store = DistanceStore::build(
        targets, train, args.common.orders, args.common.threads);

    KernelConfig cfg;
    cfg.kernel = parse_kernel(args.kernel);
    cfg.bandwidths = parse_bandwidths(args.bandwidths);
    cfg.m = args.m;
    if (cfg.bandwidths.size() != args.common.orders.size())
        throw InvalidInput("need one bandwidth per order");
    const EstimatorKind kind = parse_estimator(args.estimator);

    OutputFile out(args.output);
    char value[64];
    for (const std::string& id : targets.sorted_ids()) {
        const CandidatePool pool = candidate_pool(id, cfg.m, store);
        Estimate est;
        if (kind == EstimatorKind::weighted_mean) {
            est = impute_date(id, pool, train, store, cfg);
        } else {
            RobustSpec spec;
            spec.loss = kind == EstimatorKind::huber ? RobustLoss::huber
                                                     : RobustLoss::absolute;
            spec.huber_c = args.huber_c;
            est = robust_impute(id, pool, train, store, cfg, spec);
        }
        std::snprintf(value, sizeof(value), "%.4f", est.value);
        out.stream() << id << '\t' << value << '\t'
                     << est.effective_neighbors << '\t'
                     << (est.fell_back ? 1 : 0) << '\n';
    }
    out.finish();
    return 0;
}

struct EvaluateArgs {
    CommonOptions common;
    std::string predictions;
    std::string truth;
    std::string train;
    double train_mean = std::numeric_limits<double>::quiet_NaN();
    std::string report;
    std::string scatter;
};

std::map<std::string, Estimate> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open predictions: " + path);
    std::map<std::string, Estimate> predictions;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream stream(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(stream, field, '\t')) fields.push_back(field);
        if (fields.size() < 2)
            throw InvalidInput("predictions line " + std::to_string(lineno) +
                               ": expected id<TAB>estimate");
        Estimate est;
        try {
            est.value = std::stod(fields[1]);
            if (fields.size() > 2) est.effective_neighbors = std::stoi(fields[2]);
            if (fields.size() > 3) est.fell_back = fields[3] == "1";
        } catch (const std::exception&) {
            throw InvalidInput("predictions line " + std::to_string(lineno) +
                               ": malformed");
        }
        if (!predictions.emplace(fields[0], est).second)
            throw InvalidInput("duplicate prediction for " + fields[0]);
    }
    return predictions;
}

int run_evaluate(const EvaluateArgs& args) {
    const auto predictions = load_predictions(args.predictions);
    const Corpus truth_corpus = load_manifest(args.truth);
    std::map<std::string, int> truth;
    for (const Document& doc : truth_corpus.documents())
        if (doc.dated()) truth[doc.id] = *doc.date;

    double train_mean = args.train_mean;
    if (std::isnan(train_mean)) {
        if (args.train.empty())
            throw InvalidInput("need --train or --train-mean for the baseline");
        train_mean = load_manifest(args.train).mean_date();
    }

    const EvalReport report = evaluate(predictions, truth, train_mean);
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4f", report.mae);
    std::cout << "mae\t" << buffer << '\n';
    std::snprintf(buffer, sizeof(buffer), "%.4f", report.baseline_mae);
    std::cout << "baseline_mae\t" << buffer << '\n';

    if (!args.report.empty()) {
        OutputFile out(args.report);
        write_eval_tsv(out.stream(), report);
        out.finish();
    }
    if (!args.scatter.empty()) {
        OutputFile out(args.scatter);
        write_scatter_tsv(out.stream(), report);
        out.finish();
    }
    return 0;
}

struct HeatmapArgs {
    CommonOptions common;
    std::string train;
    std::string validation;
    int order = 2;
    HeatmapParams params;
    std::string output;
};

int run_heatmap(const HeatmapArgs& args) {
    const Corpus train = load_manifest(args.train);
    const Corpus validation = load_manifest(args.validation);
    const DistanceStore store = DistanceStore::build(
        validation, train, {args.order}, args.common.threads);
    const HeatmapImage image = render_heatmap(
        validation, train, store, args.order, args.params,
        args.common.threads);
    OutputFile out(args.output);
    write_pgm(out.stream(), image);
    out.finish();
    std::cerr << "heatmap " << image.rows << " x " << image.cols << '\n';
    return 0;
}

struct RunArgs {
    CommonOptions common;
    std::string config;
    std::string output_dir;
    bool seed_given = false;
    bool threads_given = false;
    bool orders_given = false;
};

int run_run(const RunArgs& args) {
    ExperimentConfig config = ExperimentConfig::load(args.config);
    if (args.seed_given) {
        config.split.seed = args.common.seed;
        if (config.synthetic) config.synthetic->seed = args.common.seed;
    }
    if (args.threads_given) config.threads = args.common.threads;
    if (args.orders_given) config.orders = args.common.orders;
    if (!args.output_dir.empty()) config.output_dir = args.output_dir;

    const ExperimentResult result = run_experiment(config);
    std::cout << "train/validation/test: " << result.n_train << '/'
              << result.n_validation << '/' << result.n_test << '\n';
    std::cout << "best m: " << result.tuning.best_m << '\n';
    if (result.validation) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.4f", result.validation->mae);
        std::cout << "validation mae: " << buffer << '\n';
    }
    if (result.test) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.4f", result.test->mae);
        std::cout << "test mae: " << buffer << '\n';
    }
    for (const std::string& name : result.artifacts)
        std::cout << "wrote " << name << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Date documents by kernel smoothing over shingle-resemblance "
                 "distances"};
    app.require_subcommand(1);

    ShingleArgs shingle_args;
    auto* shingle_cmd =
        app.add_subcommand("shingle", "Count distinct shingles per document");
    add_common(shingle_cmd, shingle_args.common);
    shingle_cmd->add_option("--manifest", shingle_args.manifest)->required();
    shingle_cmd->add_option("--output", shingle_args.output);

    ResembleArgs resemble_args;
    auto* resemble_cmd = app.add_subcommand(
        "resemble", "All-pairs resemblance dump (sparse TSV)");
    add_common(resemble_cmd, resemble_args.common);
    resemble_cmd->add_option("--manifest", resemble_args.manifest,
                             "Candidate (or only) corpus")
        ->required();
    resemble_cmd->add_option("--targets", resemble_args.targets,
                             "Optional target corpus for cross pairs");
    resemble_cmd->add_option("--output", resemble_args.output);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a drifting-vocabulary synthetic corpus");
    add_common(synth_cmd, synth_args.common);
    synth_cmd->add_option("--n", synth_args.spec.n_documents)->required();
    synth_cmd->add_option("--date-lo", synth_args.spec.date_lo)->required();
    synth_cmd->add_option("--date-hi", synth_args.spec.date_hi)->required();
    synth_cmd->add_option("--vocab", synth_args.spec.vocab_size)->required();
    synth_cmd->add_option("--drift", synth_args.spec.drift_rate)->required();
    synth_cmd->add_option("--length-lo", synth_args.spec.length_lo)
        ->required();
    synth_cmd->add_option("--length-hi", synth_args.spec.length_hi)
        ->required();
    synth_cmd->add_option("--zipf", synth_args.spec.zipf_exponent);
    synth_cmd->add_option("--jitter", synth_args.spec.date_jitter,
                          "Years of per-document vocabulary-window noise");
    synth_cmd->add_option("--output", synth_args.output);

    TuneArgs tune_args;
    auto* tune_cmd = app.add_subcommand(
        "tune", "Cross-validate (m, bandwidths) on a dated corpus");
    add_common(tune_cmd, tune_args.common);
    tune_cmd->add_option("--train", tune_args.train)->required();
    tune_cmd->add_option("--kernel", tune_args.kernel);
    tune_cmd->add_option("--h-min", tune_args.grid.h_min);
    tune_cmd->add_option("--h-max", tune_args.grid.h_max);
    tune_cmd->add_option("--h-count", tune_args.grid.h_count);
    tune_cmd->add_flag("--no-inf", tune_args.grid.no_inf,
                       "Drop the infinite-bandwidth sentinel");
    tune_cmd->add_option("--m", tune_args.grid.m, "Candidate m values")
        ->delimiter(',');
    tune_cmd->add_option("--surface", tune_args.surface,
                         "Write the full loss surface here");

    ImputeArgs impute_args;
    auto* impute_cmd =
        app.add_subcommand("impute", "Impute dates for target documents");
    add_common(impute_cmd, impute_args.common);
    impute_cmd->add_option("--train", impute_args.train)->required();
    impute_cmd->add_option("--targets", impute_args.targets)->required();
    impute_cmd->add_option("--bandwidths", impute_args.bandwidths,
                           "One per order; 'inf' allowed")
        ->required()
        ->delimiter(',');
    impute_cmd->add_option("--m", impute_args.m);
    impute_cmd->add_option("--kernel", impute_args.kernel);
    impute_cmd->add_option("--estimator", impute_args.estimator,
                           "mean, median or huber");
    impute_cmd->add_option("--huber-c", impute_args.huber_c);
    impute_cmd->add_option("--output", impute_args.output);

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "Score predictions against known dates");
    add_common(evaluate_cmd, evaluate_args.common);
    evaluate_cmd->add_option("--predictions", evaluate_args.predictions)
        ->required();
    evaluate_cmd->add_option("--truth", evaluate_args.truth)->required();
    evaluate_cmd->add_option("--train", evaluate_args.train,
                             "Training manifest for the baseline mean");
    evaluate_cmd->add_option("--train-mean", evaluate_args.train_mean,
                             "Baseline mean year, if already known");
    evaluate_cmd->add_option("--report", evaluate_args.report);
    evaluate_cmd->add_option("--scatter", evaluate_args.scatter);

    HeatmapArgs heatmap_args;
    auto* heatmap_cmd = app.add_subcommand(
        "heatmap", "Render the validation-by-training resemblance image");
    add_common(heatmap_cmd, heatmap_args.common);
    heatmap_cmd->add_option("--train", heatmap_args.train)->required();
    heatmap_cmd->add_option("--validation", heatmap_args.validation)
        ->required();
    heatmap_cmd->add_option("--order", heatmap_args.order);
    heatmap_cmd->add_option("--group-size", heatmap_args.params.group_size);
    heatmap_cmd->add_option("--clip-high", heatmap_args.params.clip_high);
    heatmap_cmd->add_option("--zero-floor", heatmap_args.params.zero_floor);
    heatmap_cmd->add_option("--white-threshold",
                            heatmap_args.params.white_threshold);
    heatmap_cmd->add_option("--output", heatmap_args.output)->required();

    RunArgs run_args;
    auto* run_cmd =
        app.add_subcommand("run", "Run a full experiment from a config file");
    add_common(run_cmd, run_args.common);
    run_cmd->add_option("--config", run_args.config)->required();
    run_cmd->add_option("--output-dir", run_args.output_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    run_args.seed_given = run_cmd->count("--seed") > 0;
    run_args.threads_given = run_cmd->count("--threads") > 0;
    run_args.orders_given = run_cmd->count("--orders") > 0;

    try {
        if (shingle_cmd->parsed()) return run_shingle(shingle_args);
        if (resemble_cmd->parsed()) return run_resemble(resemble_args);
        if (synth_cmd->parsed()) return run_synth(synth_args);
        if (tune_cmd->parsed()) return run_tune(tune_args);
        if (impute_cmd->parsed()) return run_impute(impute_args);
        if (evaluate_cmd->parsed()) return run_evaluate(evaluate_args);
        if (heatmap_cmd->parsed()) return run_heatmap(heatmap_args);
        if (run_cmd->parsed()) return run_run(run_args);
    } catch (const shingledate::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
