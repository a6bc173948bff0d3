#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shingledate/corpus.hpp"
#include "shingledate/estimator.hpp"
#include "shingledate/evaluate.hpp"
#include "shingledate/heatmap.hpp"
#include "shingledate/synthetic.hpp"
#include "shingledate/tuner.hpp"

namespace shingledate {

enum class EstimatorKind { weighted_mean, local_median, huber };

// Flat key = value experiment configuration; see the README for the key
// list. Exactly one of `manifest` or the synthetic.* block selects the
// corpus.
struct ExperimentConfig {
    std::string manifest_path;
    std::optional<SyntheticSpec> synthetic;

    std::vector<int> orders = {2};
    SplitSpec split;

    Kernel kernel = Kernel::exponential;
    EstimatorKind estimator = EstimatorKind::weighted_mean;
    double huber_c = 1.345;

    double grid_h_min = 1e-4;
    double grid_h_max = 1.0;
    int grid_h_count = 25;
    bool grid_include_inf = true;
    std::vector<int> grid_m = {5, 10, 20, 50};

    int heatmap_order = 0;  // 0 selects the first configured order
    HeatmapParams heatmap;

    bool dump_resemblances = false;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::string output_dir = ".";

    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig load(const std::string& path);

    BandwidthGrid make_grid() const;
    void validate() const;
};

struct SetSummary {
    std::size_t count = 0;
    double effective_m_mean = 0.0;
    int effective_m_min = 0;
    int effective_m_max = 0;
    std::size_t fallbacks = 0;
};

struct ExperimentResult {
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_test = 0;
    std::size_t n_undated = 0;
    TuneResult tuning;
    std::optional<EvalReport> validation;
    std::optional<EvalReport> test;
    SetSummary validation_summary;
    SetSummary test_summary;
    SetSummary undated_summary;
    std::vector<std::string> artifacts;  // file names written to output_dir
};

// Runs the full pipeline: corpus -> split -> stores -> tune -> impute ->
// evaluate -> render, writing every artifact into output_dir. A stage
// failure aborts with the stage name prefixed to the cause. Reruns with the
// same config produce byte-identical artifacts regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace shingledate
