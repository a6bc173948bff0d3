#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "shingledate/estimator.hpp"

namespace shingledate {

struct EvalRow {
    std::string id;
    int true_year = 0;
    double estimated = 0.0;
    double absolute_error = 0.0;
    int effective_neighbors = 0;
    bool fell_back = false;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // sorted by id
    double mae = 0.0;
    double baseline_mae = 0.0;  // constant train-mean predictor
};

// Per-document absolute errors and their mean, plus the baseline error of
// predicting `train_mean` everywhere. Prediction and truth key sets must
// match exactly.
EvalReport evaluate(const std::map<std::string, Estimate>& predictions,
                    const std::map<std::string, int>& truth,
                    double train_mean);

// TSV: id, true year, estimate, absolute error, effective neighbors,
// fell_back flag.
void write_eval_tsv(std::ostream& os, const EvalReport& report);

// Scatter data for the true-vs-estimated plot: TSV of true year, estimated
// year, and the true year again for the zero-error line, sorted by true
// year.
void write_scatter_tsv(std::ostream& os, const EvalReport& report);

}  // namespace shingledate
