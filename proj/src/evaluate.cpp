#include "shingledate/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "shingledate/error.hpp"

namespace shingledate {

EvalReport evaluate(const std::map<std::string, Estimate>& predictions,
                    const std::map<std::string, int>& truth,
                    double train_mean) {
    if (predictions.empty() || truth.empty())
        throw InvalidInput("evaluate: empty prediction or truth set");

    std::string missing_predictions;
    std::string missing_truth;
    for (const auto& [id, year] : truth)
        if (!predictions.count(id))
            missing_predictions += (missing_predictions.empty() ? "" : ", ") + id;
    for (const auto& [id, est] : predictions)
        if (!truth.count(id))
            missing_truth += (missing_truth.empty() ? "" : ", ") + id;
    if (!missing_predictions.empty() || !missing_truth.empty())
        throw InvalidInput(
            "evaluate: key mismatch; missing from predictions: [" +
            missing_predictions + "]; missing from truth: [" + missing_truth +
            "]");

    EvalReport report;
    report.rows.reserve(truth.size());
    double error_sum = 0.0;
    double baseline_sum = 0.0;
    for (const auto& [id, year] : truth) {  // std::map: already id-sorted
        const Estimate& est = predictions.at(id);
        EvalRow row;
        row.id = id;
        row.true_year = year;
        row.estimated = est.value;
        row.absolute_error = std::abs(static_cast<double>(year) - est.value);
        row.effective_neighbors = est.effective_neighbors;
        row.fell_back = est.fell_back;
        error_sum += row.absolute_error;
        baseline_sum += std::abs(static_cast<double>(year) - train_mean);
        report.rows.push_back(std::move(row));
    }
    report.mae = error_sum / static_cast<double>(report.rows.size());
    report.baseline_mae =
        baseline_sum / static_cast<double>(report.rows.size());
    return report;
}

void write_eval_tsv(std::ostream& os, const EvalReport& report) {
    char estimate[64];
    char error[64];
    for (const EvalRow& row : report.rows) {
        std::snprintf(estimate, sizeof(estimate), "%.4f", row.estimated);
        std::snprintf(error, sizeof(error), "%.4f", row.absolute_error);
        os << row.id << '\t' << row.true_year << '\t' << estimate << '\t'
           << error << '\t' << row.effective_neighbors << '\t'
           << (row.fell_back ? 1 : 0) << '\n';
    }
}

void write_scatter_tsv(std::ostream& os, const EvalReport& report) {
    if (report.rows.empty()) return;
    std::vector<const EvalRow*> rows;
    rows.reserve(report.rows.size());
    for (const EvalRow& row : report.rows) rows.push_back(&row);
    std::sort(rows.begin(), rows.end(),
              [](const EvalRow* a, const EvalRow* b) {
                  if (a->true_year != b->true_year)
                      return a->true_year < b->true_year;
                  return a->id < b->id;
              });
    char estimate[64];
    for (const EvalRow* row : rows) {
        std::snprintf(estimate, sizeof(estimate), "%.1f", row->estimated);
        os << row->true_year << '\t' << estimate << '\t' << row->true_year
           << '\n';
    }
}

}  // namespace shingledate
