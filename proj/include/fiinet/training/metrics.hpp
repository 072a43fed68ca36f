#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fiinet::training {

/// Rank-based ROC AUC (Mann-Whitney), ties share their average rank.
/// Throws "AUC undefined" when the labels hold a single class.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7].
double logloss(std::span<const double> probs, std::span<const int> labels);

struct MetricRecord {
    std::size_t epoch = 0;
    std::string split;
    double auc = 0.0;   // NaN when undefined
    double logloss = 0.0;
    double wall_time = 0.0;  // seconds since training started
};

/// TSV with header "epoch split auc logloss wall_time".
void write_metric_header(std::ostream& os);
void write_metric_record(std::ostream& os, const MetricRecord& r);

}  // namespace fiinet::training
