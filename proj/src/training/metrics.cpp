#include "fiinet/training/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "fiinet/error.hpp"
#include "fiinet/network/loss.hpp"

namespace fiinet::training {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    require(scores.size() == labels.size(), ErrorCategory::Shape, "auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]]) {
                positive_rank_sum += avg_rank;
                ++positives;
            }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) fail(ErrorCategory::Numeric, "AUC undefined: labels hold a single class");
    const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double logloss(std::span<const double> probs, std::span<const int> labels) {
    return network::bce_loss(probs, labels);
}

void write_metric_header(std::ostream& os) { os << "epoch\tsplit\tauc\tlogloss\twall_time\n"; }

void write_metric_record(std::ostream& os, const MetricRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu\t%s\t%.6f\t%.6f\t%.3f\n", r.epoch, r.split.c_str(), r.auc, r.logloss,
                  r.wall_time);
    os << buf;
}

}  // namespace fiinet::training
