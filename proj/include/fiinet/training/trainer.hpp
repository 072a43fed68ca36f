#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fiinet/ingest/dataset.hpp"
#include "fiinet/network/model.hpp"
#include "fiinet/training/adam.hpp"
#include "fiinet/training/metrics.hpp"

namespace fiinet::training {

struct TrainConfig {
    std::size_t batch_size = 256;
    AdamConfig adam;
    std::size_t max_epochs = 500;
    /// Stop once this many epochs pass without a better validation score.
    /// 0 runs exactly one epoch.
    std::size_t patience = 5;
    std::uint64_t seed = 2023;
    /// Records wall_time as 0 so metric logs of repeated runs are byte-identical.
    bool deterministic = false;
};

struct EvalResult {
    double auc = 0.0;  // NaN when the labels hold a single class
    double logloss = 0.0;
    std::size_t count = 0;
};

struct TrainResult {
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    EvalResult best_valid;
    std::vector<MetricRecord> history;
};

/// Called after every epoch with the train and valid records.
using EpochCallback = std::function<void(const MetricRecord& train, const MetricRecord& valid)>;

/// AUC and logloss with dropout off.
template <typename Real>
EvalResult evaluate(const network::Model<Real>& model, std::span<const ingest::EncodedExample> examples);

/// Minibatch Adam over `train`, model selection on validation AUC (negative
/// logloss when AUC is undefined). The best parameters are restored before
/// returning. `metric_log` may be null.
template <typename Real>
TrainResult train(network::Model<Real>& model, std::span<const ingest::EncodedExample> train_set,
                  std::span<const ingest::EncodedExample> valid_set, const TrainConfig& config,
                  std::ostream* metric_log = nullptr, const EpochCallback& on_epoch = {});

}  // namespace fiinet::training
