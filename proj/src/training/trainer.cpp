#include "fiinet/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "fiinet/engine/rng.hpp"
#include "fiinet/error.hpp"

namespace fiinet::training {

namespace {

std::vector<int> labels_of(std::span<const ingest::EncodedExample> examples) {
    std::vector<int> y(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) y[i] = examples[i].label;
    return y;
}

double auc_or_nan(std::span<const double> scores, std::span<const int> labels) {
    bool pos = false, neg = false;
    for (int y : labels) (y ? pos : neg) = true;
    if (!pos || !neg) return std::numeric_limits<double>::quiet_NaN();
    return roc_auc(scores, labels);
}

double selection_score(const EvalResult& r) { return std::isnan(r.auc) ? -r.logloss : r.auc; }

}  // namespace

template <typename Real>
EvalResult evaluate(const network::Model<Real>& model, std::span<const ingest::EncodedExample> examples) {
    require(!examples.empty(), ErrorCategory::Input, "evaluate: empty dataset");
    const auto probs = model.predict(examples);
    std::vector<double> p(probs.begin(), probs.end());
    const auto y = labels_of(examples);
    return {auc_or_nan(p, y), logloss(p, y), examples.size()};
}

template <typename Real>
TrainResult train(network::Model<Real>& model, std::span<const ingest::EncodedExample> train_set,
                  std::span<const ingest::EncodedExample> valid_set, const TrainConfig& config,
                  std::ostream* metric_log, const EpochCallback& on_epoch) {
    require(!train_set.empty(), ErrorCategory::Input, "train: empty training set");
    require(!valid_set.empty(), ErrorCategory::Input, "train: empty validation set");
    require(config.batch_size >= 1, ErrorCategory::Config, "batch_size must be >= 1");
    require(config.max_epochs >= 1, ErrorCategory::Config, "max_epochs must be >= 1");
    require(config.adam.learning_rate > 0.0, ErrorCategory::Config, "learning_rate must be > 0");
    require(config.adam.weight_decay >= 0.0, ErrorCategory::Config, "weight_decay must be >= 0");

    auto& params = model.parameters();
    engine::GradientStore<Real> grads(params);
    AdamState<Real> state(params);
    engine::ParameterStore<Real> best = params;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        if (config.deterministic) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    if (metric_log) write_metric_header(*metric_log);
    TrainResult result;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    engine::Rng dropout_rng(engine::derive_seed(config.seed, "dropout"));
    std::vector<ingest::EncodedExample> batch;
    std::vector<Real> batch_probs;
    std::vector<double> train_probs(train_set.size());

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        engine::Rng shuffle_rng(engine::derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        engine::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        std::vector<int> train_labels(train_set.size());
        for (std::size_t s = 0; s < order.size(); s += config.batch_size) {
            const std::size_t e = std::min(order.size(), s + config.batch_size);
            batch.clear();
            for (std::size_t i = s; i < e; ++i) batch.push_back(train_set[order[i]]);
            grads.zero();
            const Real loss = model.loss_and_gradient(batch, grads, true, dropout_rng, &batch_probs);
            if (!std::isfinite(static_cast<double>(loss)))
                fail(ErrorCategory::Numeric, "training diverged: non-finite loss in epoch " + std::to_string(epoch));
            adam_step(params, grads, state, config.adam);
            loss_sum += static_cast<double>(loss);
            ++batches;
            for (std::size_t i = s; i < e; ++i) {
                train_probs[i] = static_cast<double>(batch_probs[i - s]);
                train_labels[i] = batch[i - s].label;
            }
        }

        MetricRecord train_rec{epoch, "train", auc_or_nan(train_probs, train_labels),
                               loss_sum / static_cast<double>(batches), elapsed()};
        const EvalResult valid = evaluate(model, valid_set);
        MetricRecord valid_rec{epoch, "valid", valid.auc, valid.logloss, elapsed()};
        if (metric_log) {
            write_metric_record(*metric_log, train_rec);
            write_metric_record(*metric_log, valid_rec);
            metric_log->flush();
        }
        result.history.push_back(train_rec);
        result.history.push_back(valid_rec);
        result.epochs_run = epoch;
        if (on_epoch) on_epoch(train_rec, valid_rec);

        const double score = selection_score(valid);
        if (score > best_score) {
            best_score = score;
            result.best_epoch = epoch;
            result.best_valid = valid;
            best.assign_values(params);
        }
        if (epoch - result.best_epoch >= config.patience) break;
    }
    params.assign_values(best);
    return result;
}

template EvalResult evaluate<float>(const network::Model<float>&, std::span<const ingest::EncodedExample>);
template EvalResult evaluate<double>(const network::Model<double>&, std::span<const ingest::EncodedExample>);
template TrainResult train<float>(network::Model<float>&, std::span<const ingest::EncodedExample>,
                                  std::span<const ingest::EncodedExample>, const TrainConfig&, std::ostream*,
                                  const EpochCallback&);
template TrainResult train<double>(network::Model<double>&, std::span<const ingest::EncodedExample>,
                                   std::span<const ingest::EncodedExample>, const TrainConfig&, std::ostream*,
                                   const EpochCallback&);

}  // namespace fiinet::training
