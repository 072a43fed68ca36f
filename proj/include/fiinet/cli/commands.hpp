#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fiinet/cli/run_config.hpp"
#include "fiinet/ingest/dataset.hpp"
#include "fiinet/training/trainer.hpp"

namespace fiinet::cli {

namespace fs = std::filesystem;

/// Embedding dimensions swept by default.
inline const std::vector<std::size_t> kDefaultSweepDims{6, 12, 18, 24, 30, 36, 42, 48};
/// Variants trained next to FiiNet by default in an ablation.
inline const std::vector<std::string> kDefaultAblation{"sh", "s", "h"};

struct PrepareArgs {
    fs::path input;
    fs::path schema;
    std::optional<double> threshold;
    fs::path out;
};

struct SynthArgs {
    fs::path out;
    std::size_t rows = 20000;
    std::size_t fields = 6;
    std::size_t vocab = 10;
    std::uint64_t seed = 2023;
};

/// Outcome of training one configuration and scoring its best checkpoint
/// on the test split.
struct ExperimentResult {
    std::string variant;
    std::size_t embedding_dim = 0;
    training::TrainResult train;
    training::EvalResult test;
};

/// Trains `config` on `data` without touching the file system.
ExperimentResult run_experiment(const RunConfig& config, const ingest::PreparedData& data);

// Commands write their report to `out` and files under the configured
// output directory. They return the process exit code; failures throw
// fiinet::Error.
int cmd_prepare(const PrepareArgs& args, std::ostream& out);
int cmd_synth(const SynthArgs& args, std::ostream& out);
int cmd_train(const fs::path& config, std::ostream& out);
int cmd_eval(const fs::path& config, const fs::path& checkpoint, std::ostream& out);
int cmd_ablate(const fs::path& config, const std::vector<std::string>& variants, std::ostream& out);
int cmd_sweep_k(const fs::path& config, const std::vector<std::size_t>& dims, std::ostream& out);
int cmd_export_attention(const fs::path& config, const fs::path& checkpoint, std::ostream& out);
/// Nonzero exit (numeric error) when any group exceeds gradcheck_threshold.
int cmd_gradcheck(const fs::path& config, std::ostream& out);

}  // namespace fiinet::cli
