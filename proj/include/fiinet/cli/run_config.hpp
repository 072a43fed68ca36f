#pragma once

#include <filesystem>
#include <string>

#include "fiinet/keyvalue.hpp"
#include "fiinet/network/variant.hpp"
#include "fiinet/training/trainer.hpp"

namespace fiinet::cli {

enum class Precision { Float32, Float64 };

/// Everything one experiment needs. Relative paths in a config file are
/// resolved against the directory holding that file.
struct RunConfig {
    std::filesystem::path data_dir;    // output of `fiinet prepare`
    std::filesystem::path output_dir;  // checkpoints, logs and reports
    network::ModelConfig model;
    training::TrainConfig train;
    Precision precision = Precision::Float32;

    double gradcheck_eps = 1e-3;
    double gradcheck_threshold = 1e-4;
    std::size_t gradcheck_samples = 16;    // examples in the probe batch
    std::size_t gradcheck_coords = 0;      // per parameter group, 0 = all
};

/// Parses the flat key=value format. Unknown keys and invalid values are
/// config errors. `seed` drives both the model and the trainer.
RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir, const std::string& source);
RunConfig read_run_config(const std::filesystem::path& path);

/// Fails with an io error unless data_dir holds a prepared dataset.
void validate_paths(const RunConfig& config);

}  // namespace fiinet::cli
