#include "fiinet/cli/run_config.hpp"

#include "fiinet/error.hpp"

namespace fiinet::cli {

namespace {

const std::vector<std::string_view> kKeys = {
    "data_dir",       "output_dir",    "variant",      "embedding_dim",     "reduction_ratio",
    "reduced_dim_min", "pooling",      "hidden_sizes", "dropout",           "batch_size",
    "learning_rate",  "weight_decay",  "max_epochs",   "patience",          "seed",
    "deterministic",  "precision",     "gradcheck_eps", "gradcheck_threshold", "gradcheck_samples",
    "gradcheck_coords",
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base_dir, const std::string& source) {
    reject_unknown_keys(kv, kKeys, source);
    RunConfig c;
    auto get = [&](std::string_view key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto positive = [&](std::string_view key, double v) {
        require(v > 0.0, ErrorCategory::Config, std::string(key) + " must be positive");
        return v;
    };

    if (auto v = get("data_dir")) c.data_dir = resolve(base_dir, *v);
    if (auto v = get("output_dir")) c.output_dir = resolve(base_dir, *v);
    if (auto v = get("variant")) c.model.variant = network::parse_variant(*v);
    if (auto v = get("embedding_dim")) c.model.embedding_dim = parse_uint("embedding_dim", *v);
    if (auto v = get("reduction_ratio")) c.model.sk.reduction_ratio = parse_uint("reduction_ratio", *v);
    if (auto v = get("reduced_dim_min")) c.model.sk.min_reduced_dim = parse_uint("reduced_dim_min", *v);
    if (auto v = get("pooling")) {
        if (*v == "mean") c.model.sk.pooling = sk::Pooling::Mean;
        else if (*v == "max") c.model.sk.pooling = sk::Pooling::Max;
        else fail(ErrorCategory::Config, "pooling must be mean or max, got '" + *v + "'");
    }
    if (auto v = get("hidden_sizes")) c.model.hidden_sizes = parse_size_list("hidden_sizes", *v);
    if (auto v = get("dropout")) c.model.dropout = parse_double("dropout", *v);
    if (auto v = get("batch_size")) c.train.batch_size = parse_uint("batch_size", *v);
    if (auto v = get("learning_rate"))
        c.train.adam.learning_rate = positive("learning_rate", parse_double("learning_rate", *v));
    if (auto v = get("weight_decay")) c.train.adam.weight_decay = parse_double("weight_decay", *v);
    if (auto v = get("max_epochs")) c.train.max_epochs = parse_uint("max_epochs", *v);
    if (auto v = get("patience")) c.train.patience = parse_uint("patience", *v);
    if (auto v = get("seed")) c.model.seed = c.train.seed = parse_uint("seed", *v);
    if (auto v = get("deterministic")) c.train.deterministic = parse_bool("deterministic", *v);
    if (auto v = get("precision")) {
        if (*v == "float32" || *v == "32") c.precision = Precision::Float32;
        else if (*v == "float64" || *v == "64") c.precision = Precision::Float64;
        else fail(ErrorCategory::Config, "precision must be float32 or float64, got '" + *v + "'");
    }
    if (auto v = get("gradcheck_eps")) c.gradcheck_eps = positive("gradcheck_eps", parse_double("gradcheck_eps", *v));
    if (auto v = get("gradcheck_threshold"))
        c.gradcheck_threshold = positive("gradcheck_threshold", parse_double("gradcheck_threshold", *v));
    if (auto v = get("gradcheck_samples")) c.gradcheck_samples = parse_uint("gradcheck_samples", *v);
    if (auto v = get("gradcheck_coords")) c.gradcheck_coords = parse_uint("gradcheck_coords", *v);

    require(c.model.embedding_dim >= 1, ErrorCategory::Config, "embedding_dim must be >= 1");
    require(c.model.sk.reduction_ratio >= 1, ErrorCategory::Config, "reduction_ratio must be >= 1");
    require(c.model.dropout >= 0.0 && c.model.dropout < 1.0, ErrorCategory::Config, "dropout must be in [0, 1)");
    require(c.train.batch_size >= 1, ErrorCategory::Config, "batch_size must be >= 1");
    require(c.train.max_epochs >= 1, ErrorCategory::Config, "max_epochs must be >= 1");
    require(c.train.adam.weight_decay >= 0.0, ErrorCategory::Config, "weight_decay must be >= 0");
    require(c.gradcheck_samples >= 1, ErrorCategory::Config, "gradcheck_samples must be >= 1");
    require(!c.data_dir.empty(), ErrorCategory::Config, source + ": data_dir is required");
    if (c.output_dir.empty()) c.output_dir = base_dir / "out";
    return c;
}

RunConfig read_run_config(const std::filesystem::path& path) {
    const auto kv = read_key_values(path);
    return parse_run_config(kv, path.parent_path(), path.string());
}

void validate_paths(const RunConfig& config) {
    for (const char* name : {"vocab.tsv", "train.txt", "valid.txt", "test.txt"})
        if (!std::filesystem::exists(config.data_dir / name))
            fail(ErrorCategory::Io, "prepared data missing: " + (config.data_dir / name).string());
}

}  // namespace fiinet::cli
