#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fiinet/ingest/table.hpp"
#include "fiinet/ingest/vocabulary.hpp"

namespace fiinet::ingest {

struct EncodedExample {
    std::vector<std::int32_t> indices;  // one vocabulary index per field
    int label = 0;

    bool operator==(const EncodedExample&) const = default;
};

struct DatasetSplit {
    std::vector<EncodedExample> train;
    std::vector<EncodedExample> valid;
    std::vector<EncodedExample> test;
    std::uint64_t split_seed = 0;
};

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultRatios{0.8, 0.1, 0.1};

/// 1 iff score > threshold. Non-finite scores are rejected.
int binarize_label(double raw_score, double threshold);

/// Seeded shuffle, then train/valid/test sizes round(n * ratio) for the first
/// two and the remainder for test.
DatasetSplit split_dataset(std::vector<EncodedExample> examples, const SplitRatios& ratios, std::uint64_t seed);

/// Quantile bucketizer for numeric attributes. Cells that do not parse as a
/// finite number fall into the "NA" bucket.
class QuantileBucketizer {
public:
    static QuantileBucketizer fit(std::span<const std::string> cells, std::size_t bins);
    std::string bucket(const std::string& cell) const;
    const std::vector<double>& cut_points() const noexcept { return cuts_; }

private:
    std::vector<double> cuts_;
};

/// Column roles and labeling rules for one raw table.
struct SchemaConfig {
    std::string label_column;
    std::vector<std::string> field_columns;
    std::vector<std::string> numeric_columns;  // subset of field_columns to bucketize
    std::size_t numeric_bins = 10;
    char delimiter = '\t';
    double threshold = 0.0;
    SplitRatios ratios = kDefaultRatios;
    std::uint64_t seed = 2023;
};

/// Reads a flat key=value schema file ('#' comments). Unknown keys are errors.
SchemaConfig read_schema_config(const std::filesystem::path& path);

struct PreparedData {
    Vocabulary vocab;
    DatasetSplit split;
};

/// Bucketizes numeric columns, builds the vocabulary over the whole table,
/// binarizes labels and splits. Missing columns are reported together.
PreparedData prepare_dataset(const RawTable& table, const SchemaConfig& schema);

/// Encoded split file: one example per line, label then f space-separated indices.
void write_examples(std::ostream& os, std::span<const EncodedExample> examples);
std::vector<EncodedExample> read_examples(std::istream& is, const Vocabulary& vocab);

/// Directory layout: vocab.tsv, train.txt, valid.txt, test.txt.
void save_prepared(const std::filesystem::path& dir, const PreparedData& data);
PreparedData load_prepared(const std::filesystem::path& dir);

/// Throws if any index is outside its field's cardinality.
void validate_example(const EncodedExample& ex, const std::vector<FieldSchema>& schema);

}  // namespace fiinet::ingest
