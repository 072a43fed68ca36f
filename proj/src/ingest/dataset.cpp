#include "fiinet/ingest/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fiinet/engine/rng.hpp"
#include "fiinet/error.hpp"
#include "fiinet/keyvalue.hpp"

namespace fiinet::ingest {

namespace {

bool parse_number(const std::string& cell, double& out) {
    const std::string s = trim(cell);
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

char parse_delimiter(const std::string& v) {
    if (v == "tab" || v == "\\t") return '\t';
    if (v == "comma") return ',';
    if (v == "semicolon") return ';';
    if (v == "space") return ' ';
    if (v.size() == 1) return v[0];
    fail(ErrorCategory::Config, "delimiter must be tab, comma, semicolon, space or a single character");
}

}  // namespace

int binarize_label(double raw_score, double threshold) {
    if (!std::isfinite(raw_score)) fail(ErrorCategory::Numeric, "label score is not finite");
    return raw_score > threshold ? 1 : 0;
}

DatasetSplit split_dataset(std::vector<EncodedExample> examples, const SplitRatios& ratios, std::uint64_t seed) {
    for (double r : ratios)
        require(r > 0.0, ErrorCategory::Config, "split ratios must be positive");
    const double total = ratios[0] + ratios[1] + ratios[2];
    require(std::abs(total - 1.0) <= 1e-9, ErrorCategory::Config,
            "split ratios must sum to 1, got " + std::to_string(total));
    const std::size_t n = examples.size();
    require(n >= 3, ErrorCategory::Input, "need at least 3 examples to split, got " + std::to_string(n));

    engine::Rng rng(engine::derive_seed(seed, "split"));
    engine::shuffle(examples.begin(), examples.end(), rng);

    auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[0]));
    auto n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[1]));
    n_train = std::min(n_train, n);
    n_valid = std::min(n_valid, n - n_train);

    DatasetSplit out;
    out.split_seed = seed;
    auto it = std::make_move_iterator(examples.begin());
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
    it += static_cast<std::ptrdiff_t>(n_train);
    out.valid.assign(it, it + static_cast<std::ptrdiff_t>(n_valid));
    it += static_cast<std::ptrdiff_t>(n_valid);
    out.test.assign(it, std::make_move_iterator(examples.end()));
    return out;
}

QuantileBucketizer QuantileBucketizer::fit(std::span<const std::string> cells, std::size_t bins) {
    require(bins >= 1, ErrorCategory::Config, "numeric_bins must be at least 1");
    std::vector<double> values;
    values.reserve(cells.size());
    for (const auto& c : cells) {
        double v;
        if (parse_number(c, v)) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    QuantileBucketizer b;
    if (values.empty()) return b;
    for (std::size_t i = 1; i < bins; ++i) {
        const double cut = values[i * values.size() / bins];
        if (b.cuts_.empty() || cut > b.cuts_.back()) b.cuts_.push_back(cut);
    }
    return b;
}

std::string QuantileBucketizer::bucket(const std::string& cell) const {
    double v;
    if (!parse_number(cell, v)) return "NA";
    const auto pos = std::upper_bound(cuts_.begin(), cuts_.end(), v) - cuts_.begin();
    return "q" + std::to_string(pos);
}

SchemaConfig read_schema_config(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(path);
    reject_unknown_keys(kv,
                        {"label_column", "field_columns", "numeric_columns", "numeric_bins", "delimiter", "threshold",
                         "split_ratios", "split_seed"},
                        path.string());
    SchemaConfig s;
    auto need = [&](std::string_view key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) fail(ErrorCategory::Config, path.string() + ": missing key '" + std::string(key) + "'");
        return it->second;
    };
    s.label_column = need("label_column");
    s.field_columns = split_list(need("field_columns"));
    if (auto it = kv.find("numeric_columns"); it != kv.end()) s.numeric_columns = split_list(it->second);
    if (auto it = kv.find("numeric_bins"); it != kv.end()) s.numeric_bins = parse_uint(it->first, it->second);
    if (auto it = kv.find("delimiter"); it != kv.end()) s.delimiter = parse_delimiter(it->second);
    if (auto it = kv.find("threshold"); it != kv.end()) s.threshold = parse_double(it->first, it->second);
    if (auto it = kv.find("split_ratios"); it != kv.end()) {
        auto parts = split_list(it->second);
        require(parts.size() == 3, ErrorCategory::Config, "split_ratios needs three values");
        for (std::size_t i = 0; i < 3; ++i) s.ratios[i] = parse_double(it->first, parts[i]);
    }
    if (auto it = kv.find("split_seed"); it != kv.end()) s.seed = parse_uint(it->first, it->second);
    require(!s.field_columns.empty(), ErrorCategory::Config, "field_columns must list at least one column");
    return s;
}

PreparedData prepare_dataset(const RawTable& table, const SchemaConfig& schema) {
    std::string missing;
    auto locate = [&](const std::string& name) -> std::size_t {
        auto c = table.column(name);
        if (!c) {
            missing += (missing.empty() ? "" : ", ") + name;
            return 0;
        }
        return *c;
    };
    const std::size_t label_col = locate(schema.label_column);
    std::vector<std::size_t> field_cols;
    for (const auto& name : schema.field_columns) field_cols.push_back(locate(name));
    for (const auto& name : schema.numeric_columns) {
        if (std::find(schema.field_columns.begin(), schema.field_columns.end(), name) == schema.field_columns.end())
            fail(ErrorCategory::Config, "numeric column '" + name + "' is not one of field_columns");
    }
    if (!missing.empty()) fail(ErrorCategory::Input, "missing columns: " + missing);
    if (table.rows.empty()) fail(ErrorCategory::Input, "empty dataset");

    const std::size_t f = field_cols.size();
    std::vector<std::vector<std::string>> cells(table.rows.size(), std::vector<std::string>(f));
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t i = 0; i < f; ++i) cells[r][i] = table.rows[r][field_cols[i]];

    for (std::size_t i = 0; i < f; ++i) {
        const auto& name = schema.field_columns[i];
        if (std::find(schema.numeric_columns.begin(), schema.numeric_columns.end(), name) ==
            schema.numeric_columns.end())
            continue;
        std::vector<std::string> column(cells.size());
        for (std::size_t r = 0; r < cells.size(); ++r) column[r] = cells[r][i];
        const auto bucketizer = QuantileBucketizer::fit(column, schema.numeric_bins);
        for (auto& row : cells) row[i] = bucketizer.bucket(row[i]);
    }

    PreparedData out;
    out.vocab = build_vocabulary(schema.field_columns, cells);

    std::vector<EncodedExample> examples;
    examples.reserve(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r) {
        double score;
        if (!parse_number(table.rows[r][label_col], score))
            fail(ErrorCategory::Input, "row " + std::to_string(r + 1) + ": label '" + table.rows[r][label_col] +
                                           "' is not a finite number");
        EncodedExample ex;
        ex.label = binarize_label(score, schema.threshold);
        ex.indices.resize(f);
        for (std::size_t i = 0; i < f; ++i) ex.indices[i] = out.vocab.encode(i, cells[r][i]);
        examples.push_back(std::move(ex));
    }
    out.split = split_dataset(std::move(examples), schema.ratios, schema.seed);
    return out;
}

void write_examples(std::ostream& os, std::span<const EncodedExample> examples) {
    for (const auto& ex : examples) {
        os << ex.label;
        for (auto idx : ex.indices) os << ' ' << idx;
        os << '\n';
    }
}

void validate_example(const EncodedExample& ex, const std::vector<FieldSchema>& schema) {
    if (ex.indices.size() != schema.size())
        fail(ErrorCategory::Input, "example has " + std::to_string(ex.indices.size()) + " indices, expected " +
                                       std::to_string(schema.size()));
    if (ex.label != 0 && ex.label != 1) fail(ErrorCategory::Input, "label must be 0 or 1");
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (ex.indices[i] < 0 || static_cast<std::size_t>(ex.indices[i]) >= schema[i].cardinality)
            fail(ErrorCategory::Input, "index " + std::to_string(ex.indices[i]) + " out of vocabulary range for field '" +
                                           schema[i].name + "' (cardinality " +
                                           std::to_string(schema[i].cardinality) + ")");
    }
}

std::vector<EncodedExample> read_examples(std::istream& is, const Vocabulary& vocab) {
    const auto schema = vocab.schema();
    std::vector<EncodedExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        EncodedExample ex;
        ls >> ex.label;
        std::int32_t idx;
        while (ls >> idx) ex.indices.push_back(idx);
        if (ls.fail() && !ls.eof())
            fail(ErrorCategory::Input, "encoded line " + std::to_string(line_no) + " is malformed");
        try {
            validate_example(ex, schema);
        } catch (const Error& e) {
            fail(ErrorCategory::Input, "encoded line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(ex));
    }
    return out;
}

void save_prepared(const std::filesystem::path& dir, const PreparedData& data) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream os(dir / name, std::ios::trunc);
        if (!os) fail(ErrorCategory::Io, "cannot write '" + (dir / name).string() + "'");
        return os;
    };
    {
        auto os = open("vocab.tsv");
        data.vocab.write(os);
    }
    {
        auto os = open("train.txt");
        write_examples(os, data.split.train);
    }
    {
        auto os = open("valid.txt");
        write_examples(os, data.split.valid);
    }
    {
        auto os = open("test.txt");
        write_examples(os, data.split.test);
    }
}

PreparedData load_prepared(const std::filesystem::path& dir) {
    auto open = [&](const char* name) {
        std::ifstream is(dir / name);
        if (!is) fail(ErrorCategory::Io, "cannot read '" + (dir / name).string() + "'");
        return is;
    };
    PreparedData data;
    {
        auto is = open("vocab.tsv");
        data.vocab = Vocabulary::read(is);
    }
    {
        auto is = open("train.txt");
        data.split.train = read_examples(is, data.vocab);
    }
    {
        auto is = open("valid.txt");
        data.split.valid = read_examples(is, data.vocab);
    }
    {
        auto is = open("test.txt");
        data.split.test = read_examples(is, data.vocab);
    }
    return data;
}

}  // namespace fiinet::ingest
