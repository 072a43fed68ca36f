#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fiinet::ingest {

struct FieldSchema {
    std::string name;
    std::size_t index = 0;
    /// Vocabulary size including the reserved out-of-vocabulary slot 0.
    std::size_t cardinality = 0;
};

/// Per-field value -> index maps. Index 0 of every field is reserved for
/// values never seen during construction; known values get 1, 2, ... in
/// order of first appearance.
class Vocabulary {
public:
    static constexpr std::int32_t kOov = 0;

    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> field_names);

    std::size_t field_count() const noexcept { return names_.size(); }
    std::vector<FieldSchema> schema() const;
    const std::string& field_name(std::size_t field) const { return names_.at(field); }
    std::size_t cardinality(std::size_t field) const { return values_.at(field).size() + 1; }

    /// Registers `value` if new and returns its index.
    std::int32_t insert(std::size_t field, std::string_view value);
    /// Index of `value`, or kOov if unseen. Never throws for unseen values.
    std::int32_t encode(std::size_t field, std::string_view value) const;
    /// Inverse of encode for in-vocabulary indices.
    const std::string& decode(std::size_t field, std::int32_t index) const;

    /// One line per entry: field_name TAB raw_value TAB index.
    void write(std::ostream& os) const;
    static Vocabulary read(std::istream& is);

    bool operator==(const Vocabulary& other) const { return names_ == other.names_ && values_ == other.values_; }

private:
    std::vector<std::string> names_;
    std::vector<std::unordered_map<std::string, std::int32_t>> maps_;
    std::vector<std::vector<std::string>> values_;  // values_[f][i - 1] is index i
};

/// Builds a vocabulary from rows holding exactly one cell per field.
/// Errors: "empty dataset" when rows is empty; ragged rows name the 1-based row.
Vocabulary build_vocabulary(std::vector<std::string> field_names,
                            std::span<const std::vector<std::string>> rows);

}  // namespace fiinet::ingest
