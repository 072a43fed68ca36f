#include "fiinet/ingest/vocabulary.hpp"

#include <istream>
#include <ostream>

#include "fiinet/error.hpp"
#include "fiinet/ingest/table.hpp"

namespace fiinet::ingest {

Vocabulary::Vocabulary(std::vector<std::string> field_names)
    : names_(std::move(field_names)), maps_(names_.size()), values_(names_.size()) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(names_[i] != names_[j], ErrorCategory::Input, "duplicate field name '" + names_[i] + "'");
}

std::vector<FieldSchema> Vocabulary::schema() const {
    std::vector<FieldSchema> out;
    out.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) out.push_back({names_[i], i, cardinality(i)});
    return out;
}

std::int32_t Vocabulary::insert(std::size_t field, std::string_view value) {
    auto& map = maps_.at(field);
    auto [it, inserted] = map.try_emplace(std::string(value), static_cast<std::int32_t>(values_[field].size() + 1));
    if (inserted) values_[field].emplace_back(value);
    return it->second;
}

std::int32_t Vocabulary::encode(std::size_t field, std::string_view value) const {
    const auto& map = maps_.at(field);
    auto it = map.find(std::string(value));
    return it == map.end() ? kOov : it->second;
}

const std::string& Vocabulary::decode(std::size_t field, std::int32_t index) const {
    const auto& vals = values_.at(field);
    if (index < 1 || static_cast<std::size_t>(index) > vals.size())
        fail(ErrorCategory::Input, "index " + std::to_string(index) + " is not a known value of field '" +
                                       names_.at(field) + "'");
    return vals[static_cast<std::size_t>(index) - 1];
}

void Vocabulary::write(std::ostream& os) const {
    for (std::size_t f = 0; f < names_.size(); ++f) {
        for (std::size_t i = 0; i < values_[f].size(); ++i) {
            const auto& v = values_[f][i];
            require(v.find_first_of("\t\n") == std::string::npos, ErrorCategory::Input,
                    "value of field '" + names_[f] + "' contains a tab or newline");
            os << names_[f] << '\t' << v << '\t' << (i + 1) << '\n';
        }
    }
}

Vocabulary Vocabulary::read(std::istream& is) {
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line, '\t');
        if (cells.size() != 3)
            fail(ErrorCategory::Input, "vocabulary line " + std::to_string(line_no) + ": expected 3 columns");
        const auto& name = cells[0];
        if (vocab.names_.empty() || vocab.names_.back() != name) {
            for (const auto& existing : vocab.names_)
                if (existing == name)
                    fail(ErrorCategory::Input, "vocabulary line " + std::to_string(line_no) + ": field '" + name +
                                                   "' is not contiguous");
            vocab.names_.push_back(name);
            vocab.maps_.emplace_back();
            vocab.values_.emplace_back();
        }
        const std::size_t f = vocab.names_.size() - 1;
        std::int32_t expected = static_cast<std::int32_t>(vocab.values_[f].size() + 1);
        std::int32_t got = 0;
        try {
            got = std::stoi(cells[2]);
        } catch (const std::exception&) {
            fail(ErrorCategory::Input, "vocabulary line " + std::to_string(line_no) + ": bad index");
        }
        if (got != expected || vocab.insert(f, cells[1]) != expected)
            fail(ErrorCategory::Input, "vocabulary line " + std::to_string(line_no) + ": index " + cells[2] +
                                           " out of sequence (expected " + std::to_string(expected) + ")");
    }
    if (vocab.names_.empty()) fail(ErrorCategory::Input, "empty vocabulary");
    return vocab;
}

Vocabulary build_vocabulary(std::vector<std::string> field_names, std::span<const std::vector<std::string>> rows) {
    if (rows.empty()) fail(ErrorCategory::Input, "empty dataset");
    Vocabulary vocab(std::move(field_names));
    const std::size_t f = vocab.field_count();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != f)
            fail(ErrorCategory::Input, "ragged row " + std::to_string(r + 1) + ": " + std::to_string(rows[r].size()) +
                                           " columns, expected " + std::to_string(f));
        for (std::size_t i = 0; i < f; ++i) vocab.insert(i, rows[r][i]);
    }
    return vocab;
}

}  // namespace fiinet::ingest
