#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fiinet::ingest {

/// Delimiter-separated text with a header row. No quoting: a field may not
/// contain the delimiter.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

/// Ragged rows are rejected with their 1-based line number.
RawTable read_table(std::istream& is, char delimiter);
RawTable read_table_file(const std::filesystem::path& path, char delimiter);
void write_table(std::ostream& os, const RawTable& table, char delimiter);

std::vector<std::string> split_line(std::string_view line, char delimiter);

}  // namespace fiinet::ingest
