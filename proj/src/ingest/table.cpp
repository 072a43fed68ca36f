#include "fiinet/ingest/table.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "fiinet/error.hpp"

namespace fiinet::ingest {

std::optional<std::size_t> RawTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::vector<std::string> split_line(std::string_view line, char delimiter) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

RawTable read_table(std::istream& is, char delimiter) {
    RawTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line, delimiter);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            fail(ErrorCategory::Input, "ragged row at line " + std::to_string(line_no) + ": " +
                                           std::to_string(cells.size()) + " columns, expected " +
                                           std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) fail(ErrorCategory::Input, "empty dataset");
    return t;
}

RawTable read_table_file(const std::filesystem::path& path, char delimiter) {
    std::ifstream is(path);
    if (!is) fail(ErrorCategory::Io, "cannot open input '" + path.string() + "'");
    return read_table(is, delimiter);
}

void write_table(std::ostream& os, const RawTable& table, char delimiter) {
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << delimiter;
            os << cells[i];
        }
        os << '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) emit(r);
}

}  // namespace fiinet::ingest
