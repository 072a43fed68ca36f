#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fiinet {

/// Flat "key = value" lines. '#' starts a comment; blank lines are skipped.
/// Repeated keys are an error.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::istream& is, const std::string& source);
KeyValues read_key_values(const std::filesystem::path& path);

/// Rejects any key outside `allowed`, naming every offender.
void reject_unknown_keys(const KeyValues& kv, const std::vector<std::string_view>& allowed,
                         const std::string& source);

std::string trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep = ',');

double parse_double(std::string_view key, std::string_view value);
std::uint64_t parse_uint(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);
std::vector<std::size_t> parse_size_list(std::string_view key, std::string_view value);

}  // namespace fiinet
