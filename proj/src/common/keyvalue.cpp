#include "fiinet/keyvalue.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "fiinet/error.hpp"

namespace fiinet {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

KeyValues parse_key_values(std::istream& is, const std::string& source) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail(ErrorCategory::Config, source + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) fail(ErrorCategory::Config, source + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, std::move(value)).second)
            fail(ErrorCategory::Config, source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorCategory::Io, "cannot open config '" + path.string() + "'");
    return parse_key_values(is, path.string());
}

void reject_unknown_keys(const KeyValues& kv, const std::vector<std::string_view>& allowed,
                         const std::string& source) {
    std::string unknown;
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == k;
        if (!ok) unknown += (unknown.empty() ? "" : ", ") + k;
    }
    if (!unknown.empty()) fail(ErrorCategory::Config, source + ": unknown keys: " + unknown);
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string s(value);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        fail(ErrorCategory::Config, "key '" + std::string(key) + "': '" + s + "' is not a finite number");
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
    const std::string s(value);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE)
        fail(ErrorCategory::Config, "key '" + std::string(key) + "': '" + s + "' is not a non-negative integer");
    return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(ErrorCategory::Config, "key '" + std::string(key) + "': '" + std::string(value) + "' is not a boolean");
}

std::vector<std::size_t> parse_size_list(std::string_view key, std::string_view value) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(value)) out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
    return out;
}

}  // namespace fiinet
