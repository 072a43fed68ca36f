#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fiinet {

// Coarse failure classes. The CLI maps each one to an exit code and prints
// the category name as the first token of its error line.
enum class ErrorCategory {
    Input,     // malformed or missing data
    Shape,     // tensor shape disagreement
    Numeric,   // NaN/Inf or out-of-domain values
    Config,    // invalid configuration or argument
    Io,        // file system failures
    State,     // API used in the wrong order
};

inline std::string_view category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Input: return "input";
        case ErrorCategory::Shape: return "shape";
        case ErrorCategory::Numeric: return "numeric";
        case ErrorCategory::Config: return "config";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::State: return "state";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool cond, ErrorCategory c, const std::string& msg) {
    if (!cond) throw Error(c, msg);
}

}  // namespace fiinet
