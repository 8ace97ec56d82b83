#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace compacta {

// Base class for all toolkit failures. The CLI maps subclasses to exit codes:
// config_error -> 2, io_error -> 3, numeric_error -> 4.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Invalid configuration, flags, or parameter combinations. Carries the full
// list of violations so callers can report everything at once.
class config_error : public error {
public:
    explicit config_error(const std::string& what_arg)
        : error(what_arg), violations_{what_arg} {}

    explicit config_error(std::vector<std::string> violations)
        : error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& violations) {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += '\n';
            out += v;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

// Missing, unreadable, or malformed files.
class io_error : public error {
public:
    using error::error;
};

// Mathematically invalid inputs: zero variance, out-of-range windows,
// mismatched lengths and the like.
class numeric_error : public error {
public:
    using error::error;
};

} // namespace compacta
