#pragma once

#include <stdexcept>
#include <string>

namespace vipd {

// Malformed input text; line/col are 1-based, 0 = unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line = 0, int col = 0)
        : std::runtime_error(format(msg, line, col)), line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(const std::string& msg, int line, int col) {
        if (line <= 0) return msg;
        return "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg;
    }
    int line_;
    int col_;
};

// Structurally invalid instance (well-formed text, bad graph).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad caller-supplied parameters (k out of range, negative D, ...).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested configuration cannot be executed (family too large,
// color budget over the table cap, oracle cap exceeded).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vipd
