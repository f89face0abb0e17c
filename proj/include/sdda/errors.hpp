#pragma once

#include <stdexcept>
#include <string>

namespace sdda {

// Error categories mirror the CLI exit codes: config 1, numeric 2, io 3.
// Argument/shape violations use std::invalid_argument directly.

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

class config_error : public std::runtime_error {
public:
    config_error(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace sdda
