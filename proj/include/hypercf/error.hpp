#pragma once

#include <stdexcept>
#include <string>

namespace hypercf {

// Base for every error the library raises. category() is a short stable
// token used by the CLI for its single-line error report.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message) {}
};

// Two artifacts (or an artifact and the requested configuration) disagree.
class MismatchError : public Error {
public:
    explicit MismatchError(const std::string& message) : Error("mismatch", message) {}
};

}  // namespace hypercf
