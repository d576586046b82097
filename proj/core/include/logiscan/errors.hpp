#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logiscan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::string path, std::size_t line, std::size_t column, std::string message)
        : Error(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          path_(std::move(path)),
          line_(line),
          column_(column),
          message_(std::move(message))
    {
    }

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string path_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

class RuleParseError : public Error {
public:
    RuleParseError(std::string file, std::string field, std::string reason)
        : Error(file + ": field '" + field + "': " + reason),
          file_(std::move(file)),
          field_(std::move(field)),
          reason_(std::move(reason))
    {
    }

    const std::string& file() const noexcept { return file_; }
    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string file_;
    std::string field_;
    std::string reason_;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// The focus function alone does not fit the context token budget.
class ContextOverflow : public Error {
public:
    using Error::Error;
};

class UnparseableAnswer : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class ReplayMiss : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class TruthMismatch : public Error {
public:
    using Error::Error;
};

} // namespace logiscan
