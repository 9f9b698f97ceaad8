#ifndef LAHJA_ERROR_HPP
#define LAHJA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lahja {

/// Base for every recoverable data problem: bad input files, labels, formats.
/// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class LabelError : public DataError {
public:
  explicit LabelError(std::string token)
      : DataError("invalid label token \"" + token + "\""), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

class FormatError : public DataError {
public:
  using DataError::DataError;
};

class TruncationError : public FormatError {
public:
  explicit TruncationError(std::size_t offset)
      : FormatError("truncated file at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Invalid configuration values (CLI exit code 1 when they come from flags).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-fatal diagnostics collected by operations that may degrade gracefully.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

} // namespace lahja

#endif
