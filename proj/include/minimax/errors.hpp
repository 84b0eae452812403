#pragma once

#include <stdexcept>
#include <string>

namespace minimax {

/// Invalid experiment or bound configuration (bad key, missing parameter,
/// inconsistent combination). CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested an operation a problem kind does not support
/// (e.g. closed-form saddle of a data-backed objective).
class unsupported_operation : public std::logic_error {
 public:
  explicit unsupported_operation(const std::string& what)
      : std::logic_error(what) {}
};

/// Malformed input text; carries the 1-based line number.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Filesystem failure; carries the offending path.
class io_error : public std::runtime_error {
 public:
  io_error(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace minimax
