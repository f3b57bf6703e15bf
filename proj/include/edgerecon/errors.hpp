#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgerecon {

// Input that is geometrically unusable (coincident points, zero area, ...).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file record that could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Missing or unreadable/unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a NaN/inf loss.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Assembly kept no face at all.
class EmptyReconstruction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgerecon
