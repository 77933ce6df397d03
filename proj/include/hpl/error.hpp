#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: shapes, ranges, non-finite entries, broken invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A linear system or Sylvester equation that cannot be solved stably.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Synthetic generator could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. Carries the byte offset where parsing failed.
class FormatError : public IoError {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : IoError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hpl
