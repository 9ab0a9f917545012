#pragma once

#include <stdexcept>
#include <string>

namespace npsa {

/// Broad failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
  kInvalidInput,    // malformed arguments, bad dimensions, corrupt files
  kDegenerateData,  // well-formed input with no usable quadrature content
  kIo,              // filesystem failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

class DegenerateData : public Error {
 public:
  explicit DegenerateData(const std::string& what)
      : Error(ErrorKind::kDegenerateData, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace npsa
