#ifndef ECOC_ERROR_HPP
#define ECOC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's precondition (bad index, length mismatch).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A bound or formula evaluated outside the region where it applies.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A dependence model whose parameters do not define a probability law.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Problem size above a practical cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), source_(std::move(source)), line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace ecoc

#endif  // ECOC_ERROR_HPP
