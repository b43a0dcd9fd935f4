// Exception types shared by all wgfc modules.
#ifndef WGFC_ERRORS_HPP
#define WGFC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgfc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the operator's admissible range (alpha, beta, weight sign, ...).
struct DomainError : Error {
  using Error::Error;
};

// A series or iteration hit its term budget before meeting its tolerance.
struct NonConvergenceError : Error {
  using Error::Error;
};

// Two sampled objects live on different grids.
struct GridMismatchError : Error {
  using Error::Error;
};

// Runtime evaluation failure (log of a non-positive number, division by zero, ...).
struct EvalError : Error {
  EvalError(const std::string& what, std::size_t where)
      : Error(what), offset(where) {}
  explicit EvalError(const std::string& what) : Error(what), offset(0) {}
  std::size_t offset;  // byte offset of the offending node in the source text
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t where, std::vector<std::string> expect)
      : Error(what), offset(where), expected(std::move(expect)) {}
  std::size_t offset;
  std::vector<std::string> expected;
};

struct MultipleVariablesError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

// Trajectory endpoints disagree with the fixed boundary values.
struct BoundaryMismatchError : Error {
  using Error::Error;
};

struct SingularSystemError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  ConfigError(const std::string& what, std::string key_name, int line_number)
      : Error(what), key(std::move(key_name)), line(line_number) {}
  std::string key;
  int line;
};

}  // namespace wgfc

#endif
