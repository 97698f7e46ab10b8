#ifndef DGC_ERRORS_HPP
#define DGC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dgc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV row; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class InitError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

// Non-finite center coordinates. iteration() is the round that produced them.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace dgc

#endif  // DGC_ERRORS_HPP
