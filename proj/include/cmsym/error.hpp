#ifndef CMSYM_ERROR_HPP
#define CMSYM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmsym {

// Base of every error thrown by the library. The CLI maps subclasses onto
// exit codes: InputError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
  using Error::Error;
};

class SymbolError : public InputError {
public:
  using InputError::InputError;
};

class ParseError : public InputError {
public:
  ParseError(const std::string &what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class ZeroDenominatorError : public InputError {
public:
  using InputError::InputError;
};

class SingularMatrixError : public Error {
public:
  enum class Kind { singular, inconsistent };

  SingularMatrixError(const std::string &what, Kind kind = Kind::singular)
      : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

class NumericError : public Error {
public:
  using Error::Error;
};

} // namespace cmsym

#endif
