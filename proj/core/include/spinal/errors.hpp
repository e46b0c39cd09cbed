#pragma once

#include <stdexcept>
#include <string>

namespace spinal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible with the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an API precondition (non-scalar loss, missing gradient).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid layer, optimizer, or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent model description.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message always names the offending file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncatedFileError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Image and label files disagree on the sample count.
class CountMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Training diverged (NaN or infinite loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinal
