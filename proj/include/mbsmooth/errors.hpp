#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbsmooth {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MixedArityError : public Error {
 public:
  using Error::Error;
};

class EmptyBaseError : public Error {
 public:
  using Error::Error;
};

class MixedKindError : public Error {
 public:
  using Error::Error;
};

class NegativeCountError : public Error {
 public:
  using Error::Error;
};

class EmptyDistributionError : public Error {
 public:
  using Error::Error;
};

class NumericFeatureError : public Error {
 public:
  using Error::Error;
};

class NegativeWeightError : public Error {
 public:
  using Error::Error;
};

class KindMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class ArityTooLargeError : public Error {
 public:
  using Error::Error;
};

// Carries the 1-based line number of the malformed row.
class RaggedRowError : public Error {
 public:
  RaggedRowError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyFileError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class MissingTokenError : public Error {
 public:
  MissingTokenError(const std::string& what, std::string token)
      : Error(what), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

class InvalidTemplateError : public Error {
 public:
  using Error::Error;
};

class InvalidLambdasError : public Error {
 public:
  using Error::Error;
};

class TooFewCasesError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace mbsmooth
