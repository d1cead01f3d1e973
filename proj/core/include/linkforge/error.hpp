#pragma once

#include <stdexcept>
#include <string>

namespace linkforge {

// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or data contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A persisted artifact has the wrong magic, version or layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The encoder backend failed or does not support the requested operation.
class EncoderError : public Error {
 public:
  using Error::Error;
};

}  // namespace linkforge
