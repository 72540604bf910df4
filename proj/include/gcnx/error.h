//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_ERROR_H_
#define GCNX_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcnx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed matrices or graphs handed to a structural routine.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Shape mismatches between graphs, parameters and configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A trace or gradient that does not belong to the graph/parameters given.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) { }

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace gcnx

#endif  // GCNX_ERROR_H_
