// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace splatir {

/// A numeric argument outside its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file is missing required fields or has the wrong layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be parsed (bad syntax, non-finite payload, singular matrix).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage was invoked without the artifacts it depends on.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace splatir
