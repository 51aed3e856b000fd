// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NALM_ERROR_HPP_
#define NALM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace nalm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not line up: mismatched lengths, days or appliance sets.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Input text that could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Serialized model payloads that are truncated, corrupt or of an unknown
/// version.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected during validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nalm

#endif  // NALM_ERROR_HPP_
