// Copyright 2026 The mapcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MAPCAP_ERRORS_HPP_
#define MAPCAP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mapcap {

// Root of the library error hierarchy. Every throw site in this codebase uses
// a subclass of Error so callers can catch pipeline failures separately from
// stdlib exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A value violates a numeric or geometric contract (latitude out of the
// Mercator range, zero-area box, negative resolution, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structured text could not be parsed at all. `offset` is the byte offset of
// the failure when the underlying parser reports one, 0 otherwise.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, std::size_t offset = 0)
      : Error(msg), offset(offset) {}
  std::size_t offset;
};

// Input parsed fine but a field is missing or out of contract. `field` is a
// dotted path such as "gsd" or "footprint.north".
class ValidationError : public Error {
 public:
  ValidationError(std::string field_path, const std::string& msg)
      : Error(msg + " (field: " + field_path + ")"),
        field(std::move(field_path)) {}
  std::string field;
};

// A URL or prompt template is missing a required placeholder.
class TemplateError : public Error {
 public:
  TemplateError(std::string placeholder_name, const std::string& msg)
      : Error(msg), placeholder(std::move(placeholder_name)) {}
  std::string placeholder;
};

// Filesystem read or write failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// A persisted artifact declares a schema version this build does not handle.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Cross-referenced artifacts disagree (caption for sample A paired with
// references for sample B, fingerprint drift, ...).
class MismatchError : public Error {
 public:
  using Error::Error;
};

// A file another stage should have produced is absent.
class MissingFileError : public Error {
 public:
  MissingFileError(std::string missing_path, const std::string& msg)
      : Error(msg), path(std::move(missing_path)) {}
  std::string path;
};

// A remote service call failed. `retryable` distinguishes transient faults
// (timeouts, 429, 5xx) from permanent ones (auth, malformed request).
class BackendError : public Error {
 public:
  BackendError(const std::string& msg, bool retryable, int status = 0)
      : Error(msg), retryable(retryable), status(status) {}
  bool retryable;
  int status;
};

// The configured request budget ran out before the work finished.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Too few ensemble members produced a usable response.
class EnsembleError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapcap

#endif  // MAPCAP_ERRORS_HPP_
