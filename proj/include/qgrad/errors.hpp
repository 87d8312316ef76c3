// Copyright 2026 The qgrad developers

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qgrad {

/**
 * @brief Bad user-supplied parameters (ranges, missing fields, inconsistent
 * combinations).
 */
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/**
 * @brief A mathematical premise of an operation does not hold for the given
 * inputs (e.g. a slope bound or an accuracy/scale ordering).
 */
class DomainError : public std::runtime_error {
  public:
    explicit DomainError(const std::string &msg) : std::runtime_error(msg) {}
};

/**
 * @brief The request exceeds a hard resource guard (state too large to
 * simulate densely).
 */
class ResourceError : public std::runtime_error {
  public:
    explicit ResourceError(const std::string &msg) : std::runtime_error(msg) {}
};

/**
 * @brief Non-finite or otherwise numerically unusable values encountered.
 */
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

/**
 * @brief Structural validation failure (non-unitary matrix, non-projector,
 * malformed state).
 */
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string &msg)
        : std::runtime_error(msg) {}
};

/**
 * @brief Internal consistency check failed; indicates a bug, not bad input.
 */
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string &msg) : std::logic_error(msg) {}
};

} // namespace qgrad
