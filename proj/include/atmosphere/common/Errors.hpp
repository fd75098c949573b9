/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef ATMOSPHERE_COMMON_ERRORS_HPP_
#define ATMOSPHERE_COMMON_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace atmosphere {

/// Root of every error raised by this project.
class AtmosphereError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An event does not satisfy its schema (missing, extra or mistyped field).
class ValidationError : public AtmosphereError {
  public:
    ValidationError(std::string field, const std::string& message)
        : AtmosphereError(message), offendingField(std::move(field)) {}
    const std::string& field() const { return offendingField; }

  private:
    std::string offendingField;
};

class UnknownStreamError : public AtmosphereError {
  public:
    explicit UnknownStreamError(std::string streamName)
        : AtmosphereError("unknown stream '" + streamName + "'"), name(std::move(streamName)) {}
    const std::string& stream() const { return name; }

  private:
    std::string name;
};

/// Comparison or arithmetic between incompatible value types.
class TypeError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

class DecodeError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

class ConfigError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

}// namespace atmosphere

#endif// ATMOSPHERE_COMMON_ERRORS_HPP_
