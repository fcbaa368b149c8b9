/*
 * Copyright 2026 The msolimit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace msol {

/// Base of all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 2; }
    virtual const char* kind() const noexcept { return "error"; }
};

/// Rejected input: malformed files, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "input"; }
};

class ParseError : public InputError {
public:
    ParseError(const std::string& msg, int line, int column)
        : InputError(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    int line_;
    int column_;
};

/// An empirical verdict fell between the decision bands.
class InconclusiveError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
    const char* kind() const noexcept override { return "inconclusive"; }
};

/// The requested computation exceeds a configured size or rank bound.
class FeasibilityError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
    const char* kind() const noexcept override { return "feasibility"; }
};

} // namespace msol
