// -*-c++-*----------------------------------------------------------------------------------------
// Copyright 2026 The pcaflow Authors
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

#ifndef PCAFLOW_ERRORS_HPP
#define PCAFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcaflow
{
// Every error thrown by the library derives from Error. The CLI maps the
// three families onto exit codes 1 (config/usage), 2 (data), 3 (numeric).
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class DataError : public Error
{
public:
  using Error::Error;
};

// Input stream is not sorted by timestamp.
class StreamError : public DataError
{
public:
  using DataError::DataError;
};

class ParseError : public DataError
{
public:
  ParseError(const std::string & what, std::size_t line)
  : DataError("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Nothing to evaluate, or estimates could not be matched to ground truth.
class NoDataError : public DataError
{
public:
  using DataError::DataError;
};

class BoundsError : public DataError
{
public:
  using DataError::DataError;
};

class NumericError : public Error
{
public:
  using Error::Error;
};

}  // namespace pcaflow

#endif  // PCAFLOW_ERRORS_HPP
