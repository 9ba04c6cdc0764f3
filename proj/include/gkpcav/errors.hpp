// Copyright 2026 The gkpcav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPCAV_ERRORS_HPP
#define GKPCAV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gkpcav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A Fock cutoff or Kraus-index cap was too small for the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Heralding probability of a postselected outcome fell below the floor.
class PostselectionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkpcav

#endif  // GKPCAV_ERRORS_HPP
