// Copyright 2026 The ShadowForge Authors.
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

#ifndef SHADOWFORGE_ERRORS_H_
#define SHADOWFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shadowforge {

// Malformed input data: bad image bytes, bad CSV rows, bad JSON documents.
// The CLI maps these to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedFormatError : public InputError {
 public:
  using InputError::InputError;
};

// Filesystem and environment failures. The CLI maps these to exit status 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shadowforge

#endif  // SHADOWFORGE_ERRORS_H_
