// Copyright 2026 The Leduc Workbench Authors
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

#ifndef LEDUC_ERRORS_H_
#define LEDUC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace leduc {

// A caller broke an operation's precondition (illegal action, terminal state
// queried for legal actions, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidDeal : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A strategy table lacks an entry needed by a tree walk.
class IncompleteStrategy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyNotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed or unsupported artifact file (bad header, unknown version, shape
// mismatch).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const std::string& path)
      : std::runtime_error("missing artifact: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace leduc

#endif  // LEDUC_ERRORS_H_
