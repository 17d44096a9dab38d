// Copyright 2026 The sbf Authors
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

#ifndef SBF_ERROR_HPP_
#define SBF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sbf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (rows vs rhs, state dimensions, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed LP model: bad bounds, dangling variable ids.
class ModelError : public Error {
 public:
  using Error::Error;
};

// The LP backend failed to reach a definitive status. Never interpreted as
// infeasibility.
class SolverError : public Error {
 public:
  using Error::Error;
};

// A precondition of a geometric or statistical routine does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Barrier partition does not align with the dynamics regions or misses
// part of the domain.
class PartitionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbf

#endif  // SBF_ERROR_HPP_
