// Copyright 2026 The DONAS Authors.
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

#ifndef DONAS_COMMON_H_
#define DONAS_COMMON_H_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace donas {

// Batches are stored one example per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, bad size).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed: non-finite values, invalid distributions, bad
// config or checkpoint text.
class InputError : public Error {
 public:
  using Error::Error;
};

// A computation diverged (non-finite activations, gradients or payoffs).
class NumericError : public Error {
 public:
  using Error::Error;
};

#define DONAS_REQUIRE(cond, msg)                                      \
  do {                                                                \
    if (!(cond)) throw ::donas::ContractError(std::string(msg));      \
  } while (false)

inline bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace donas

#endif  // DONAS_COMMON_H_
