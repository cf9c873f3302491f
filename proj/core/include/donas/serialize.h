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

#ifndef DONAS_SERIALIZE_H_
#define DONAS_SERIALIZE_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "donas/at_oracles.h"
#include "donas/common.h"
#include "donas/diffnet.h"
#include "donas/double_oracle.h"
#include "donas/metagame.h"
#include "donas/supernet.h"

namespace donas::io {

// Malformed or incompatible serialized data.
class FormatError : public InputError {
 public:
  using InputError::InputError;
};

// Shortest text that reads back to the same double (17 significant digits).
std::string FormatDouble(double v);

// Line-oriented text: "key value..." records, whitespace-separated tokens.
class Writer {
 public:
  // Starts a new record line.
  void Key(std::string_view key);
  // Bare token on the current line.
  void Word(std::string_view word);
  void Int(int64_t v);
  void UInt(uint64_t v);
  void Double(double v);
  void Bool(bool v) { Int(v ? 1 : 0); }
  // Length-prefixed raw bytes: "<len>:<bytes>".
  void String(std::string_view s);
  void Mat(const Matrix& m);
  void Vec(const Vector& v);
  void EndLine();

  const std::string& str() const { return out_; }

 private:
  void Sep();
  std::string out_;
  bool line_start_ = true;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  // Throws FormatError (with the byte offset) unless the next token is `key`.
  void Expect(std::string_view key);
  std::string Token(std::string_view what);
  int64_t Int(std::string_view what);
  uint64_t UInt(std::string_view what);
  double Double(std::string_view what);
  bool Bool(std::string_view what);
  std::string String(std::string_view what);
  Matrix Mat(std::string_view what);
  Vector Vec(std::string_view what);
  bool AtEnd();
  size_t offset() const { return pos_; }

 private:
  void SkipSpace();
  [[noreturn]] void Fail(size_t at, const std::string& msg) const;
  std::string data_;
  size_t pos_ = 0;
};

void Write(Writer& w, const PayoffMatrix& u);
void Write(Writer& w, const MixedStrategy& s);
void Write(Writer& w, const EpochRecord& r);
void Write(Writer& w, const nn::Network& net);
void Write(Writer& w, const nas::Supernet& net);
void Write(Writer& w, const at::Perturbation& p);
void Write(Writer& w, const nn::OptimState& opt);

PayoffMatrix ReadPayoff(Reader& r);
MixedStrategy ReadMixedStrategy(Reader& r);
EpochRecord ReadEpochRecord(Reader& r);
nn::Network ReadNetwork(Reader& r);
nas::Supernet ReadSupernet(Reader& r);
at::Perturbation ReadPerturbation(Reader& r);
nn::OptimState ReadOptimState(Reader& r);

}  // namespace donas::io

#endif  // DONAS_SERIALIZE_H_
