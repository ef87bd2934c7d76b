// Copyright 2026 The kljnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kljn/privacy.hpp"

#include "kljn/errors.hpp"

namespace kljn {

KeyBits xor_compress(const KeyBits& key) {
  if (key.bits.size() < 2) throw DomainError("xor_compress needs at least two bits");
  KeyBits out;
  out.provenance = key.provenance;
  out.bits.resize(key.bits.size() / 2);
  for (std::size_t j = 0; j < out.bits.size(); ++j) {
    out.bits[j] = static_cast<std::uint8_t>((key.bits[2 * j] ^ key.bits[2 * j + 1]) & 1U);
  }
  return out;
}

double predicted_leak_after_xor(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("predicted_leak_after_xor: p must lie in [0, 1]");
  return p * p + (1.0 - p) * (1.0 - p);
}

double eve_success_after_amplification(const KeyBits& true_key, const KeyBits& eve_key,
                                       std::size_t passes) {
  if (true_key.bits.size() != eve_key.bits.size()) {
    throw ShapeError("true and guessed keys differ in length");
  }
  KeyBits a = true_key;
  KeyBits b = eve_key;
  for (std::size_t i = 0; i < passes; ++i) {
    a = xor_compress(a);
    b = xor_compress(b);
  }
  if (a.bits.empty()) throw DomainError("key is empty after amplification");
  std::size_t agree = 0;
  for (std::size_t j = 0; j < a.bits.size(); ++j) agree += a.bits[j] == b.bits[j] ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(a.bits.size());
}

}  // namespace kljn
