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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kljn {

enum class KeyProvenance : std::uint8_t { True, EveGuess };

struct KeyBits {
  std::vector<std::uint8_t> bits;
  KeyProvenance provenance = KeyProvenance::True;
};

/// bit'[j] = bit[2j] ^ bit[2j+1]; an odd trailing bit is dropped.
KeyBits xor_compress(const KeyBits& key);

/// p^2 + (1-p)^2: agreement after XOR of two independent guesses each right
/// with probability p.
double predicted_leak_after_xor(double p);

/// Fraction of agreeing positions after `passes` XOR compressions of both keys.
double eve_success_after_amplification(const KeyBits& true_key, const KeyBits& eve_key,
                                       std::size_t passes);

}  // namespace kljn
