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

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace kljn {

/// Engine behind every random stream. Boost's implementation is used instead
/// of <random> so that the normal sampler is identical across standard
/// libraries.
using RngStream = boost::random::mt19937_64;

// Independent purposes that draw randomness for one bit exchange.
enum class StreamId : std::uint64_t {
  AliceChoice = 1,
  BobChoice = 2,
  AliceNoise = 3,
  BobNoise = 4,
  EveInjection = 5,
  EveCoin = 6,
};

// Disjoint families of bit indices. Calibration bits used to set detection
// thresholds must not reuse the noise of the bits they are later tested on.
enum class SeedDomain : std::uint64_t {
  Exchange = 0,
  Calibration = 1,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for (master, domain, bit, stream). Each coordinate is folded in
/// through a splitmix64 round, so the seed of bit i never depends on how
/// many bits are simulated.
std::uint64_t derive_seed(std::uint64_t master_seed, SeedDomain domain,
                          std::uint64_t bit_index, StreamId stream) noexcept;

inline RngStream make_stream(std::uint64_t seed) { return RngStream(seed); }

}  // namespace kljn
