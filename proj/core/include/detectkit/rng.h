// Copyright 2026 The detectkit Authors.
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

#ifndef DETECTKIT_RNG_H_
#define DETECTKIT_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace detectkit {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Derived values never go through the
// implementation-defined <random> distributions:
//   Uniform()        = (next() >> 11) * 2^-53, in [0, 1)
//   UniformInt(n)    = floor(Uniform() * n)
// so a reimplementation in another language replays identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t UniformInt(std::uint64_t n) {
    auto v = static_cast<std::uint64_t>(Uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; the mixing step behind every keyed hash here.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for a named sub-stream, e.g. one generation per record id. Independent
// of scheduling order so parallel runs replay serial ones.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view name) {
  return Mix64(seed ^ Mix64(Fnv1a64(name)));
}

}  // namespace detectkit

#endif  // DETECTKIT_RNG_H_
