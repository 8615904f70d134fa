// Copyright 2026 The privmarket Authors
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

#ifndef PRIVMARKET_RNG_H_
#define PRIVMARKET_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace privmarket {

// A random stream keyed by (master seed, purpose tag, index). Two streams
// built from the same key produce the same sequence regardless of which
// thread builds them or when, which is what makes parallel runs repeatable.
class Rng {
 public:
  Rng(uint64_t seed, std::string_view purpose, uint64_t index);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();

  // True with probability p; p <= 0 never fires and p >= 1 always does.
  bool Bernoulli(double p);

  // Uniform integer in [0, n). n must be positive.
  size_t UniformIndex(size_t n);

  uint64_t NextU64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit FNV-1a hash, used to turn purpose tags into seed words.
uint64_t HashTag(std::string_view tag);

}  // namespace privmarket

#endif  // PRIVMARKET_RNG_H_
