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

#include "privmarket/rng.h"

#include <cstdint>
#include <random>
#include <string_view>

namespace privmarket {

uint64_t HashTag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::mt19937_64 SeedEngine(uint64_t seed, std::string_view purpose,
                           uint64_t index) {
  const uint64_t tag = HashTag(purpose);
  std::seed_seq seq{static_cast<uint32_t>(seed),
                    static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(tag),
                    static_cast<uint32_t>(tag >> 32),
                    static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(uint64_t seed, std::string_view purpose, uint64_t index)
    : engine_(SeedEngine(seed, purpose, index)) {}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool Rng::Bernoulli(double p) { return Uniform() < p; }

size_t Rng::UniformIndex(size_t n) {
  std::uniform_int_distribution<size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace privmarket
