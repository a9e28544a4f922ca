// Copyright 2026 The sarkit Authors
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

#ifndef SARKIT_RNG_HPP_
#define SARKIT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace sarkit {

// Deterministic random source. All randomness in the library flows through
// explicitly seeded instances of this class — never through global state.
//
// The uniform and normal transforms are written out by hand instead of using
// std::uniform_real_distribution / std::normal_distribution because the
// standard leaves those implementation-defined: the same seed must produce
// the same stream on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Raw 64-bit draw from the underlying engine.
  std::uint64_t raw() { return engine_(); }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be nonzero.
  std::uint64_t integer(std::uint64_t n) {
    // Modulo bias is below 2^-53 for every n this library uses (buffer and
    // index sizes), so a plain reduction keeps the stream cheap and portable.
    return engine_() % n;
  }

  // Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derives an independent generator for a named substream. Mixing the base
  // seed with the stream id through SplitMix64 keeps substreams decorrelated
  // even for adjacent seeds.
  Rng fork(std::uint64_t stream) const {
    return Rng(split_mix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

  static std::uint64_t split_mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sarkit

#endif  // SARKIT_RNG_HPP_
