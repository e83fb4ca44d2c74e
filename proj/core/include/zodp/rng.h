// Copyright 2026 The zodp Authors.
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

#ifndef ZODP_RNG_H_
#define ZODP_RNG_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace zodp {

// Deterministic splittable random stream.
//
// A stream is identified by a 64-bit root seed plus the ordered list of
// labels used to derive it from the root. Equal (seed, label path) pairs
// produce bit-identical draw sequences on every platform; the engine is
// fixed (xoshiro256++ seeded through splitmix64) and never delegates to
// implementation-defined standard library distributions.
//
// Deriving a child never consumes draws from the parent, so attaching a new
// consumer under a fresh label cannot perturb existing streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent substream for `label`. Distinct labels give streams that
  // behave as independently seeded generators.
  RngStream child(std::string_view label) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Standard normal via Box-Muller. Consumes exactly two uniforms per call
  // and keeps no cached spare, so the draw count is predictable.
  double next_gaussian();

  // Uniform on {0, 1, ..., bound - 1} without modulo bias.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }
  const std::string& path() const { return path_; }

 private:
  RngStream(std::uint64_t seed, std::string path, std::uint64_t key);

  std::uint64_t seed_ = 0;
  std::string path_;
  std::uint64_t key_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

inline RngStream make_rng(std::uint64_t seed) { return RngStream(seed); }

}  // namespace zodp

#endif  // ZODP_RNG_H_
