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

#include "zodp/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zodp {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 output finalizer; also used as the generic 64-bit mixer.
std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMixNext(std::uint64_t& s) {
  s += kGolden;
  return Mix64(s);
}

// Hashes the label into the parent key: FNV-1a over the bytes, then a
// splitmix finalizer to spread the low-entropy FNV output across all bits.
std::uint64_t AbsorbLabel(std::uint64_t key, std::string_view label) {
  std::uint64_t h = key ^ 0xCBF29CE484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return Mix64(h + kGolden);
}

std::uint64_t Rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed)
    : RngStream(seed, std::string(), Mix64(seed + kGolden)) {}

RngStream::RngStream(std::uint64_t seed, std::string path, std::uint64_t key)
    : seed_(seed), path_(std::move(path)), key_(key) {
  std::uint64_t s = key_;
  for (auto& word : state_) word = SplitMixNext(s);
  // xoshiro256++ requires a nonzero state.
  if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
    state_[0] = kGolden;
  }
}

RngStream RngStream::child(std::string_view label) const {
  std::string child_path = path_.empty()
                               ? std::string(label)
                               : path_ + "/" + std::string(label);
  return RngStream(seed_, std::move(child_path), AbsorbLabel(key_, label));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = Rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  // u1 lies in (0, 1] so the log stays finite; the sine branch is dropped
  // to keep one draw per two uniforms.
  const double u1 = 1.0 - next_double();
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  // Lemire multiply-shift rejection sampler.
  while (true) {
    const std::uint64_t x = next_u64();
    const unsigned __int128 m =
        static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(bound);
    const std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low >= bound) return static_cast<std::uint64_t>(m >> 64);
    const std::uint64_t threshold = (0 - bound) % bound;
    if (low >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

}  // namespace zodp
