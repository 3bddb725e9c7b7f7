// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#include "stosqp/rng.hpp"

#include <cmath>

namespace stosqp {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(uint32_t ctr[4], const uint32_t key[2]) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  ctr[0] = hi1 ^ ctr[1] ^ key[0];
  ctr[1] = lo1;
  ctr[2] = hi0 ^ ctr[3] ^ key[1];
  ctr[3] = lo0;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(uint64_t key, uint64_t stream_id)
    : key_(key), stream_id_(stream_id) {}

void RngStream::refill() {
  uint32_t ctr[4] = {
      static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
      static_cast<uint32_t>(stream_id_), static_cast<uint32_t>(stream_id_ >> 32)};
  uint32_t key[2] = {static_cast<uint32_t>(key_), static_cast<uint32_t>(key_ >> 32)};
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  out_[0] = ctr[0];
  out_[1] = ctr[1];
  out_[2] = ctr[2];
  out_[3] = ctr[3];
  avail_ = 4;
  ++block_;
}

uint64_t RngStream::next_u64() {
  if (avail_ < 2) refill();
  const uint64_t hi = out_[4 - avail_];
  const uint64_t lo = out_[5 - avail_];
  avail_ -= 2;
  return (hi << 32) | lo;
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

uint64_t derive_seed(uint64_t master, uint64_t index) {
  return splitmix64(master + index * 0xA0761D6478BD642Full);
}

}  // namespace stosqp
