// Copyright (c) stosqp contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace stosqp {

// Counter-based stream built on Philox-4x32-10 (Salmon et al., SC'11).
// A stream is fully identified by (key, stream_id): output is a pure
// function of the 128-bit counter, so streams with distinct ids never
// share state and a run can be replayed from its seed alone.
class RngStream {
 public:
  RngStream() = default;
  RngStream(uint64_t key, uint64_t stream_id);

  uint64_t next_u64();

  // Uniform on [0, 1), 53-bit mantissa.
  double next_uniform();

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached, so draws come in a fixed order per stream.
  double next_normal();

  uint64_t key() const { return key_; }
  uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  uint64_t key_ = 0;
  uint64_t stream_id_ = 0;
  uint64_t block_ = 0;  // low half of the 128-bit counter
  uint32_t out_[4] = {0, 0, 0, 0};
  int avail_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// splitmix64 finalizer over master + index; derives per-run and per-stream
// seeds that are uncorrelated across consecutive indices.
uint64_t derive_seed(uint64_t master, uint64_t index);

}  // namespace stosqp
