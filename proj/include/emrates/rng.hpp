/*
 * Copyright 2026 The emrates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Counter-based random streams.
//
// Every replica of every experiment draws from its own stream. A stream is
// the Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3", SC'11) keyed by the 64-bit master seed, applied to the
// 128-bit counter
//
//     (block_lo, block_hi, stream_lo, stream_hi)
//
// where `stream` is the replica index and `block` counts 128-bit outputs
// consumed so far. Because Philox is a bijection on counters for a fixed key,
// distinct replica indices can never produce the same block sequence, and the
// output is a pure function of (master_seed, stream_id) on every platform.
//
// Normal deviates use the Box-Muller transform (both outputs are used, in
// order cos then sin). Uniforms take the top 53 bits of a 64-bit word.

#include <array>
#include <cstdint>

namespace emrates {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// Ten-round Philox4x32 bijection.
  static Counter encrypt(Counter ctr, Key key) noexcept;
};

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_pos() noexcept;
  /// Standard normal.
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream for replica `replica_index` under `master_seed`.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index) noexcept {
  return RngStream(master_seed, replica_index);
}

}  // namespace emrates
