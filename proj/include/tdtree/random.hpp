// Copyright 2026 The tdtree Authors
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tdtree {

/**
 * @brief Philox4x32-10 counter-based block function (Salmon et al., SC'11,
 * as specified by Random123).
 *
 * Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. Being a
 * pure function of (counter, key) it lets any stream position be computed
 * without replaying earlier draws, so per-sample streams can be handed out in
 * any order.
 */
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic seed for a sub-task, e.g. derive_seed(base, node_id, round).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/**
 * @brief Sequential stream over Philox4x32-10.
 *
 * The key is the 64-bit seed. The counter is (block_lo, block_hi, stream_lo,
 * stream_hi): distinct stream ids give independent sequences under the same
 * seed. All derived draws (uniform, normal, integer) are defined here and do
 * not depend on the standard library's distribution implementations.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// 53-bit uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (cosine branch only, one normal per two uniforms).
    double normal();

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    template <typename T> void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    std::size_t pos_ = 4;
};

/// Identity permutation of length n shuffled with `rng`.
std::vector<std::size_t> random_permutation(std::size_t n, Rng &rng);

} // namespace tdtree
