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

#include "tdtree/random.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>

using namespace tdtree;
using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32_10).
TEST_CASE("philox matches published known-answer vectors", "[random]") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                        {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                        {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and distinct", "[random]") {
    Rng a(42, 0);
    Rng b(42, 0);
    Rng c(42, 1);
    Rng d(43, 0);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 16; ++i) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vd.push_back(d.next_u64());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
}

TEST_CASE("rng draws stay in range with plausible moments", "[random]") {
    Rng rng(7);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sq += z * z;
        REQUIRE(rng.below(6) < 6);
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("random permutation is a permutation", "[random]") {
    Rng rng(3);
    auto p = random_permutation(50, rng);
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(50);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    CHECK(p != iota);
}

TEST_CASE("derived seeds separate sub-tasks", "[random]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t node = 1; node <= 10; ++node) {
        for (std::uint64_t t = 1; t <= 50; ++t) {
            seen.insert(derive_seed(1, node, t));
        }
    }
    CHECK(seen.size() == 500);
    CHECK(derive_seed(5, 2, 3) == derive_seed(5, 2, 3));
    CHECK(derive_seed(5, 2, 3) != derive_seed(5, 3, 2));
}
