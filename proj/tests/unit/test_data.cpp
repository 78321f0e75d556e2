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

#include "tdtree/datasets.hpp"
#include "tdtree/encode.hpp"
#include "tdtree/error.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace tdtree;
using Catch::Matchers::WithinAbs;

namespace {

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "tdtree_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void put_be32(std::ofstream &out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char *>(b), 4);
}

} // namespace

// ---------------------------------------------------------------------------
// Encoding.

TEST_CASE("amplitude encoding examples", "[encode]") {
    const std::vector<double> basis{1, 0, 0, 0};
    const auto s = encode(basis, EncodingSpec::amplitude(), 2);
    CHECK(s.amplitudes()[0] == cplx(1.0));
    const std::vector<double> x{3, 4};
    const auto t = encode(x, EncodingSpec::amplitude(), 1);
    CHECK_THAT(t.amplitudes()[0].real(), WithinAbs(0.6, 1e-15));
    CHECK_THAT(t.amplitudes()[1].real(), WithinAbs(0.8, 1e-15));
    const std::vector<double> padded{1, 1, 1};
    const auto p = encode(padded, EncodingSpec::amplitude(), 2);
    CHECK(p.amplitudes()[3] == cplx(0.0));
    CHECK_THROWS_AS(encode(std::vector<double>{0, 0}, EncodingSpec::amplitude(), 1), InvariantError);
    CHECK_THROWS_AS(encode(std::vector<double>{1, 2, 3}, EncodingSpec::amplitude(), 1), DimensionError);
}

TEST_CASE("angle encoding examples", "[encode]") {
    const std::vector<double> pi{std::numbers::pi};
    const auto s = encode(pi, EncodingSpec::angle(AngleGates::AllRy), 1);
    CHECK_THAT(std::abs(s.amplitudes()[1]), WithinAbs(1.0, 1e-15));
    // Ry on each qubit: product state cos/sin amplitudes.
    const std::vector<double> x{0.4, 1.3};
    const auto t = encode(x, EncodingSpec::angle(AngleGates::AllRy), 2);
    const double c0 = std::cos(0.2), s0 = std::sin(0.2), c1 = std::cos(0.65), s1 = std::sin(0.65);
    CHECK_THAT(t.amplitudes()[0].real(), WithinAbs(c0 * c1, 1e-15));
    CHECK_THAT(t.amplitudes()[1].real(), WithinAbs(c0 * s1, 1e-15));
    CHECK_THAT(t.amplitudes()[2].real(), WithinAbs(s0 * c1, 1e-15));
    CHECK_THAT(t.amplitudes()[3].real(), WithinAbs(s0 * s1, 1e-15));
    // Rx(pi)|0> = -i|1>.
    const auto r = encode(pi, EncodingSpec::angle(AngleGates::AllRx), 1);
    CHECK_THAT(r.amplitudes()[1].imag(), WithinAbs(-1.0, 1e-15));
    // Features wrap around the register; every output is normalized.
    const std::vector<double> wrap{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THAT(encode(wrap, EncodingSpec::angle(), 2).norm(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("raw-state encoding validates", "[encode]") {
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<double> ok{r, 0, 0, r};
    CHECK_THAT(encode(ok, EncodingSpec::raw_state(), 2).amplitudes()[3].real(), WithinAbs(r, 1e-15));
    CHECK_THROWS(encode(std::vector<double>{1, 1, 0, 0}, EncodingSpec::raw_state(), 2));
    CHECK_THROWS(encode(std::vector<double>{1, 0}, EncodingSpec::raw_state(), 2));
    CHECK(encoding_kind_from_string(to_string(EncodingKind::Angle)) == EncodingKind::Angle);
    CHECK_THROWS_AS(encoding_kind_from_string("phase"), ConfigError);
}

// ---------------------------------------------------------------------------
// Synthetic data.

TEST_CASE("synthetic data sizes, ranges and determinism", "[datasets]") {
    SyntheticSpec spec;
    spec.per_class_train = 2000;
    spec.per_class_test = 1000;
    const auto [train, test] = gen_synthetic(spec, 5);
    CHECK(train.size() == 6000);
    CHECK(test.size() == 3000);
    CHECK(train.class_counts() == std::vector<std::size_t>{2000, 2000, 2000});
    for (const auto &x : train.features) {
        REQUIRE(x.size() == 4);
        for (double v : x) {
            REQUIRE(v >= 0.0);
            REQUIRE(v < 2 * std::numbers::pi);
        }
    }
    const auto again = gen_synthetic(spec, 5);
    CHECK(again.first.features == train.features);
    CHECK(again.second.labels == test.labels);
}

TEST_CASE("synthetic samples lie in an interval of their class", "[datasets]") {
    SyntheticSpec spec;
    spec.per_class_train = 50;
    spec.per_class_test = 10;
    spec.classes = 5;
    const auto assignment = synthetic_assignment(spec, 9);
    REQUIRE(assignment.size() == 8);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::count(assignment.begin(), assignment.end(), k) >= 1);
    }
    const auto [train, test] = gen_synthetic(spec, 9);
    const double width = 2 * std::numbers::pi / 8;
    for (std::size_t m = 0; m < train.size(); ++m) {
        const auto &x = train.features[m];
        const auto cell = static_cast<std::size_t>(x[0] / width);
        CHECK(assignment[cell] == train.labels[m]);
        for (double v : x) {
            CHECK(static_cast<std::size_t>(v / width) == cell);
        }
    }
}

// ---------------------------------------------------------------------------
// ANNNI.

TEST_CASE("ANNNI Hamiltonian examples", "[datasets]") {
    const CMatrix h = annni_hamiltonian(3, 0.0, 0.0);
    const auto ev = eigvalsh(h);
    CHECK_THAT(std::max(std::abs(ev.front()), std::abs(ev.back())), WithinAbs(2.0, 1e-10));
    const CMatrix g = annni_hamiltonian(4, 0.37, 1.2);
    CHECK_THAT(std::abs(g.trace()), WithinAbs(0.0, 1e-12));
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t j = 0; j < 16; ++j) {
            CHECK(g(i, j).imag() == 0.0);
            CHECK(g(i, j) == g(j, i));
        }
    }
}

TEST_CASE("ANNNI phase boundaries", "[datasets]") {
    CHECK(annni_h_commensurate(0.5) == 0.0);
    CHECK_THAT(annni_h_ising(1e-9), WithinAbs(1.0, 1e-6));
    CHECK(annni_h_ising(0.2) > 0.01);
    CHECK(annni_phase_label(0.2, 0.01) == 1);
    CHECK(annni_phase_label(0.8, 0.1) == 0);
    CHECK(annni_phase_label(0.2, 1.9) == 2);
    CHECK(annni_phase_label(0.8, 1.9) == 2);
}

TEST_CASE("ANNNI dataset generation", "[datasets]") {
    AnnniSpec spec;
    spec.n_qubits = 4;
    spec.per_class_train = 8;
    spec.per_class_test = 4;
    const auto [train, test] = gen_annni(spec, 3);
    CHECK(train.class_counts() == std::vector<std::size_t>{8, 8, 8});
    CHECK(test.class_counts() == std::vector<std::size_t>{4, 4, 4});
    for (const auto *set : {&train, &test}) {
        REQUIRE(set->aux.size() == set->size());
        for (std::size_t m = 0; m < set->size(); ++m) {
            double norm = 0.0;
            for (double a : set->features[m]) {
                norm += a * a;
            }
            CHECK_THAT(norm, WithinAbs(1.0, 1e-10));
            const auto [kappa, h] = set->aux[m];
            CHECK(annni_phase_label(kappa, h) == set->labels[m]);
            CHECK(annni_boundary_distance(kappa, h) > 1e-6);
        }
    }
}

// ---------------------------------------------------------------------------
// Files.

TEST_CASE("area resize examples", "[datasets]") {
    std::vector<double> img(28 * 28);
    for (std::size_t i = 0; i < img.size(); ++i) {
        img[i] = static_cast<double>(i % 17) / 16.0;
    }
    CHECK(resize_area(img, 28, 28, 28) == img);
    const std::vector<double> flat(28 * 28, 0.25);
    for (double v : resize_area(flat, 28, 28, 7)) {
        CHECK_THAT(v, WithinAbs(0.25, 1e-15));
    }
    std::vector<double> checker(16);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            checker[r * 4 + c] = (r + c) % 2;
        }
    }
    for (double v : resize_area(checker, 4, 4, 2)) {
        CHECK_THAT(v, WithinAbs(0.5, 1e-15));
    }
}

TEST_CASE("IDX loading filters classes and scales pixels", "[datasets]") {
    const auto images = scratch("images.idx");
    const auto labels = scratch("labels.idx");
    {
        std::ofstream out(images, std::ios::binary);
        put_be32(out, 0x00000803);
        put_be32(out, 3);
        put_be32(out, 2);
        put_be32(out, 2);
        const unsigned char px[12] = {0, 255, 255, 0, 51, 51, 51, 51, 255, 255, 255, 255};
        out.write(reinterpret_cast<const char *>(px), 12);
    }
    {
        std::ofstream out(labels, std::ios::binary);
        put_be32(out, 0x00000801);
        put_be32(out, 3);
        const unsigned char lb[3] = {7, 2, 7};
        out.write(reinterpret_cast<const char *>(lb), 3);
    }
    const auto all = load_idx(images, labels);
    CHECK(all.size() == 3);
    CHECK(all.class_values == std::vector<int>{2, 7});
    CHECK(all.labels == std::vector<int>{1, 0, 1});
    CHECK_THAT(all.features[1][0], WithinAbs(0.2, 1e-15));
    IdxOptions opt;
    opt.classes = {7};
    opt.resize = 1;
    const auto sevens = load_idx(images, labels, opt);
    CHECK(sevens.size() == 2);
    CHECK_THAT(sevens.features[0][0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(sevens.features[1][0], WithinAbs(1.0, 1e-15));

    {
        std::ofstream out(labels, std::ios::binary);
        put_be32(out, 0x00000803);
    }
    CHECK_THROWS_AS(load_idx(images, labels), FormatError);
}

TEST_CASE("CSV round trip is exact", "[datasets]") {
    SyntheticSpec spec;
    spec.per_class_train = 5;
    spec.per_class_test = 2;
    const auto [train, test] = gen_synthetic(spec, 17);
    const auto path = scratch("train.csv");
    write_dataset(path, train);
    const auto back = read_dataset(path);
    CHECK(back.features == train.features);
    CHECK(back.labels == train.labels);
    CHECK(back.class_values == train.class_values);
    CHECK(back.seed == train.seed);

    std::ofstream(scratch("bad.csv")) << "# d=2 K=2\n0.1,x,1\n";
    CHECK_THROWS_AS(read_dataset(scratch("bad.csv")), FormatError);
}
