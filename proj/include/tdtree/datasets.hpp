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

#include "tdtree/qcore.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tdtree {

/**
 * @brief Classical samples with dense integer labels.
 *
 * Labels lie in [0, class_count). class_values[k] is the raw label that dense
 * label k stands for (ascending); bitwise coding uses the raw values.
 */
struct LabeledSet {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::size_t class_count = 0;
    std::vector<int> class_values;
    std::string generator;
    std::uint64_t seed = 0;
    /// Free-form generator details (interval assignment, resize method, ...).
    std::string provenance;
    /// Optional per-sample coordinates; ANNNI stores (kappa, h).
    std::vector<std::array<double, 2>> aux;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
    [[nodiscard]] std::vector<std::size_t> class_counts() const;
    /// Throws InvariantError when any invariant fails.
    void validate() const;
};

struct SyntheticSpec {
    std::size_t dim = 4;
    std::size_t per_class_train = 200;
    std::size_t per_class_test = 100;
    std::size_t classes = 3;
    /// Number of equal subintervals of [0, 2pi); 0 selects max(8, classes).
    std::size_t intervals = 0;
};

/**
 * Interval-coded synthetic data. [0, 2pi) is cut into equal subintervals, one
 * shuffled assignment maps them to classes (every class gets at least one),
 * and each sample draws all coordinates i.i.d. uniform in one subinterval of
 * its class. Train and test use separate random streams.
 */
std::pair<LabeledSet, LabeledSet> gen_synthetic(const SyntheticSpec &spec, std::uint64_t seed);

/// Class of each subinterval as drawn by gen_synthetic.
std::vector<int> synthetic_assignment(const SyntheticSpec &spec, std::uint64_t seed);

/// H = -(sum X_i X_{i+1} - kappa sum X_i X_{i+2} + h sum Z_i), open chain.
CMatrix annni_hamiltonian(std::size_t n_qubits, double kappa, double h);

/// Ferromagnetic/paramagnetic boundary for kappa < 1/2; equals 1 at kappa = 0.
double annni_h_ising(double kappa);
/// Antiphase/paramagnetic boundary for kappa >= 1/2.
double annni_h_commensurate(double kappa);

/// 0 antiphase, 1 ferromagnetic, 2 paramagnetic.
int annni_phase_label(double kappa, double h);
/// |h - h_boundary| for the boundary that decides the label at kappa.
double annni_boundary_distance(double kappa, double h);

struct AnnniSpec {
    std::size_t n_qubits = 6;
    std::size_t per_class_train = 200;
    std::size_t per_class_test = 100;
    double kappa_min = 0.0;
    double kappa_max = 0.99;
    double h_min = 0.0;
    double h_max = 2.0;
    /// Draw budget per split as a multiple of the split's total quota.
    std::size_t budget_factor = 200;
};

/// Ground states on a uniform (kappa, h) grid-free draw, with per-phase quotas.
/// Features are the real ground-state amplitudes; aux holds (kappa, h).
std::pair<LabeledSet, LabeledSet> gen_annni(const AnnniSpec &spec, std::uint64_t seed);

struct IdxOptions {
    /// Output side length; 0 keeps the native size.
    std::size_t resize = 0;
    /// Raw labels to keep; empty keeps all.
    std::vector<int> classes;
};

/// Big-endian IDX images (0x00000803) and labels (0x00000801). Pixels are
/// scaled to [0, 1] and area-averaged to the requested size.
LabeledSet load_idx(const std::filesystem::path &images, const std::filesystem::path &labels,
                    const IdxOptions &options = {});

/// Area-averaging resize of a rows x cols image to out x out.
std::vector<double> resize_area(const std::vector<double> &image, std::size_t rows,
                                std::size_t cols, std::size_t out);

/// One CSV record per sample: features at 17 significant digits, then the raw label.
void write_dataset(const std::filesystem::path &path, const LabeledSet &set);
LabeledSet read_dataset(const std::filesystem::path &path);

} // namespace tdtree
