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
#include <string>
#include <vector>

namespace tdtree {

enum class NoiseKind { None, GeneralizedAmplitudeDamping, Depolarizing, Reset };

/// Single-qubit noise model. `gamma` is only meaningful for GAD.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double gamma = 0.0;
    double p = 0.0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec gad(double gamma, double p) {
        return {NoiseKind::GeneralizedAmplitudeDamping, gamma, p};
    }
    static NoiseSpec depolarizing(double p) { return {NoiseKind::Depolarizing, 0.0, p}; }
    static NoiseSpec reset(double p) { return {NoiseKind::Reset, 0.0, p}; }

    [[nodiscard]] bool is_noiseless() const { return kind == NoiseKind::None; }
    /// Throws InvariantError when a parameter lies outside [0, 1].
    void validate() const;
    [[nodiscard]] std::string describe() const;
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string &name);

/**
 * Kraus operators of the channel.
 *
 * GAD keeps the labelling E0 = sqrt(p)[[0, sqrt(g)], [0, 0]],
 * E1 = sqrt(p) diag(1, sqrt(1-g)), E2 = sqrt(1-p) diag(sqrt(1-g), 1),
 * E3 = sqrt(1-p)[[0, 0], [sqrt(g), 0]]. Depolarizing returns
 * {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}; reset returns
 * {sqrt(1-p) I, sqrt(p)|0><0|, sqrt(p)|0><1|}; None returns {I}.
 */
std::vector<CMatrix> kraus_ops(const NoiseSpec &spec);

/// Sum_i E_i^dagger E_i.
CMatrix kraus_completeness(const std::vector<CMatrix> &ops);

/**
 * @brief A single-qubit channel in superoperator form.
 *
 * Acts on 2x2 blocks of a register operator: vec(B') = S vec(B) with row-major
 * vec. Works on any operator, not only density matrices, so the same object
 * propagates states forward and observables backward (Heisenberg picture).
 */
class QubitChannel {
  public:
    explicit QubitChannel(const NoiseSpec &spec);

    [[nodiscard]] bool is_identity() const { return identity_; }

    /// m <- sum_i E_i m E_i^dagger on `qubit`.
    void apply(CMatrix &m, std::size_t qubit, std::size_t n_qubits) const;
    /// m <- sum_i E_i^dagger m E_i on `qubit`.
    void apply_adjoint(CMatrix &m, std::size_t qubit, std::size_t n_qubits) const;

  private:
    using Superop = std::array<cplx, 16>;
    static void apply_superop(const Superop &s, CMatrix &m, std::size_t qubit,
                              std::size_t n_qubits);

    bool identity_;
    Superop forward_{};
    Superop adjoint_{};
};

/// Channel applied to one qubit of a density matrix.
DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseSpec &spec, std::size_t qubit);

} // namespace tdtree
