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

#include "tdtree/channels.hpp"
#include "tdtree/qcore.hpp"
#include "tdtree/random.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tdtree {

/// Ry(theta) = exp(-i theta Y / 2)
Mat2 ry_gate(double theta);
/// Rx(theta) = exp(-i theta X / 2)
Mat2 rx_gate(double theta);
/// Rz(theta) = exp(-i theta Z / 2)
Mat2 rz_gate(double theta);

enum class GateKind { Rz, Ry, Cnot };

struct Gate {
    GateKind kind;
    std::size_t qubit;       // target for CNOT
    std::size_t control = 0; // CNOT only
    std::size_t param = 0;   // rotations only
};

/**
 * @brief Layered hardware-efficient ansatz.
 *
 * Each layer applies Rz, Ry, Rz to every qubit and then a ring of CNOTs
 * q -> (q + 1) mod n for q = 0..n-1 (no CNOT for a single qubit, both
 * directions for two). Parameter (layer, qubit, k) sits at
 * layer * 3n + 3 * qubit + k with k = 0, 1, 2 in application order.
 */
class Ansatz {
  public:
    Ansatz(std::size_t n_qubits, std::size_t layers);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t layers() const { return layers_; }
    [[nodiscard]] std::size_t dim() const { return std::size_t{1} << n_qubits_; }
    [[nodiscard]] std::size_t param_count() const { return 3 * n_qubits_ * layers_; }
    [[nodiscard]] std::size_t param_index(std::size_t layer, std::size_t qubit,
                                          std::size_t k) const {
        return layer * 3 * n_qubits_ + 3 * qubit + k;
    }

    /// Gate sequence in application order.
    [[nodiscard]] std::vector<Gate> gate_plan() const;
    /// CNOT (control, target) pairs of one layer in application order.
    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> ring() const;

  private:
    std::size_t n_qubits_;
    std::size_t layers_;
};

/// Circuit angles in radians.
class ParamVector {
  public:
    ParamVector() = default;
    /// Throws InvariantError on non-finite values.
    explicit ParamVector(std::vector<double> values);

    static ParamVector zeros(std::size_t count) { return ParamVector(std::vector<double>(count)); }
    /// I.i.d. standard normal entries.
    static ParamVector gaussian(std::size_t count, Rng &rng);

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double &operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }

  private:
    std::vector<double> values_;
};

/// Measured operator: Pauli Z on one qubit, a basis projector |k><k|, or an
/// arbitrary Hermitian matrix.
class Observable {
  public:
    enum class Kind { PauliZ, Projector, Matrix };

    static Observable z(std::size_t qubit = 0) { return Observable(Kind::PauliZ, qubit, {}); }
    static Observable projector(std::size_t index) {
        return Observable(Kind::Projector, index, {});
    }
    /// Throws InvariantError unless `m` is square and Hermitian.
    static Observable hermitian(CMatrix m);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t index() const { return index_; }
    /// Dense matrix on an n-qubit register.
    [[nodiscard]] CMatrix matrix(std::size_t n_qubits) const;

  private:
    Observable(Kind kind, std::size_t index, CMatrix m)
        : kind_(kind), index_(index), matrix_(std::move(m)) {}

    Kind kind_;
    std::size_t index_;
    CMatrix matrix_;
};

/// Rz(c) Ry(b) Rz(a) for the rotation triple of (layer, qubit).
Mat2 rotation_block(const Ansatz &ansatz, const ParamVector &theta, std::size_t layer,
                    std::size_t qubit);

StateVector apply_circuit(const StateVector &state, const Ansatz &ansatz,
                          const ParamVector &theta);

/// Noisy evolution applies the channel to every qubit after each layer's CNOT ring.
DensityMatrix apply_circuit_dm(const DensityMatrix &rho, const Ansatz &ansatz,
                               const ParamVector &theta, const NoiseSpec &noise = {});

/// Dense U(theta) built column by column from basis states.
CMatrix circuit_unitary(const Ansatz &ansatz, const ParamVector &theta);

double expectation(const StateVector &state, const Observable &observable);
double expectation(const DensityMatrix &rho, const Observable &observable);

/// d/dtheta_j <O> by the two-term shift rule with shifts of +-pi/2.
std::vector<double> param_shift_grad(const StateVector &state, const Ansatz &ansatz,
                                     const ParamVector &theta, const Observable &observable);
std::vector<double> param_shift_grad(const DensityMatrix &rho, const Ansatz &ansatz,
                                     const ParamVector &theta, const Observable &observable,
                                     const NoiseSpec &noise = {});

// ---------------------------------------------------------------------------
// Batched evaluation used by the learners.
//
// h(rho) = Tr[O Phi(rho)] is linear in rho, so every sample can be scored
// against the Heisenberg-picture observable Phi^dagger(O), and a weighted sum
// of per-sample gradients equals the gradient for the weighted sum of inputs.

/// Ansatz plus the noise model it runs under.
struct CircuitModel {
    Ansatz ansatz;
    NoiseSpec noise;
};

/// Phi^dagger(O): the observable pulled back through the whole (noisy) circuit.
CMatrix heisenberg_observable(const CircuitModel &model, const ParamVector &theta,
                              const CMatrix &observable);

/// Re <psi|O|psi>.
double expectation_value(const CMatrix &observable, const StateVector &state);

struct ValueGrad {
    double value;
    std::vector<double> grad;
};

/**
 * @brief Tr[O Phi_theta(R)] and its gradient for a Hermitian input R.
 *
 * One forward sweep records the operator after each layer's rotations, one
 * backward sweep carries O through the adjoint channels; the derivative of a
 * rotation with generator G is (i/2) Tr[G [O', R']]. The result matches the
 * parameter-shift rule exactly (including under noise, which only adds fixed
 * channels between the rotations).
 */
ValueGrad adjoint_value_grad(const CircuitModel &model, const ParamVector &theta,
                             const CMatrix &observable, const CMatrix &input);

/// Table [observable][sample] of expectation values.
std::vector<std::vector<double>> expectation_table(const CircuitModel &model,
                                                   const ParamVector &theta,
                                                   std::span<const CMatrix> observables,
                                                   std::span<const StateVector> states);

} // namespace tdtree
