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

#include <span>
#include <string>
#include <vector>

namespace tdtree {

enum class EncodingKind { Amplitude, Angle, RawState };

/// Gate choice for angle encoding. Alternating uses Ry on even passes over the
/// register and Rx on odd passes.
enum class AngleGates { Alternating, AllRy, AllRx };

struct EncodingSpec {
    EncodingKind kind = EncodingKind::Amplitude;
    AngleGates angle_gates = AngleGates::Alternating;

    static EncodingSpec amplitude() { return {EncodingKind::Amplitude, AngleGates::Alternating}; }
    static EncodingSpec angle(AngleGates gates = AngleGates::Alternating) {
        return {EncodingKind::Angle, gates};
    }
    static EncodingSpec raw_state() { return {EncodingKind::RawState, AngleGates::Alternating}; }

    [[nodiscard]] std::string describe() const;
};

EncodingKind encoding_kind_from_string(const std::string &name);
AngleGates angle_gates_from_string(const std::string &name);
std::string to_string(EncodingKind kind);
std::string to_string(AngleGates gates);

/**
 * Feature vector to an n-qubit pure state.
 *
 * Amplitude: zero-pad to 2^n and normalize; rejects the zero vector and
 * lengths above 2^n. Angle: feature i rotates qubit i mod n of |0...0> by
 * its value, in feature order. RawState: the features are the real
 * amplitudes, length exactly 2^n and unit norm.
 */
StateVector encode(std::span<const double> x, const EncodingSpec &spec, std::size_t n_qubits);

std::vector<StateVector> encode_all(std::span<const std::vector<double>> xs,
                                    const EncodingSpec &spec, std::size_t n_qubits);

} // namespace tdtree
