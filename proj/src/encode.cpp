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

#include "tdtree/encode.hpp"

#include "tdtree/circuit.hpp"
#include "tdtree/error.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <cmath>

namespace tdtree {

std::string to_string(EncodingKind kind) {
    switch (kind) {
    case EncodingKind::Amplitude:
        return "amplitude";
    case EncodingKind::Angle:
        return "angle";
    case EncodingKind::RawState:
        return "raw_state";
    }
    return "?";
}

std::string to_string(AngleGates gates) {
    switch (gates) {
    case AngleGates::Alternating:
        return "alternating";
    case AngleGates::AllRy:
        return "ry";
    case AngleGates::AllRx:
        return "rx";
    }
    return "?";
}

EncodingKind encoding_kind_from_string(const std::string &name) {
    if (name == "amplitude") {
        return EncodingKind::Amplitude;
    }
    if (name == "angle") {
        return EncodingKind::Angle;
    }
    if (name == "raw_state" || name == "raw") {
        return EncodingKind::RawState;
    }
    throw ConfigError(fmt::format("unknown encoding '{}'", name));
}

AngleGates angle_gates_from_string(const std::string &name) {
    if (name == "alternating") {
        return AngleGates::Alternating;
    }
    if (name == "ry") {
        return AngleGates::AllRy;
    }
    if (name == "rx") {
        return AngleGates::AllRx;
    }
    throw ConfigError(fmt::format("unknown angle gate set '{}'", name));
}

std::string EncodingSpec::describe() const {
    if (kind == EncodingKind::Angle) {
        return fmt::format("angle(gates={}, qubit=i mod n)", to_string(angle_gates));
    }
    return to_string(kind);
}

StateVector encode(std::span<const double> x, const EncodingSpec &spec, std::size_t n_qubits) {
    if (n_qubits == 0 || n_qubits > tol::max_qubits) {
        throw CapacityError(fmt::format("encoding needs 1..{} qubits", tol::max_qubits));
    }
    const std::size_t d = std::size_t{1} << n_qubits;
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw InvariantError("non-finite feature value");
        }
    }
    switch (spec.kind) {
    case EncodingKind::Amplitude: {
        if (x.size() > d) {
            throw DimensionError(
                fmt::format("{} features exceed the {} amplitudes of {} qubits", x.size(), d, n_qubits));
        }
        double norm2 = 0.0;
        for (double v : x) {
            norm2 += v * v;
        }
        if (norm2 == 0.0) {
            throw InvariantError("amplitude encoding of the zero vector");
        }
        const double inv = 1.0 / std::sqrt(norm2);
        std::vector<cplx> amps(d);
        for (std::size_t i = 0; i < x.size(); ++i) {
            amps[i] = x[i] * inv;
        }
        return StateVector(n_qubits, std::move(amps));
    }
    case EncodingKind::Angle: {
        std::vector<cplx> amps(d);
        amps[0] = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t pass = i / n_qubits;
            const bool use_ry = spec.angle_gates == AngleGates::AllRy ||
                          (spec.angle_gates == AngleGates::Alternating && pass % 2 == 0);
            apply_1q(amps, use_ry ? ry_gate(x[i]) : rx_gate(x[i]), i % n_qubits, n_qubits);
        }
        return StateVector(n_qubits, std::move(amps));
    }
    case EncodingKind::RawState: {
        if (x.size() != d) {
            throw DimensionError(
                fmt::format("raw state of length {} for {} qubits", x.size(), n_qubits));
        }
        return StateVector(n_qubits, std::vector<cplx>(x.begin(), x.end()));
    }
    }
    throw InvariantError("unknown encoding kind");
}

std::vector<StateVector> encode_all(std::span<const std::vector<double>> xs,
                                    const EncodingSpec &spec, std::size_t n_qubits) {
    std::vector<StateVector> out;
    out.reserve(xs.size());
    for (const auto &x : xs) {
        out.push_back(encode(x, spec, n_qubits));
    }
    return out;
}

} // namespace tdtree
