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

#include "tdtree/channels.hpp"

#include "tdtree/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace tdtree {

namespace {

void check_unit_interval(double value, const char *name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvariantError(fmt::format("noise parameter {} = {} outside [0, 1]", name, value));
    }
}

} // namespace

void NoiseSpec::validate() const {
    switch (kind) {
    case NoiseKind::None:
        return;
    case NoiseKind::GeneralizedAmplitudeDamping:
        check_unit_interval(gamma, "gamma");
        check_unit_interval(p, "p");
        return;
    case NoiseKind::Depolarizing:
    case NoiseKind::Reset:
        check_unit_interval(p, "p");
        return;
    }
}

std::string NoiseSpec::describe() const {
    switch (kind) {
    case NoiseKind::None:
        return "none";
    case NoiseKind::GeneralizedAmplitudeDamping:
        return fmt::format("gad(gamma={}, p={})", gamma, p);
    case NoiseKind::Depolarizing:
        return fmt::format("depolarizing(p={})", p);
    case NoiseKind::Reset:
        return fmt::format("reset(p={})", p);
    }
    return "?";
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::None:
        return "none";
    case NoiseKind::GeneralizedAmplitudeDamping:
        return "gad";
    case NoiseKind::Depolarizing:
        return "depolarizing";
    case NoiseKind::Reset:
        return "reset";
    }
    return "?";
}

NoiseKind noise_kind_from_string(const std::string &name) {
    if (name == "none") {
        return NoiseKind::None;
    }
    if (name == "gad" || name == "generalized_amplitude_damping") {
        return NoiseKind::GeneralizedAmplitudeDamping;
    }
    if (name == "depolarizing") {
        return NoiseKind::Depolarizing;
    }
    if (name == "reset") {
        return NoiseKind::Reset;
    }
    throw ConfigError(fmt::format("unknown noise kind '{}'", name));
}

std::vector<CMatrix> kraus_ops(const NoiseSpec &spec) {
    spec.validate();
    const double p = spec.p;
    switch (spec.kind) {
    case NoiseKind::None:
        return {CMatrix::identity(2)};
    case NoiseKind::GeneralizedAmplitudeDamping: {
        const double g = spec.gamma;
        const double sp = std::sqrt(p);
        const double sq = std::sqrt(1.0 - p);
        return {
            CMatrix(2, 2, {0.0, sp * std::sqrt(g), 0.0, 0.0}),
            CMatrix(2, 2, {sp, 0.0, 0.0, sp * std::sqrt(1.0 - g)}),
            CMatrix(2, 2, {sq * std::sqrt(1.0 - g), 0.0, 0.0, sq}),
            CMatrix(2, 2, {0.0, 0.0, sq * std::sqrt(g), 0.0}),
        };
    }
    case NoiseKind::Depolarizing: {
        const cplx a = std::sqrt(1.0 - 0.75 * p);
        const cplx b = std::sqrt(0.25 * p);
        return {CMatrix::identity(2) * a, pauli_x() * b, pauli_y() * b, pauli_z() * b};
    }
    case NoiseKind::Reset: {
        const double sp = std::sqrt(p);
        return {
            CMatrix::identity(2) * cplx{std::sqrt(1.0 - p), 0.0},
            CMatrix(2, 2, {sp, 0.0, 0.0, 0.0}),
            CMatrix(2, 2, {0.0, sp, 0.0, 0.0}),
        };
    }
    }
    return {};
}

CMatrix kraus_completeness(const std::vector<CMatrix> &ops) {
    CMatrix sum(2, 2);
    for (const auto &e : ops) {
        sum += e.adjoint() * e;
    }
    return sum;
}

QubitChannel::QubitChannel(const NoiseSpec &spec) : identity_(spec.is_noiseless()) {
    const auto ops = kraus_ops(spec);
    // S[(a,c),(b,d)] = sum_i E[a,b] conj(E[c,d]);  S_adj[(a,c),(b,d)] = sum_i conj(E[b,a]) E[d,c]
    for (const auto &e : ops) {
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t c = 0; c < 2; ++c) {
                for (std::size_t b = 0; b < 2; ++b) {
                    for (std::size_t d = 0; d < 2; ++d) {
                        const std::size_t idx = (a * 2 + c) * 4 + (b * 2 + d);
                        forward_[idx] += e(a, b) * std::conj(e(c, d));
                        adjoint_[idx] += std::conj(e(b, a)) * e(d, c);
                    }
                }
            }
        }
    }
}

void QubitChannel::apply_superop(const Superop &s, CMatrix &m, std::size_t qubit,
                                 std::size_t n_qubits) {
    const std::size_t mask = qubit_mask(qubit, n_qubits);
    const std::size_t d = m.rows();
    for (std::size_t i = 0; i < d; ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
            if ((j & mask) != 0) {
                continue;
            }
            cplx &b00 = m(i, j);
            cplx &b01 = m(i, j | mask);
            cplx &b10 = m(i | mask, j);
            cplx &b11 = m(i | mask, j | mask);
            const std::array<cplx, 4> b{b00, b01, b10, b11};
            std::array<cplx, 4> out{};
            for (std::size_t r = 0; r < 4; ++r) {
                out[r] = s[r * 4] * b[0] + s[r * 4 + 1] * b[1] + s[r * 4 + 2] * b[2] +
                         s[r * 4 + 3] * b[3];
            }
            b00 = out[0];
            b01 = out[1];
            b10 = out[2];
            b11 = out[3];
        }
    }
}

void QubitChannel::apply(CMatrix &m, std::size_t qubit, std::size_t n_qubits) const {
    if (!identity_) {
        apply_superop(forward_, m, qubit, n_qubits);
    }
}

void QubitChannel::apply_adjoint(CMatrix &m, std::size_t qubit, std::size_t n_qubits) const {
    if (!identity_) {
        apply_superop(adjoint_, m, qubit, n_qubits);
    }
}

DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseSpec &spec, std::size_t qubit) {
    if (qubit >= rho.n_qubits()) {
        throw DimensionError(
            fmt::format("qubit {} outside a {}-qubit state", qubit, rho.n_qubits()));
    }
    const QubitChannel channel(spec);
    CMatrix m = rho.matrix();
    channel.apply(m, qubit, rho.n_qubits());
    return DensityMatrix(std::move(m));
}

} // namespace tdtree
