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

#include "tdtree/circuit.hpp"

#include "tdtree/error.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace tdtree {

Mat2 ry_gate(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {c, -s, s, c};
}

Mat2 rx_gate(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {c, cplx{0.0, -s}, cplx{0.0, -s}, c};
}

Mat2 rz_gate(double theta) {
    const cplx e = std::polar(1.0, -theta / 2.0);
    return {e, 0.0, 0.0, std::conj(e)};
}

Ansatz::Ansatz(std::size_t n_qubits, std::size_t layers) : n_qubits_(n_qubits), layers_(layers) {
    if (n_qubits == 0 || n_qubits > tol::max_qubits) {
        throw CapacityError(
            fmt::format("ansatz needs 1..{} qubits, got {}", tol::max_qubits, n_qubits));
    }
}

std::vector<std::pair<std::size_t, std::size_t>> Ansatz::ring() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (n_qubits_ < 2) {
        return out;
    }
    for (std::size_t q = 0; q < n_qubits_; ++q) {
        out.emplace_back(q, (q + 1) % n_qubits_);
    }
    return out;
}

std::vector<Gate> Ansatz::gate_plan() const {
    std::vector<Gate> plan;
    const auto cnots = ring();
    for (std::size_t l = 0; l < layers_; ++l) {
        for (std::size_t q = 0; q < n_qubits_; ++q) {
            plan.push_back({GateKind::Rz, q, 0, param_index(l, q, 0)});
            plan.push_back({GateKind::Ry, q, 0, param_index(l, q, 1)});
            plan.push_back({GateKind::Rz, q, 0, param_index(l, q, 2)});
        }
        for (const auto &[c, t] : cnots) {
            plan.push_back({GateKind::Cnot, t, c, 0});
        }
    }
    return plan;
}

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvariantError("non-finite circuit parameter");
        }
    }
}

ParamVector ParamVector::gaussian(std::size_t count, Rng &rng) {
    std::vector<double> v(count);
    for (auto &x : v) {
        x = rng.normal();
    }
    return ParamVector(std::move(v));
}

Observable Observable::hermitian(CMatrix m) {
    if (!m.is_square() || m.rows() == 0) {
        throw InvariantError("observable must be a non-empty square matrix");
    }
    if (m.hermitian_defect() > tol::input_hermitian) {
        throw InvariantError(
            fmt::format("observable is not Hermitian (defect {:.3e})", m.hermitian_defect()));
    }
    return Observable(Kind::Matrix, 0, std::move(m));
}

CMatrix Observable::matrix(std::size_t n_qubits) const {
    const std::size_t d = std::size_t{1} << n_qubits;
    switch (kind_) {
    case Kind::PauliZ: {
        if (index_ >= n_qubits) {
            throw DimensionError(fmt::format("Z on qubit {} of a {}-qubit register", index_, n_qubits));
        }
        const std::size_t mask = qubit_mask(index_, n_qubits);
        CMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            m(i, i) = (i & mask) != 0 ? -1.0 : 1.0;
        }
        return m;
    }
    case Kind::Projector: {
        if (index_ >= d) {
            throw DimensionError(fmt::format("projector |{}> on dimension {}", index_, d));
        }
        CMatrix m(d, d);
        m(index_, index_) = 1.0;
        return m;
    }
    case Kind::Matrix:
        if (matrix_.rows() != d) {
            throw DimensionError(
                fmt::format("observable of dimension {} on a {}-qubit register", matrix_.rows(), n_qubits));
        }
        return matrix_;
    }
    return {};
}

Mat2 rotation_block(const Ansatz &ansatz, const ParamVector &theta, std::size_t layer,
                    std::size_t qubit) {
    const double a = theta[ansatz.param_index(layer, qubit, 0)];
    const double b = theta[ansatz.param_index(layer, qubit, 1)];
    const double c = theta[ansatz.param_index(layer, qubit, 2)];
    return mat2_mul(rz_gate(c), mat2_mul(ry_gate(b), rz_gate(a)));
}

namespace {

void check_params(const Ansatz &ansatz, const ParamVector &theta) {
    if (theta.size() != ansatz.param_count()) {
        throw DimensionError(fmt::format("ansatz takes {} parameters, got {}",
                                         ansatz.param_count(), theta.size()));
    }
}

void check_register(std::size_t n_state, const Ansatz &ansatz) {
    if (n_state != ansatz.n_qubits()) {
        throw DimensionError(fmt::format("{}-qubit state for a {}-qubit ansatz", n_state,
                                         ansatz.n_qubits()));
    }
}

void evolve_amplitudes(std::span<cplx> amps, const Ansatz &ansatz, const ParamVector &theta) {
    const std::size_t n = ansatz.n_qubits();
    const auto cnots = ansatz.ring();
    for (std::size_t l = 0; l < ansatz.layers(); ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            apply_1q(amps, rotation_block(ansatz, theta, l, q), q, n);
        }
        for (const auto &[c, t] : cnots) {
            apply_cnot(amps, c, t, n);
        }
    }
}

void rotate_operator(CMatrix &m, const Mat2 &u, std::size_t q, std::size_t n) {
    apply_1q_left(m, u, q, n);
    apply_1q_right(m, mat2_adjoint(u), q, n);
}

void forward_layer_tail(CMatrix &m, const std::vector<std::pair<std::size_t, std::size_t>> &cnots,
                        const QubitChannel &channel, std::size_t n) {
    for (const auto &[c, t] : cnots) {
        apply_cnot_conj(m, c, t, n);
    }
    if (!channel.is_identity()) {
        for (std::size_t q = 0; q < n; ++q) {
            channel.apply(m, q, n);
        }
    }
}

void backward_layer_tail(CMatrix &o, const std::vector<std::pair<std::size_t, std::size_t>> &cnots,
                         const QubitChannel &channel, std::size_t n) {
    if (!channel.is_identity()) {
        for (std::size_t q = n; q-- > 0;) {
            channel.apply_adjoint(o, q, n);
        }
    }
    for (auto it = cnots.rbegin(); it != cnots.rend(); ++it) {
        apply_cnot_conj(o, it->first, it->second, n);
    }
}

double real_trace_product(const CMatrix &a, const CMatrix &b) {
    // Re Tr[a b] for Hermitian a, b: sum_ij a_ij conj(b_ij).
    double s = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        s += da[i].real() * db[i].real() + da[i].imag() * db[i].imag();
    }
    return s;
}

} // namespace

StateVector apply_circuit(const StateVector &state, const Ansatz &ansatz,
                          const ParamVector &theta) {
    check_params(ansatz, theta);
    check_register(state.n_qubits(), ansatz);
    std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
    evolve_amplitudes(amps, ansatz, theta);
    return StateVector(state.n_qubits(), std::move(amps));
}

DensityMatrix apply_circuit_dm(const DensityMatrix &rho, const Ansatz &ansatz,
                               const ParamVector &theta, const NoiseSpec &noise) {
    check_params(ansatz, theta);
    check_register(rho.n_qubits(), ansatz);
    const QubitChannel channel(noise);
    const std::size_t n = ansatz.n_qubits();
    const auto cnots = ansatz.ring();
    CMatrix m = rho.matrix();
    for (std::size_t l = 0; l < ansatz.layers(); ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            rotate_operator(m, rotation_block(ansatz, theta, l, q), q, n);
        }
        forward_layer_tail(m, cnots, channel, n);
    }
    return DensityMatrix(std::move(m));
}

CMatrix circuit_unitary(const Ansatz &ansatz, const ParamVector &theta) {
    check_params(ansatz, theta);
    const std::size_t d = ansatz.dim();
    CMatrix u(d, d);
    std::vector<cplx> col(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(col.begin(), col.end(), cplx{});
        col[j] = 1.0;
        evolve_amplitudes(col, ansatz, theta);
        for (std::size_t i = 0; i < d; ++i) {
            u(i, j) = col[i];
        }
    }
    return u;
}

double expectation_value(const CMatrix &observable, const StateVector &state) {
    const auto a = state.amplitudes();
    if (observable.rows() != a.size() || !observable.is_square()) {
        throw DimensionError("observable and state dimensions differ");
    }
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        cplx row{};
        for (std::size_t j = 0; j < a.size(); ++j) {
            row += observable(i, j) * a[j];
        }
        s += std::conj(a[i]) * row;
    }
    return s.real();
}

double expectation(const StateVector &state, const Observable &observable) {
    const auto a = state.amplitudes();
    const std::size_t n = state.n_qubits();
    switch (observable.kind()) {
    case Observable::Kind::PauliZ: {
        if (observable.index() >= n) {
            throw DimensionError("Z qubit outside register");
        }
        const std::size_t mask = qubit_mask(observable.index(), n);
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += ((i & mask) != 0 ? -1.0 : 1.0) * std::norm(a[i]);
        }
        return s;
    }
    case Observable::Kind::Projector:
        if (observable.index() >= a.size()) {
            throw DimensionError("projector index outside register");
        }
        return std::norm(a[observable.index()]);
    case Observable::Kind::Matrix:
        return expectation_value(observable.matrix(n), state);
    }
    return 0.0;
}

double expectation(const DensityMatrix &rho, const Observable &observable) {
    return real_trace_product(observable.matrix(rho.n_qubits()), rho.matrix());
}

std::vector<double> param_shift_grad(const StateVector &state, const Ansatz &ansatz,
                                     const ParamVector &theta, const Observable &observable) {
    check_params(ansatz, theta);
    constexpr double shift = std::numbers::pi / 2.0;
    std::vector<double> grad(theta.size());
    ParamVector t = theta;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        t[j] = theta[j] + shift;
        const double plus = expectation(apply_circuit(state, ansatz, t), observable);
        t[j] = theta[j] - shift;
        const double minus = expectation(apply_circuit(state, ansatz, t), observable);
        t[j] = theta[j];
        grad[j] = 0.5 * (plus - minus);
    }
    return grad;
}

std::vector<double> param_shift_grad(const DensityMatrix &rho, const Ansatz &ansatz,
                                     const ParamVector &theta, const Observable &observable,
                                     const NoiseSpec &noise) {
    check_params(ansatz, theta);
    constexpr double shift = std::numbers::pi / 2.0;
    std::vector<double> grad(theta.size());
    ParamVector t = theta;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        t[j] = theta[j] + shift;
        const double plus = expectation(apply_circuit_dm(rho, ansatz, t, noise), observable);
        t[j] = theta[j] - shift;
        const double minus = expectation(apply_circuit_dm(rho, ansatz, t, noise), observable);
        t[j] = theta[j];
        grad[j] = 0.5 * (plus - minus);
    }
    return grad;
}

CMatrix heisenberg_observable(const CircuitModel &model, const ParamVector &theta,
                              const CMatrix &observable) {
    const Ansatz &ansatz = model.ansatz;
    check_params(ansatz, theta);
    if (observable.rows() != ansatz.dim() || !observable.is_square()) {
        throw DimensionError("observable does not match the ansatz register");
    }
    const QubitChannel channel(model.noise);
    const std::size_t n = ansatz.n_qubits();
    const auto cnots = ansatz.ring();
    CMatrix o = observable;
    for (std::size_t l = ansatz.layers(); l-- > 0;) {
        backward_layer_tail(o, cnots, channel, n);
        for (std::size_t q = n; q-- > 0;) {
            rotate_operator(o, mat2_adjoint(rotation_block(ansatz, theta, l, q)), q, n);
        }
    }
    return o;
}

namespace {

// Y = Tr_{other}[O R] as a 2x2 block on `qubit`, for Hermitian R.
Mat2 reduced_product(const CMatrix &o, const CMatrix &r, std::size_t qubit, std::size_t n) {
    const std::size_t mask = qubit_mask(qubit, n);
    const std::size_t d = o.rows();
    Mat2 y{};
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t a = (i & mask) != 0 ? 1 : 0;
        const std::size_t base = i & ~mask;
        const cplx *orow = &o(i, 0);
        for (std::size_t b = 0; b < 2; ++b) {
            // sum_k O(i,k) R(k, j) = sum_k O(i,k) conj(R(j,k))
            const cplx *rrow = &r(b != 0 ? (base | mask) : base, 0);
            cplx s{};
            for (std::size_t k = 0; k < d; ++k) {
                s += orow[k] * std::conj(rrow[k]);
            }
            y[a * 2 + b] += s;
        }
    }
    return y;
}

// (i/2) Tr[G X] with X = Y - Y^dagger.
double generator_derivative(const Mat2 &g, const Mat2 &x) {
    const cplx t = g[0] * x[0] + g[1] * x[2] + g[2] * x[1] + g[3] * x[3];
    return (cplx{0.0, 0.5} * t).real();
}

} // namespace

ValueGrad adjoint_value_grad(const CircuitModel &model, const ParamVector &theta,
                             const CMatrix &observable, const CMatrix &input) {
    const Ansatz &ansatz = model.ansatz;
    check_params(ansatz, theta);
    const std::size_t d = ansatz.dim();
    if (observable.rows() != d || !observable.is_square() || input.rows() != d ||
        !input.is_square()) {
        throw DimensionError("observable or input does not match the ansatz register");
    }
    const QubitChannel channel(model.noise);
    const std::size_t n = ansatz.n_qubits();
    const auto cnots = ansatz.ring();
    const std::size_t layers = ansatz.layers();

    std::vector<std::vector<Mat2>> blocks(layers, std::vector<Mat2>(n));
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            blocks[l][q] = rotation_block(ansatz, theta, l, q);
        }
    }

    // after_rot[l] = operator right after layer l's rotations.
    std::vector<CMatrix> after_rot;
    after_rot.reserve(layers);
    CMatrix r = input;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            rotate_operator(r, blocks[l][q], q, n);
        }
        after_rot.push_back(r);
        forward_layer_tail(r, cnots, channel, n);
    }

    ValueGrad out{real_trace_product(observable, r), std::vector<double>(theta.size())};

    const Mat2 y_pauli{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
    const Mat2 z_pauli{1.0, 0.0, 0.0, -1.0};
    CMatrix o = observable;
    for (std::size_t l = layers; l-- > 0;) {
        backward_layer_tail(o, cnots, channel, n);
        const CMatrix &rl = after_rot[l];
        for (std::size_t q = 0; q < n; ++q) {
            const Mat2 y = reduced_product(o, rl, q, n);
            const Mat2 yd = mat2_adjoint(y);
            const Mat2 x{y[0] - yd[0], y[1] - yd[1], y[2] - yd[2], y[3] - yd[3]};
            const Mat2 rzc = rz_gate(theta[ansatz.param_index(l, q, 2)]);
            const Mat2 v = mat2_mul(rzc, ry_gate(theta[ansatz.param_index(l, q, 1)]));
            const Mat2 g_a = mat2_mul(v, mat2_mul(z_pauli, mat2_adjoint(v)));
            const Mat2 g_b = mat2_mul(rzc, mat2_mul(y_pauli, mat2_adjoint(rzc)));
            out.grad[ansatz.param_index(l, q, 0)] = generator_derivative(g_a, x);
            out.grad[ansatz.param_index(l, q, 1)] = generator_derivative(g_b, x);
            out.grad[ansatz.param_index(l, q, 2)] = generator_derivative(z_pauli, x);
        }
        for (std::size_t q = n; q-- > 0;) {
            rotate_operator(o, mat2_adjoint(blocks[l][q]), q, n);
        }
    }
    return out;
}

std::vector<std::vector<double>> expectation_table(const CircuitModel &model,
                                                   const ParamVector &theta,
                                                   std::span<const CMatrix> observables,
                                                   std::span<const StateVector> states) {
    const Ansatz &ansatz = model.ansatz;
    check_params(ansatz, theta);
    const std::size_t d = ansatz.dim();
    const double n_obs = static_cast<double>(observables.size());
    // Per-sample cost: K quadratic forms against the pulled-back observables, or
    // one state-vector pass plus K diagonal reads when that is cheaper.
    const double heisenberg_cost = n_obs * static_cast<double>(d * d);
    std::vector<std::vector<double>> table(observables.size(),
                                           std::vector<double>(states.size()));
    bool all_diagonal = true;
    for (const auto &obs : observables) {
        for (std::size_t i = 0; i < d && all_diagonal; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (i != j && obs(i, j) != cplx{}) {
                    all_diagonal = false;
                    break;
                }
            }
        }
    }
    const double diag_forward_cost =
        6.0 * static_cast<double>(ansatz.layers() * ansatz.n_qubits() * d) + n_obs * d;
    if (model.noise.is_noiseless() && all_diagonal && diag_forward_cost < heisenberg_cost) {
        for (std::size_t m = 0; m < states.size(); ++m) {
            check_register(states[m].n_qubits(), ansatz);
            std::vector<cplx> amps(states[m].amplitudes().begin(), states[m].amplitudes().end());
            evolve_amplitudes(amps, ansatz, theta);
            for (std::size_t k = 0; k < observables.size(); ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    s += observables[k](i, i).real() * std::norm(amps[i]);
                }
                table[k][m] = s;
            }
        }
        return table;
    }
    for (std::size_t k = 0; k < observables.size(); ++k) {
        const CMatrix eff = heisenberg_observable(model, theta, observables[k]);
        for (std::size_t m = 0; m < states.size(); ++m) {
            check_register(states[m].n_qubits(), ansatz);
            table[k][m] = expectation_value(eff, states[m]);
        }
    }
    return table;
}

} // namespace tdtree
