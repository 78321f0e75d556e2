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

#include "tdtree/qcore.hpp"

#include "tdtree/error.hpp"
#include "tdtree/tolerances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdtree {

// ---------------------------------------------------------------- CMatrix

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw InvariantError(fmt::format("CMatrix: {} entries for a {}x{} matrix", data_.size(),
                                         rows_, cols_));
    }
    for (const auto &z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw InvariantError("CMatrix: non-finite entry");
        }
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

cplx CMatrix::trace() const {
    if (!is_square()) {
        throw DimensionError("trace of a non-square matrix");
    }
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto &z : data_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

double CMatrix::hermitian_defect() const {
    if (!is_square()) {
        throw DimensionError("Hermiticity of a non-square matrix");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        }
    }
    return worst;
}

CMatrix &CMatrix::operator+=(const CMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix sum shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix difference shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator*=(cplx scale) {
    for (auto &z : data_) {
        z *= scale;
    }
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
CMatrix operator*(CMatrix a, cplx scale) { return a *= scale; }
CMatrix operator*(cplx scale, CMatrix a) { return a *= scale; }

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) {
        throw DimensionError(
            fmt::format("matrix product {}x{} * {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_diff shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

std::size_t qubits_for_dim(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw DimensionError(fmt::format("dimension {} is not a power of two", dim));
    }
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    if (n > tol::max_qubits) {
        throw CapacityError(fmt::format("{} qubits exceeds the {}-qubit budget", n, tol::max_qubits));
    }
    return n;
}

// ---------------------------------------------------------------- states

StateVector::StateVector(std::size_t n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits_ > tol::max_qubits) {
        throw CapacityError(fmt::format("{} qubits exceeds the {}-qubit budget", n_qubits_,
                                        tol::max_qubits));
    }
    if (amplitudes_.size() != (std::size_t{1} << n_qubits_)) {
        throw DimensionError(fmt::format("state of {} qubits needs {} amplitudes, got {}",
                                         n_qubits_, std::size_t{1} << n_qubits_,
                                         amplitudes_.size()));
    }
    const double nrm = norm();
    if (!std::isfinite(nrm) || std::abs(nrm * nrm - 1.0) > tol::state_norm) {
        throw InvariantError(fmt::format("state vector is not normalized (norm^2 = {:.17g})",
                                         nrm * nrm));
    }
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    std::vector<cplx> amps(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    if (index >= amps.size()) {
        throw DimensionError(fmt::format("basis index {} out of range", index));
    }
    amps[index] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

DensityMatrix::DensityMatrix(CMatrix matrix) : n_qubits_(0), matrix_(std::move(matrix)) {
    if (!matrix_.is_square()) {
        throw DimensionError("density matrix must be square");
    }
    n_qubits_ = qubits_for_dim(matrix_.rows());
    if (matrix_.hermitian_defect() > tol::hermitian) {
        throw InvariantError(fmt::format("density matrix is not Hermitian (defect {:.3g})",
                                         matrix_.hermitian_defect()));
    }
    const cplx tr = matrix_.trace();
    if (std::abs(tr - cplx{1.0, 0.0}) > tol::trace) {
        throw InvariantError(fmt::format("density matrix trace is {:.17g}", tr.real()));
    }
}

DensityMatrix DensityMatrix::pure(const StateVector &state) {
    const auto amps = state.amplitudes();
    const std::size_t d = amps.size();
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            m(i, j) = amps[i] * std::conj(amps[j]);
        }
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
    const std::size_t d = std::size_t{1} << n_qubits;
    return DensityMatrix(CMatrix::identity(d) * cplx{1.0 / static_cast<double>(d), 0.0});
}

double DensityMatrix::min_eigenvalue() const { return eigvalsh(matrix_).front(); }

void DensityMatrix::check_positive() const {
    const double lo = min_eigenvalue();
    if (lo < -tol::psd) {
        throw InvariantError(fmt::format("density matrix has eigenvalue {:.3g}", lo));
    }
}

// ---------------------------------------------------------------- eigensolver

namespace {

struct SymmetricEigen {
    std::vector<double> values;  // unsorted, solver order
    std::vector<double> vectors; // column j = eigenvector of values[j], row-major n x n
};

/// Cyclic Jacobi on a dense real symmetric matrix (row-major, overwritten).
SymmetricEigen jacobi_symmetric(std::vector<double> a, std::size_t n, bool want_vectors) {
    SymmetricEigen out;
    if (want_vectors) {
        out.vectors.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors[i * n + i] = 1.0;
        }
    }
    auto at = [&](std::size_t r, std::size_t c) -> double & { return a[r * n + c]; };

    double total = 0.0;
    for (double x : a) {
        total += x * x;
    }
    const double threshold = tol::solver_convergence * std::sqrt(total);

    bool converged = false;
    for (int sweep = 0; sweep < tol::solver_max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * at(p, q) * at(p, q);
            }
        }
        if (std::sqrt(off) <= threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                at(p, p) -= t * apq;
                at(q, q) += t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) {
                        continue;
                    }
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    const double nkp = c * akp - s * akq;
                    const double nkq = s * akp + c * akq;
                    at(k, p) = nkp;
                    at(p, k) = nkp;
                    at(k, q) = nkq;
                    at(q, k) = nkq;
                }
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = out.vectors[k * n + p];
                        const double vkq = out.vectors[k * n + q];
                        out.vectors[k * n + p] = c * vkp - s * vkq;
                        out.vectors[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if (!converged) {
        throw RuntimeFailure("Jacobi eigensolver did not converge");
    }
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = at(i, i);
    }
    return out;
}

void require_hermitian(const CMatrix &h) {
    if (!h.is_square()) {
        throw InvariantError(fmt::format("eigensolver needs a square matrix, got {}x{}", h.rows(),
                                         h.cols()));
    }
    if (h.rows() == 0) {
        throw InvariantError("eigensolver needs a non-empty matrix");
    }
    double scale = 1.0;
    for (const auto &z : h.data()) {
        scale = std::max(scale, std::abs(z));
    }
    if (h.hermitian_defect() > tol::input_hermitian * scale) {
        throw InvariantError(
            fmt::format("eigensolver input is not Hermitian (defect {:.3g})", h.hermitian_defect()));
    }
}

bool is_real(const CMatrix &h) {
    return std::all_of(h.data().begin(), h.data().end(),
                       [](const cplx &z) { return z.imag() == 0.0; });
}

/// Real symmetric problem equivalent to the Hermitian one. Complex input maps to
/// [[A, -B], [B, A]] (each eigenvalue doubled); real input is solved directly,
/// which is the same computation on one diagonal block of that embedding.
struct RealProblem {
    std::vector<double> a;
    std::size_t n;
    bool doubled;
};

RealProblem to_real_problem(const CMatrix &h) {
    const std::size_t n = h.rows();
    if (is_real(h)) {
        std::vector<double> a(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a[i * n + j] = 0.5 * (h(i, j).real() + h(j, i).real());
            }
        }
        return {std::move(a), n, false};
    }
    const std::size_t m = 2 * n;
    std::vector<double> a(m * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx sym = 0.5 * (h(i, j) + std::conj(h(j, i)));
            a[i * m + j] = sym.real();
            a[(n + i) * m + (n + j)] = sym.real();
            a[i * m + (n + j)] = -sym.imag();
            a[(n + i) * m + j] = sym.imag();
        }
    }
    return {std::move(a), m, true};
}

std::vector<std::size_t> ascending_order(const std::vector<double> &values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    return order;
}

} // namespace

std::vector<double> eigvalsh(const CMatrix &h) {
    require_hermitian(h);
    auto problem = to_real_problem(h);
    const auto eig = jacobi_symmetric(std::move(problem.a), problem.n, false);
    std::vector<double> sorted = eig.values;
    std::sort(sorted.begin(), sorted.end());
    if (!problem.doubled) {
        return sorted;
    }
    std::vector<double> merged(h.rows());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        merged[i] = 0.5 * (sorted[2 * i] + sorted[2 * i + 1]);
    }
    return merged;
}

GroundState eigsh_ground(const CMatrix &h) {
    require_hermitian(h);
    const std::size_t n = h.rows();
    auto problem = to_real_problem(h);
    const std::size_t m = problem.n;
    const auto eig = jacobi_symmetric(std::move(problem.a), m, true);
    const std::size_t lowest = ascending_order(eig.values).front();

    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double re = eig.vectors[i * m + lowest];
        const double im = problem.doubled ? eig.vectors[(n + i) * m + lowest] : 0.0;
        v[i] = cplx{re, im};
    }
    double nrm = 0.0;
    double biggest = 0.0;
    for (const auto &z : v) {
        nrm += std::norm(z);
        biggest = std::max(biggest, std::abs(z));
    }
    nrm = std::sqrt(nrm);
    // Fix the global phase on the first component within rounding of the largest.
    cplx phase{1.0, 0.0};
    for (const auto &z : v) {
        if (std::abs(z) >= biggest - 1e-12) {
            phase = std::conj(z) / std::abs(z);
            break;
        }
    }
    for (auto &z : v) {
        z = z * phase / nrm;
    }
    return {eig.values[lowest], std::move(v)};
}

double trace_distance(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError(
            fmt::format("trace distance between dims {} and {}", a.dim(), b.dim()));
    }
    // Canonical operand order makes the result bitwise symmetric.
    const auto less = [](const CMatrix &x, const CMatrix &y) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) {
                const cplx u = x(i, j);
                const cplx v = y(i, j);
                if (u.real() != v.real()) {
                    return u.real() < v.real();
                }
                if (u.imag() != v.imag()) {
                    return u.imag() < v.imag();
                }
            }
        }
        return false;
    };
    const bool swap = less(b.matrix(), a.matrix());
    const auto lambdas = eigvalsh(swap ? b.matrix() - a.matrix() : a.matrix() - b.matrix());
    double s = 0.0;
    for (double l : lambdas) {
        s += std::abs(l);
    }
    return std::clamp(0.5 * s, 0.0, 1.0);
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    constexpr std::size_t budget = std::size_t{1} << tol::max_qubits;
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > budget || cols > budget) {
        throw CapacityError(fmt::format("kron result {}x{} exceeds the {}-qubit budget", rows, cols,
                                        tol::max_qubits));
    }
    CMatrix out(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

DensityMatrix mean_state(std::span<const DensityMatrix> states) {
    if (states.empty()) {
        throw InvariantError("mean_state of an empty list");
    }
    const std::size_t d = states.front().dim();
    CMatrix sum(d, d);
    for (const auto &s : states) {
        if (s.dim() != d) {
            throw DimensionError("mean_state over states of different dimension");
        }
        sum += s.matrix();
    }
    sum *= cplx{1.0 / static_cast<double>(states.size()), 0.0};
    return DensityMatrix(std::move(sum));
}

// ---------------------------------------------------------------- 1q algebra

Mat2 mat2_mul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Mat2 mat2_adjoint(const Mat2 &a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

CMatrix to_cmatrix(const Mat2 &m) { return CMatrix(2, 2, {m[0], m[1], m[2], m[3]}); }

CMatrix pauli_x() { return CMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
CMatrix pauli_y() { return CMatrix(2, 2, {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}); }
CMatrix pauli_z() { return CMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }

CMatrix embed_1q(const CMatrix &op, std::size_t qubit, std::size_t n_qubits) {
    if (qubit >= n_qubits) {
        throw DimensionError(fmt::format("qubit {} outside a {}-qubit register", qubit, n_qubits));
    }
    CMatrix out = CMatrix::identity(1);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        out = kron(out, q == qubit ? op : CMatrix::identity(2));
    }
    return out;
}

void apply_1q(std::span<cplx> amps, const Mat2 &u, std::size_t qubit, std::size_t n_qubits) {
    const std::size_t mask = qubit_mask(qubit, n_qubits);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        const cplx a0 = amps[i];
        const cplx a1 = amps[i | mask];
        amps[i] = u[0] * a0 + u[1] * a1;
        amps[i | mask] = u[2] * a0 + u[3] * a1;
    }
}

void apply_cnot(std::span<cplx> amps, std::size_t control, std::size_t target,
                std::size_t n_qubits) {
    const std::size_t cmask = qubit_mask(control, n_qubits);
    const std::size_t tmask = qubit_mask(target, n_qubits);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amps[i], amps[i | tmask]);
        }
    }
}

void apply_1q_left(CMatrix &m, const Mat2 &u, std::size_t qubit, std::size_t n_qubits) {
    const std::size_t mask = qubit_mask(qubit, n_qubits);
    const std::size_t cols = m.cols();
    auto data = m.data();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        cplx *r0 = data.data() + i * cols;
        cplx *r1 = data.data() + (i | mask) * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            const cplx a0 = r0[j];
            const cplx a1 = r1[j];
            r0[j] = u[0] * a0 + u[1] * a1;
            r1[j] = u[2] * a0 + u[3] * a1;
        }
    }
}

void apply_1q_right(CMatrix &m, const Mat2 &u, std::size_t qubit, std::size_t n_qubits) {
    const std::size_t mask = qubit_mask(qubit, n_qubits);
    const std::size_t cols = m.cols();
    auto data = m.data();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx *row = data.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if ((j & mask) != 0) {
                continue;
            }
            const cplx a0 = row[j];
            const cplx a1 = row[j | mask];
            row[j] = a0 * u[0] + a1 * u[2];
            row[j | mask] = a0 * u[1] + a1 * u[3];
        }
    }
}

void apply_cnot_conj(CMatrix &m, std::size_t control, std::size_t target, std::size_t n_qubits) {
    const std::size_t cmask = qubit_mask(control, n_qubits);
    const std::size_t tmask = qubit_mask(target, n_qubits);
    const std::size_t d = m.rows();
    auto data = m.data();
    for (std::size_t i = 0; i < d; ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap_ranges(data.begin() + static_cast<std::ptrdiff_t>(i * d),
                             data.begin() + static_cast<std::ptrdiff_t>((i + 1) * d),
                             data.begin() + static_cast<std::ptrdiff_t>((i | tmask) * d));
        }
    }
    for (std::size_t r = 0; r < d; ++r) {
        cplx *row = data.data() + r * d;
        for (std::size_t j = 0; j < d; ++j) {
            if ((j & cmask) != 0 && (j & tmask) == 0) {
                std::swap(row[j], row[j | tmask]);
            }
        }
    }
}

} // namespace tdtree
