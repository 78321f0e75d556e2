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

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tdtree {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    /// Throws InvariantError unless entries.size() == rows * cols and all entries are finite.
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool is_square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<cplx> data() { return data_; }
    [[nodiscard]] std::span<const cplx> data() const { return data_; }

    [[nodiscard]] CMatrix adjoint() const;
    [[nodiscard]] cplx trace() const;
    [[nodiscard]] double frobenius_norm() const;
    /// Largest |a_ij - conj(a_ji)|; requires a square matrix.
    [[nodiscard]] double hermitian_defect() const;

    CMatrix &operator+=(const CMatrix &other);
    CMatrix &operator-=(const CMatrix &other);
    CMatrix &operator*=(cplx scale);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix &b);
CMatrix operator-(CMatrix a, const CMatrix &b);
CMatrix operator*(const CMatrix &a, const CMatrix &b);
CMatrix operator*(CMatrix a, cplx scale);
CMatrix operator*(cplx scale, CMatrix a);

/// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const CMatrix &a, const CMatrix &b);

/// Pure state of n qubits. Qubit 0 is the most significant bit of the basis index.
class StateVector {
  public:
    /// Throws DimensionError on a length other than 2^n, InvariantError if not unit norm.
    StateVector(std::size_t n_qubits, std::vector<cplx> amplitudes);

    static StateVector basis(std::size_t n_qubits, std::size_t index);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const cplx> amplitudes() const { return amplitudes_; }
    [[nodiscard]] double norm() const;

  private:
    std::size_t n_qubits_;
    std::vector<cplx> amplitudes_;
};

/// Mixed state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
  public:
    /// Validates shape, Hermiticity and trace. Positivity is checked separately by
    /// min_eigenvalue() since it needs a diagonalization.
    explicit DensityMatrix(CMatrix matrix);

    static DensityMatrix pure(const StateVector &state);
    static DensityMatrix maximally_mixed(std::size_t n_qubits);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return matrix_.rows(); }
    [[nodiscard]] const CMatrix &matrix() const { return matrix_; }
    [[nodiscard]] double min_eigenvalue() const;
    /// Throws InvariantError if any eigenvalue is below -tol::psd.
    void check_positive() const;

  private:
    std::size_t n_qubits_;
    CMatrix matrix_;
};

/// Number of qubits for a power-of-two dimension; throws DimensionError otherwise.
std::size_t qubits_for_dim(std::size_t dim);

/// Ascending eigenvalues of a Hermitian matrix (cyclic Jacobi on the real
/// 2n x 2n embedding, duplicate pairs merged).
std::vector<double> eigvalsh(const CMatrix &h);

struct GroundState {
    double energy;
    std::vector<cplx> vector;
};

/// Lowest eigenpair. The vector has unit norm and its largest-magnitude
/// component is real and positive.
GroundState eigsh_ground(const CMatrix &h);

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix &a, const DensityMatrix &b);

/// Kronecker product; throws CapacityError past 2^12 rows or columns.
CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Arithmetic mean of equally sized states.
DensityMatrix mean_state(std::span<const DensityMatrix> states);

// Single-qubit operators and their action on registers.

/// Row-major 2x2 matrix.
using Mat2 = std::array<cplx, 4>;

Mat2 mat2_mul(const Mat2 &a, const Mat2 &b);
Mat2 mat2_adjoint(const Mat2 &a);
CMatrix to_cmatrix(const Mat2 &m);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// I ⊗ ... ⊗ op (on qubit q) ⊗ ... ⊗ I for an n-qubit register.
CMatrix embed_1q(const CMatrix &op, std::size_t qubit, std::size_t n_qubits);

/// Bit mask selecting `qubit` in a basis index.
inline std::size_t qubit_mask(std::size_t qubit, std::size_t n_qubits) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

/// amps <- (u on qubit) amps
void apply_1q(std::span<cplx> amps, const Mat2 &u, std::size_t qubit, std::size_t n_qubits);
/// amps <- CNOT(control, target) amps
void apply_cnot(std::span<cplx> amps, std::size_t control, std::size_t target, std::size_t n_qubits);

/// m <- (u on qubit) m
void apply_1q_left(CMatrix &m, const Mat2 &u, std::size_t qubit, std::size_t n_qubits);
/// m <- m (u on qubit)
void apply_1q_right(CMatrix &m, const Mat2 &u, std::size_t qubit, std::size_t n_qubits);
/// m <- C m C with C = CNOT(control, target).
void apply_cnot_conj(CMatrix &m, std::size_t control, std::size_t target, std::size_t n_qubits);

} // namespace tdtree
