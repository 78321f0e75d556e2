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

#include <cstddef>

/// Numerical tolerances shared by every module.
namespace tdtree::tol {

inline constexpr double state_norm = 1e-10;
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-9;

/// Accepted Hermiticity defect of solver inputs.
inline constexpr double input_hermitian = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this times ||H||_F.
inline constexpr double solver_convergence = 1e-12;
inline constexpr int solver_max_sweeps = 100;

inline constexpr double kraus_completeness = 1e-12;
inline constexpr double weight_sum = 1e-9;

/// |1 - y h| at or below this counts as sitting exactly on the hinge.
inline constexpr double hinge_margin = 1e-12;

/// Candidate splits must beat the incumbent by more than this to replace it.
inline constexpr double split_tie = 1e-12;

/// Samples closer than this to an ANNNI critical line are rejected.
inline constexpr double phase_boundary_margin = 1e-6;

/// Largest supported register.
inline constexpr std::size_t max_qubits = 12;

} // namespace tdtree::tol
