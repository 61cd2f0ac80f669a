// Copyright 2026 The bbforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BBFORGE_LINALG_HPP
#define BBFORGE_LINALG_HPP

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace bbforge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Process-wide numerical thresholds. Reads and writes are atomic; the
/// defaults match the documented library contracts.
struct Tolerances {
  double hermitian = 1e-10;
  double orthogonal = 1e-10;
};

Tolerances default_tolerances();
void set_default_tolerances(const Tolerances& tolerances);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix identity(Eigen::Index dim);

/// Trace over the second tensor factor of a (system ⊗ bath) operator.
CMatrix partial_trace_second(const CMatrix& m, Eigen::Index dim_first, Eigen::Index dim_second);

double hermiticity_defect(const CMatrix& m);
double unitarity_defect(const CMatrix& u);
CMatrix hermitian_part(const CMatrix& m);

/// 0.5 * sum of |eigenvalues| of the Hermitian difference.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Frobenius norm of [a, b] and {a, b}.
double commutator_norm(const CMatrix& a, const CMatrix& b);
double anticommutator_norm(const CMatrix& a, const CMatrix& b);

/// Distance between unitaries modulo a global phase: min_φ ‖a − e^{iφ} b‖_F.
double phase_insensitive_distance(const CMatrix& a, const CMatrix& b);

/// Number of qubits for a power-of-two dimension; throws a shape error otherwise.
int qubit_count_for_dim(Eigen::Index dim);

}  // namespace bbforge

#endif  // BBFORGE_LINALG_HPP
