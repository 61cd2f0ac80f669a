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

#ifndef BBFORGE_OPERATOR_ALGEBRA_HPP
#define BBFORGE_OPERATOR_ALGEBRA_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbforge/linalg.hpp"

namespace bbforge {

/// Single-qubit Pauli matrix for label 0..3 (I, X, Y, Z).
CMatrix pauli_matrix(int label);

/// Tensor product of single-qubit Paulis; qubit 0 is the leftmost factor.
class PauliString {
 public:
  explicit PauliString(std::vector<std::uint8_t> indices);
  static PauliString from_label(std::string_view label);

  const std::vector<std::uint8_t>& indices() const { return indices_; }
  int num_qubits() const { return static_cast<int>(indices_.size()); }
  int weight() const;
  std::string label() const;
  CMatrix matrix() const;

  /// Tr(P · a) using the one-nonzero-per-row structure of P.
  Complex trace_with(const CMatrix& a) const;

  bool operator==(const PauliString&) const = default;

 private:
  std::vector<std::uint8_t> indices_;
  std::uint64_t flip_mask_ = 0;  // column of the nonzero in row r is r ^ flip_mask_
};

/// Hermitian trace-orthogonal operator set with the identity first.
class OperatorBasis {
 public:
  /// Validates Tr(λ_i λ_j) = M δ_ij (1e-12 relative to M) and Hermiticity.
  static OperatorBasis from_matrices(std::string id, std::vector<CMatrix> elements, double normalization,
                                     std::vector<std::string> labels = {});

  const std::string& id() const { return id_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t generator_count() const { return labels_.size() - 1; }
  Eigen::Index dim() const { return dim_; }
  double normalization() const { return normalization_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool is_pauli() const { return !pauli_.empty(); }
  int num_qubits() const { return num_qubits_; }
  const std::vector<PauliString>& pauli_strings() const { return pauli_; }
  std::size_t index_of(const PauliString& p) const;

  CMatrix element(std::size_t i) const;
  Complex trace_with(std::size_t i, const CMatrix& a) const;

 private:
  friend OperatorBasis build_pauli_basis(int num_qubits);
  OperatorBasis() = default;

  std::string id_;
  Eigen::Index dim_ = 0;
  double normalization_ = 1.0;
  int num_qubits_ = 0;
  std::vector<std::string> labels_;
  std::vector<PauliString> pauli_;
  std::vector<CMatrix> elements_;  // empty for large Pauli bases; built on demand
};

using BasisPtr = std::shared_ptr<const OperatorBasis>;

inline constexpr int kMaxPauliQubits = 8;

/// All 4^n Pauli strings in lexicographic index order, identity first, M = 2^n.
OperatorBasis build_pauli_basis(int num_qubits);

/// Shared, cached instance of build_pauli_basis.
BasisPtr pauli_basis(int num_qubits);

/// Coordinates over the non-identity basis elements (length size() − 1).
struct CoordinateVector {
  RVector coords;
  BasisPtr basis;
};

/// coords_i = Tr(λ_i · op) / M for every non-identity λ_i.
CoordinateVector expand(const CMatrix& op, const BasisPtr& basis);

/// Σ_i coords_i λ_i + trace_part · I / n.
CMatrix reconstruct(const CoordinateVector& v, double trace_part = 0.0);

/// Unit axis n̂ and angle θ of U = exp(i θ n̂·σ).
struct AxisAngle {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double angle = 0.0;

  /// Normalizes the axis and wraps θ into (−π, π].
  static AxisAngle make(const Eigen::Vector3d& axis, double angle);
  CMatrix unitary() const;
};

/// Real orthogonal R with U† λ_i U = Σ_j R_ij λ_j.
class AdjointRotation {
 public:
  /// Validates RᵀR = I and det R = +1 against the orthogonality tolerance.
  static AdjointRotation create(RMatrix matrix, Eigen::Index source_dim);

  const RMatrix& matrix() const { return matrix_; }
  Eigen::Index source_dim() const { return source_dim_; }

 private:
  AdjointRotation(RMatrix matrix, Eigen::Index source_dim)
      : matrix_(std::move(matrix)), source_dim_(source_dim) {}

  RMatrix matrix_;
  Eigen::Index source_dim_;
};

AdjointRotation adjoint_of(const CMatrix& unitary, const OperatorBasis& basis);

/// SO(3) matrix of U = q0·I + i(q1 σx + q2 σy + q3 σz) under the U†σU convention.
Eigen::Matrix3d rotation_from_quaternion(const Eigen::Vector4d& q);

/// Requirement U†(from·σ)U = to·σ on an SU(2) element.
struct VectorMapping {
  Eigen::Vector3d from;
  Eigen::Vector3d to;
};

/// Partially specified SO(3) rotation. Unset entries are free.
struct RotationConstraints {
  std::array<std::array<std::optional<double>, 3>, 3> entries{};
  std::vector<VectorMapping> mappings;

  static RotationConstraints full(const Eigen::Matrix3d& r);
  RotationConstraints& fix_row(int row, const Eigen::Vector3d& values);
  RotationConstraints& fix_column(int column, const Eigen::Vector3d& values);
  RotationConstraints& fix_entry(int row, int column, double value);
};

/// Solution family of a rotation inversion. `representative` is the
/// canonical member; the flags say which parameters the constraints pin.
struct RotationSolution {
  AxisAngle representative;
  bool angle_fixed = true;
  std::array<bool, 3> axis_free{};
  int free_parameters = 0;
  /// Orthonormal 4×k basis of the quaternion subspace cut out by the
  /// vector-mapping constraints (before any entrywise quadratic constraints).
  RMatrix quaternion_span;

  Eigen::Vector4d quaternion() const;
  std::string describe() const;
};

RotationSolution unitary_from_rotation(const RotationConstraints& constraints);
RotationSolution unitary_from_rotation(const AdjointRotation& rotation);

}  // namespace bbforge

#endif  // BBFORGE_OPERATOR_ALGEBRA_HPP
