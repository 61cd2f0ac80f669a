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

#ifndef BBFORGE_TOMOGRAPHY_HPP
#define BBFORGE_TOMOGRAPHY_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bbforge/linalg.hpp"
#include "bbforge/operator_algebra.hpp"

namespace bbforge {

/// Linear map on density-like matrices, treated as a black box.
using Channel = std::function<CMatrix(const CMatrix&)>;

/// ξ_{jk}^{αβ} for a fixed operator basis against the matrix-unit input set,
/// together with the regularized pseudoinverse used to solve for χ.
struct XiTensor {
  BasisPtr basis;
  CMatrix matrix;         // rows (j, k) → j·n² + k; columns (α, β) → α·N_b + β
  CMatrix pseudoinverse;  // singular values below 1e-12·σ_max dropped
  double condition = 0.0;
};

/// Cached per basis; safe to call concurrently.
std::shared_ptr<const XiTensor> xi_tensor_for(const BasisPtr& basis);

struct TomographyData {
  CMatrix lambda;  // E(ρ_j) = Σ_k λ_{jk} ρ_k with ρ_j = |a⟩⟨b|, j = a·n + b
  std::shared_ptr<const XiTensor> xi;
  BasisPtr basis;
  double time_tag = 0.0;
};

struct ChiMatrix {
  CMatrix entries;
  double time_tag = 0.0;
  BasisPtr basis;
  double skew_norm = 0.0;  // ‖χ − χ†‖/2 before the Hermitian part was taken
  double residual = 0.0;   // ‖ξ·vec(χ) − vec(λ)‖ for the returned (Hermitian) χ

  /// Σ χ_{αβ} K_α ρ K_β†
  CMatrix apply(const CMatrix& rho) const;
};

/// Probes `channel` with the n² physical preparations |a⟩, (|a⟩+|b⟩)/√2,
/// (|a⟩+i|b⟩)/√2 and recombines them into the matrix-unit responses.
TomographyData run_qpt(const Channel& channel, const BasisPtr& basis, double time_tag = 0.0);

ChiMatrix chi_from_lambda(const TomographyData& data);

/// Qubit count plus the pairs that get a 4×4 coefficient matrix.
struct QubitLayout {
  int num_qubits = 1;
  std::vector<std::pair<int, int>> pairs;

  /// All pairs i < j.
  static QubitLayout all_pairs(int num_qubits);
};

/// Rate-normalized first-order generator read off Im χ_{α,0}.
struct EffectiveGenerator {
  std::vector<CoordinateVector> xi;                       // per qubit, 3 coords on pauli:1
  std::map<std::pair<int, int>, Eigen::Matrix4d> xi_pair;  // entry (α, β) ↔ σ_i^α σ_j^β
  CoordinateVector full;                                  // every non-identity Pauli string
  double time_scale = 0.0;
  std::vector<std::string> warnings;

  /// 15-component coordinates of a pair matrix on the pauli:2 basis.
  static CoordinateVector pair_coordinates(const Eigen::Matrix4d& m);
};

EffectiveGenerator extract_generator(const ChiMatrix& chi, const QubitLayout& layout);

/// Convenience: χ of a channel at probe time t.
ChiMatrix measure_chi(const Channel& channel, const BasisPtr& basis, double t);

}  // namespace bbforge

#endif  // BBFORGE_TOMOGRAPHY_HPP
