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


#ifndef BBFORGE_SYNTHESIS_HPP
#define BBFORGE_SYNTHESIS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bbforge/linalg.hpp"
#include "bbforge/open_system.hpp"
#include "bbforge/operator_algebra.hpp"
#include "bbforge/tomography.hpp"

namespace bbforge {

/// Real span of Hermitian generators of a stabilizer algebra.
class StabilizerSpace {
 public:
  /// Validates Hermiticity, a common dimension, and linear independence.
  static StabilizerSpace create(std::vector<CMatrix> generators);

  const std::vector<CMatrix>& generators() const { return generators_; }
  bool empty() const { return generators_.empty(); }

 private:
  explicit StabilizerSpace(std::vector<CMatrix> generators) : generators_(std::move(generators)) {}
  std::vector<CMatrix> generators_;
};

enum class TargetKind { kStorage, kSingleQubit, kTwoQubit, kEncoded };

std::string_view to_string(TargetKind kind);
TargetKind target_kind_from_string(std::string_view name);

/// Wanted first-order evolution. Single-qubit targets carry 3 coordinates on
/// pauli:1, two-qubit targets a 4×4 pair matrix, encoded targets coordinates
/// on any basis.
struct TargetSpec {
  TargetKind kind = TargetKind::kStorage;
  CoordinateVector wanted;
  std::optional<Eigen::Matrix4d> wanted_pair;
  std::optional<StabilizerSpace> stabilizer;

  static TargetSpec storage();
  static TargetSpec single_qubit(const Eigen::Vector3d& w);
  static TargetSpec two_qubit(const Eigen::Matrix4d& w);
  static TargetSpec encoded(CoordinateVector wanted, std::optional<StabilizerSpace> stabilizer);

  /// Throws a shape or domain error when the fields do not fit the kind.
  void validate() const;
};

struct ErrorReport {
  CoordinateVector error_vector;
  double scalar_distance = 0.0;
  std::optional<double> stabilizer_distance;
};

struct SynthesisResult {
  PulseGroup group;
  ErrorReport residual;
  std::string free_parameters;
  /// Per pulse, per qubit; empty when the pulses are not local products.
  std::vector<std::vector<AxisAngle>> local_factors;
};

enum class TwoQubitAnsatz { kLocalProducts, kGeneral };

/// (1/|G|) Σ_k R_kᵀ ξ, the first-order coordinates seen through the pulses.
RVector apply_averaged(const std::vector<AdjointRotation>& rotations, const RVector& xi);

SynthesisResult solve_storage(const EffectiveGenerator& generator, int qubit, int max_group_size,
                              double delta_t = 1.0);

/// Parity kick {I, U} with U†(d·σ)U = −d·σ for every listed direction.
/// Throws an infeasible error when the directions span all three axes.
SynthesisResult solve_storage_directions(const std::vector<Eigen::Vector3d>& directions, double delta_t = 1.0);

SynthesisResult solve_single_qubit_gate(const EffectiveGenerator& generator, const TargetSpec& target, int qubit,
                                        int max_group_size, double delta_t = 1.0);

SynthesisResult solve_two_qubit(const EffectiveGenerator& generator, const TargetSpec& target,
                                std::pair<int, int> pair, TwoQubitAnsatz ansatz, int max_group_size = 4,
                                double delta_t = 1.0);

/// Same, from a pair matrix directly.
SynthesisResult solve_two_qubit_matrix(const Eigen::Matrix4d& xi, const Eigen::Matrix4d& wanted, TwoQubitAnsatz ansatz,
                                       int max_group_size = 4, double delta_t = 1.0);

/// E = tilde − wanted and d = [Tr((Σ E_α K_α)²)]^{1/2}.
ErrorReport error_report(const CoordinateVector& tilde, const CoordinateVector& wanted);

/// Distance of S̃ − S_w to the stabilizer span; falls back to d without one.
ErrorReport check_encoded(const CoordinateVector& result_generator, const TargetSpec& target);

/// Unitaries with adjoint_of(U_k) = R_k within 1e-8, up to a global phase.
/// Dim 2 pulses come back as exp(iθ n̂·σ) in canonical form; dim 4 pulses
/// have their first significant entry (column-major) real and positive.
std::vector<CMatrix> group_to_pulses(const std::vector<AdjointRotation>& rotations, Eigen::Index dim);

}  // namespace bbforge

#endif  // BBFORGE_SYNTHESIS_HPP
