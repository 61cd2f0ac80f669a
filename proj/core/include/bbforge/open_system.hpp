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

#ifndef BBFORGE_OPEN_SYSTEM_HPP
#define BBFORGE_OPEN_SYSTEM_HPP

#include <string>
#include <vector>

#include "bbforge/linalg.hpp"
#include "bbforge/operator_algebra.hpp"

namespace bbforge {

/// One interaction term S_γ ⊗ B_γ.
struct Coupling {
  std::string name;
  CMatrix system;
  CMatrix bath;
};

/// H = H_S ⊗ I_B + I_S ⊗ H_B + Σ_γ S_γ ⊗ B_γ on a finite bath, with ħ = 1.
/// The system factor is the left tensor factor throughout.
class SystemBathModel {
 public:
  /// Validates Hermiticity, dimensions, and that ρ_B(0) is a density matrix.
  SystemBathModel(CMatrix system_hamiltonian, CMatrix bath_hamiltonian, std::vector<Coupling> couplings,
                  CMatrix bath_initial, int coupling_order = 1);

  /// Closed system: one-dimensional bath in its only state.
  static SystemBathModel closed(CMatrix system_hamiltonian);

  const CMatrix& system_hamiltonian() const { return system_hamiltonian_; }
  const CMatrix& bath_hamiltonian() const { return bath_hamiltonian_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const CMatrix& bath_initial() const { return bath_initial_; }
  int coupling_order() const { return coupling_order_; }

  Eigen::Index system_dim() const { return system_hamiltonian_.rows(); }
  Eigen::Index bath_dim() const { return bath_hamiltonian_.rows(); }
  Eigen::Index total_dim() const { return system_dim() * bath_dim(); }

  const CMatrix& total_hamiltonian() const { return total_hamiltonian_; }

 private:
  CMatrix system_hamiltonian_;
  CMatrix bath_hamiltonian_;
  std::vector<Coupling> couplings_;
  CMatrix bath_initial_;
  int coupling_order_;
  CMatrix total_hamiltonian_;
};

/// Validated density matrix (Hermitian, unit trace, eigenvalues ≥ −1e-10).
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);

  /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
  static DensityMatrix pure(const CVector& psi);

  const CMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  CMatrix matrix_;
};

struct KrausSet {
  std::vector<CMatrix> operators;
  double source_time = 0.0;

  CMatrix apply(const CMatrix& rho) const;
  /// ‖Σ A†A − I‖_F
  double completeness_defect() const;
};

/// Ordered BB pulses g_0 = I, g_1, … with uniform spacing Δt and their adjoint rotations.
class PulseGroup {
 public:
  PulseGroup(std::vector<CMatrix> pulses, double delta_t);

  /// The trivial group {I} on `dim`.
  static PulseGroup trivial(Eigen::Index dim, double delta_t);

  const std::vector<CMatrix>& pulses() const { return pulses_; }
  const std::vector<AdjointRotation>& rotations() const { return rotations_; }
  std::size_t size() const { return pulses_.size(); }
  Eigen::Index dim() const { return pulses_.front().rows(); }
  double delta_t() const { return delta_t_; }
  double cycle_time() const { return static_cast<double>(pulses_.size()) * delta_t_; }

  /// True when every pulse equals the identity up to a global phase.
  bool is_trivial() const;

  /// Same pulses with a different spacing.
  PulseGroup with_delta_t(double delta_t) const;

 private:
  std::vector<CMatrix> pulses_;
  std::vector<AdjointRotation> rotations_;
  double delta_t_;
};

/// exp(−iHt) of the total Hamiltonian.
CMatrix propagate(const SystemBathModel& model, double t);

/// Tr_B[U(t)(ρ ⊗ ρ_B)U†(t)].
DensityMatrix reduced_state(const SystemBathModel& model, const DensityMatrix& rho_system, double t);

/// A_{μν} = √λ_ν ⟨μ|U(t)|ν⟩ over the eigenbasis of ρ_B(0); λ_ν below 1e-14 dropped.
KrausSet kraus_from_model(const SystemBathModel& model, double t);

/// Full-space unitary of one cycle, Π_j (g_j† ⊗ I) U_0(Δt) (g_j ⊗ I) with g_0 acting first in time.
CMatrix cycle_unitary(const SystemBathModel& model, const PulseGroup& group);

/// Full-space unitary from 0 to `elapsed` under repeated cycles; a partial
/// segment evolves for the remaining time inside the current pulse frame.
CMatrix pulsed_unitary(const SystemBathModel& model, const PulseGroup& group, double elapsed);

/// Evolves ρ ⊗ ρ_B under `num_cycles` cycles of ideal instantaneous pulses and traces out the bath.
DensityMatrix apply_bb_cycle(const SystemBathModel& model, const PulseGroup& group, int num_cycles,
                             const DensityMatrix& rho_system);

struct SymmetrizeOptions {
  /// Throw a domain error unless the result commutes with every pulse.
  bool verify_centralizer = false;
  double tolerance = 1e-10;
};

/// (1/|G|) Σ_k g_k† H g_k. H may live on the pulse space or on pulse ⊗ bath.
CMatrix symmetrize_hamiltonian(const CMatrix& h, const PulseGroup& group, const SymmetrizeOptions& options = {});

}  // namespace bbforge

#endif  // BBFORGE_OPEN_SYSTEM_HPP
