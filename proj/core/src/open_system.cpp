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

#include "bbforge/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "bbforge/error.hpp"

namespace bbforge {

namespace {

void require_hermitian(const CMatrix& m, const std::string& what) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::kShape, what + " must be square");
  if (hermiticity_defect(m) > default_tolerances().hermitian) throw Error(ErrorKind::kDomain, what + " is not Hermitian");
}

void require_density(const CMatrix& m, const std::string& what) {
  require_hermitian(m, what);
  const double tol = default_tolerances().hermitian;
  if (std::abs(m.trace() - 1.0) > tol) throw Error(ErrorKind::kDomain, what + " does not have unit trace");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol) throw Error(ErrorKind::kDomain, what + " is not positive semidefinite");
}

CMatrix lift(const CMatrix& system_op, Eigen::Index bath_dim) {
  return bath_dim == 1 ? system_op : kron(system_op, identity(bath_dim));
}

CMatrix matrix_power(CMatrix base, int exponent) {
  CMatrix result = identity(base.rows());
  while (exponent > 0) {
    if (exponent & 1) result = base * result;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace

SystemBathModel::SystemBathModel(CMatrix system_hamiltonian, CMatrix bath_hamiltonian, std::vector<Coupling> couplings,
                                 CMatrix bath_initial, int coupling_order)
    : system_hamiltonian_(std::move(system_hamiltonian)),
      bath_hamiltonian_(std::move(bath_hamiltonian)),
      couplings_(std::move(couplings)),
      bath_initial_(std::move(bath_initial)),
      coupling_order_(coupling_order) {
  require_hermitian(system_hamiltonian_, "system hamiltonian");
  require_hermitian(bath_hamiltonian_, "bath hamiltonian");
  if (system_dim() < 1 || bath_dim() < 1) throw Error(ErrorKind::kShape, "model dimensions must be positive");
  if (coupling_order_ != 1 && coupling_order_ != 2) throw Error(ErrorKind::kDomain, "coupling order must be 1 or 2");
  if (bath_initial_.rows() != bath_dim()) throw Error(ErrorKind::kShape, "bath initial state has wrong dimension");
  require_density(bath_initial_, "bath initial state");
  for (const auto& c : couplings_) {
    if (c.system.rows() != system_dim()) throw Error(ErrorKind::kShape, "coupling '" + c.name + "' system operator has wrong dimension");
    if (c.bath.rows() != bath_dim()) throw Error(ErrorKind::kShape, "coupling '" + c.name + "' bath operator has wrong dimension");
    require_hermitian(c.system, "coupling '" + c.name + "' system operator");
    require_hermitian(c.bath, "coupling '" + c.name + "' bath operator");
  }
  total_hamiltonian_ = lift(system_hamiltonian_, bath_dim()) + kron(identity(system_dim()), bath_hamiltonian_);
  for (const auto& c : couplings_) total_hamiltonian_ += kron(c.system, c.bath);
}

SystemBathModel SystemBathModel::closed(CMatrix system_hamiltonian) {
  return SystemBathModel(std::move(system_hamiltonian), CMatrix::Zero(1, 1), {}, identity(1));
}

DensityMatrix::DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) { require_density(matrix_, "density matrix"); }

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::kDomain, "state vector is zero");
  const CVector unit = psi / n;
  return DensityMatrix(unit * unit.adjoint());
}

CMatrix KrausSet::apply(const CMatrix& rho) const {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& a : operators) out += a * rho * a.adjoint();
  return out;
}

double KrausSet::completeness_defect() const {
  if (operators.empty()) return std::numeric_limits<double>::infinity();
  CMatrix sum = CMatrix::Zero(operators.front().cols(), operators.front().cols());
  for (const auto& a : operators) sum += a.adjoint() * a;
  return (sum - identity(sum.rows())).norm();
}

PulseGroup::PulseGroup(std::vector<CMatrix> pulses, double delta_t) : pulses_(std::move(pulses)), delta_t_(delta_t) {
  if (pulses_.empty()) throw Error(ErrorKind::kShape, "pulse group is empty");
  if (!(delta_t_ > 0.0)) throw Error(ErrorKind::kDomain, "pulse spacing must be positive");
  const Eigen::Index dim = pulses_.front().rows();
  const double tol = default_tolerances().orthogonal;
  if ((pulses_.front() - identity(dim)).norm() > tol) throw Error(ErrorKind::kDomain, "g_0 must be the identity");
  const int qubits = qubit_count_for_dim(dim);
  const BasisPtr basis = pauli_basis(qubits);
  rotations_.reserve(pulses_.size());
  for (std::size_t k = 0; k < pulses_.size(); ++k) {
    if (pulses_[k].rows() != dim || pulses_[k].cols() != dim) throw Error(ErrorKind::kShape, "pulses must share one dimension");
    if (unitarity_defect(pulses_[k]) > tol) throw Error(ErrorKind::kDomain, "pulse " + std::to_string(k) + " is not unitary");
    rotations_.push_back(adjoint_of(pulses_[k], *basis));
  }
}

PulseGroup PulseGroup::trivial(Eigen::Index dim, double delta_t) { return PulseGroup({identity(dim)}, delta_t); }

bool PulseGroup::is_trivial() const {
  return std::all_of(pulses_.begin(), pulses_.end(),
                     [](const CMatrix& g) { return phase_insensitive_distance(g, identity(g.rows())) < 1e-12; });
}

PulseGroup PulseGroup::with_delta_t(double delta_t) const {
  PulseGroup copy = *this;
  if (!(delta_t > 0.0)) throw Error(ErrorKind::kDomain, "pulse spacing must be positive");
  copy.delta_t_ = delta_t;
  return copy;
}

CMatrix propagate(const SystemBathModel& model, double t) {
  if (t < 0.0) throw Error(ErrorKind::kDomain, "propagation time must be non-negative");
  if (t == 0.0) return identity(model.total_dim());
  const CMatrix generator = Complex(0.0, -t) * model.total_hamiltonian();
  return generator.exp();
}

DensityMatrix reduced_state(const SystemBathModel& model, const DensityMatrix& rho_system, double t) {
  if (rho_system.dim() != model.system_dim()) throw Error(ErrorKind::kShape, "initial state has wrong system dimension");
  const CMatrix u = propagate(model, t);
  const CMatrix joint = kron(rho_system.matrix(), model.bath_initial());
  return DensityMatrix(hermitian_part(partial_trace_second(u * joint * u.adjoint(), model.system_dim(), model.bath_dim())));
}

KrausSet kraus_from_model(const SystemBathModel& model, double t) {
  const CMatrix u = propagate(model, t);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(model.bath_initial()));
  const Eigen::Index ds = model.system_dim();
  const Eigen::Index db = model.bath_dim();
  const CMatrix& basis = solver.eigenvectors();
  KrausSet set;
  set.source_time = t;
  for (Eigen::Index nu = 0; nu < db; ++nu) {
    const double lambda = solver.eigenvalues()(nu);
    if (lambda < 1e-14) continue;
    const CMatrix right = kron(identity(ds), basis.col(nu));  // I ⊗ |ν⟩
    const CMatrix u_nu = u * right;
    for (Eigen::Index mu = 0; mu < db; ++mu) {
      const CMatrix left = kron(identity(ds), basis.col(mu).adjoint());  // I ⊗ ⟨μ|
      set.operators.push_back(std::sqrt(lambda) * (left * u_nu));
    }
  }
  return set;
}

namespace {

CMatrix segment(const CMatrix& free, const CMatrix& pulse, Eigen::Index bath_dim) {
  const CMatrix g = lift(pulse, bath_dim);
  return g.adjoint() * free * g;
}

void check_group_fits(const SystemBathModel& model, const PulseGroup& group) {
  if (group.dim() != model.system_dim()) {
    throw Error(ErrorKind::kShape, "pulse dimension " + std::to_string(group.dim()) + " does not match system dimension " +
                                       std::to_string(model.system_dim()));
  }
}

}  // namespace

CMatrix cycle_unitary(const SystemBathModel& model, const PulseGroup& group) {
  check_group_fits(model, group);
  const CMatrix free = propagate(model, group.delta_t());
  CMatrix u = identity(model.total_dim());
  for (const auto& g : group.pulses()) u = segment(free, g, model.bath_dim()) * u;
  return u;
}

CMatrix pulsed_unitary(const SystemBathModel& model, const PulseGroup& group, double elapsed) {
  check_group_fits(model, group);
  if (elapsed < 0.0) throw Error(ErrorKind::kDomain, "elapsed time must be non-negative");
  if (group.is_trivial()) return propagate(model, elapsed);
  const double dt = group.delta_t();
  auto segments = static_cast<long long>(std::floor(elapsed / dt + 1e-9));
  double remainder = elapsed - static_cast<double>(segments) * dt;
  if (remainder < 1e-12 * std::max(1.0, elapsed)) remainder = 0.0;
  const auto per_cycle = static_cast<long long>(group.size());
  const long long cycles = segments / per_cycle;
  const long long extra = segments % per_cycle;

  CMatrix u = cycles > 0 ? matrix_power(cycle_unitary(model, group), static_cast<int>(cycles)) : identity(model.total_dim());
  const CMatrix free = propagate(model, dt);
  for (long long j = 0; j < extra; ++j) u = segment(free, group.pulses()[static_cast<std::size_t>(j)], model.bath_dim()) * u;
  if (remainder > 0.0) {
    u = segment(propagate(model, remainder), group.pulses()[static_cast<std::size_t>(extra)], model.bath_dim()) * u;
  }
  return u;
}

DensityMatrix apply_bb_cycle(const SystemBathModel& model, const PulseGroup& group, int num_cycles,
                             const DensityMatrix& rho_system) {
  if (num_cycles < 1) throw Error(ErrorKind::kDomain, "num_cycles must be at least 1");
  check_group_fits(model, group);
  if (rho_system.dim() != model.system_dim()) throw Error(ErrorKind::kShape, "initial state has wrong system dimension");
  const CMatrix u = group.is_trivial() ? propagate(model, num_cycles * group.cycle_time())
                                       : matrix_power(cycle_unitary(model, group), num_cycles);
  const CMatrix joint = kron(rho_system.matrix(), model.bath_initial());
  return DensityMatrix(hermitian_part(partial_trace_second(u * joint * u.adjoint(), model.system_dim(), model.bath_dim())));
}

CMatrix symmetrize_hamiltonian(const CMatrix& h, const PulseGroup& group, const SymmetrizeOptions& options) {
  const Eigen::Index d = group.dim();
  if (h.rows() != h.cols() || h.rows() % d != 0) {
    throw Error(ErrorKind::kShape, "operator dimension " + std::to_string(h.rows()) + " is not a multiple of pulse dimension " +
                                       std::to_string(d));
  }
  const Eigen::Index rest = h.rows() / d;
  CMatrix out = CMatrix::Zero(h.rows(), h.cols());
  for (const auto& g : group.pulses()) {
    const CMatrix lifted = lift(g, rest);
    out += lifted.adjoint() * h * lifted;
  }
  out /= static_cast<double>(group.size());
  if (options.verify_centralizer) {
    for (const auto& g : group.pulses()) {
      if (commutator_norm(out, lift(g, rest)) > options.tolerance) {
        throw Error(ErrorKind::kDomain, "symmetrized operator is not in the centralizer (pulse set not closed)");
      }
    }
  }
  return out;
}

}  // namespace bbforge
