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


#include "bbforge/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "bbforge/catalogue.hpp"
#include "bbforge/error.hpp"
#include "least_squares.hpp"

namespace bbforge {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kSolveTol = 1e-9;
constexpr double kPulseTol = 1e-8;

void require_max_size(int max_group_size) {
  if (max_group_size < 2) throw Error(ErrorKind::kDomain, "max_group_size must be at least 2");
}

Eigen::Vector3d qubit_xi(const EffectiveGenerator& gen, int qubit) {
  if (qubit < 0 || qubit >= static_cast<int>(gen.xi.size())) {
    throw Error(ErrorKind::kShape, "qubit index " + std::to_string(qubit) + " out of range");
  }
  const RVector& c = gen.xi[static_cast<std::size_t>(qubit)].coords;
  if (c.size() != 3) throw Error(ErrorKind::kShape, "single-qubit generator must have 3 coordinates");
  if (!c.allFinite()) throw Error(ErrorKind::kDomain, "generator is not finite");
  return c;
}

CoordinateVector on_basis(const RVector& v, const BasisPtr& basis) { return {v, basis}; }

SynthesisResult finish(PulseGroup group, const RVector& xi, const RVector& wanted, const BasisPtr& basis,
                       std::string notes, std::vector<std::vector<AxisAngle>> factors) {
  const RVector tilde = apply_averaged(group.rotations(), xi);
  ErrorReport report = error_report(on_basis(tilde, basis), on_basis(wanted, basis));
  return SynthesisResult{std::move(group), std::move(report), std::move(notes), std::move(factors)};
}

SynthesisResult trivial_result(Eigen::Index dim, const RVector& xi, const RVector& wanted, const BasisPtr& basis,
                               double delta_t) {
  std::vector<std::vector<AxisAngle>> factors{std::vector<AxisAngle>(dim == 2 ? 1 : 2)};
  return finish(PulseGroup::trivial(dim, delta_t), xi, wanted, basis, "none (trivial group)", std::move(factors));
}

// Least-index coordinate axis orthogonal to v, else the projection of the first usable one.
Eigen::Vector3d orthogonal_axis(const Eigen::Vector3d& v) {
  const Eigen::Vector3d u = v.normalized();
  for (int j = 0; j < 3; ++j) {
    if (std::abs(u(j)) < 1e-12) return Eigen::Vector3d::Unit(j);
  }
  for (int j = 0; j < 3; ++j) {
    const Eigen::Vector3d p = Eigen::Vector3d::Unit(j) - u(j) * u;
    if (p.norm() > 1e-6) return p.normalized();
  }
  return Eigen::Vector3d::UnitX();
}

AxisAngle rotation_taking(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  RotationConstraints c;
  c.mappings.push_back({from, to});
  return unitary_from_rotation(c).representative;
}

// Pair-matrix action of U1⊗U2: Ξ → R1'ᵀ Ξ R2' with R' = 1 ⊕ R.
Eigen::Matrix4d local_action(const Eigen::Matrix4d& xi, const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
  a(0, 0) = 1.0;
  b(0, 0) = 1.0;
  a.bottomRightCorner<3, 3>() = r1;
  b.bottomRightCorner<3, 3>() = r2;
  return a.transpose() * xi * b;
}

Eigen::Vector4d quaternion_of(const Eigen::Vector3d& c) {
  const double t = c.norm();
  Eigen::Vector4d q;
  q(0) = std::cos(t);
  q.tail<3>() = t > 0 ? Eigen::Vector3d(c * (std::sin(t) / t)) : Eigen::Vector3d::Zero();
  return q;
}

AxisAngle axis_angle_of(const Eigen::Vector3d& c) {
  const double t = c.norm();
  return t > 0 ? AxisAngle::make(c / t, t) : AxisAngle{};
}

CMatrix hermitian_from(const RVector& c, const BasisPtr& basis) {
  return reconstruct(on_basis(c, basis));
}

CMatrix nearest_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix fix_phase(const CMatrix& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > 1e-8) return u * (std::abs(u(i, j)) / u(i, j));
    }
  }
  return u;
}

double rotation_mismatch(const CMatrix& u, const RMatrix& r, const OperatorBasis& basis) {
  return (adjoint_of(u, basis).matrix() - r).norm();
}

}  // namespace

// ---------------------------------------------------------------------------

StabilizerSpace StabilizerSpace::create(std::vector<CMatrix> generators) {
  const double tol = default_tolerances().hermitian;
  for (const auto& g : generators) {
    if (g.rows() != g.cols() || g.rows() != generators.front().rows()) {
      throw Error(ErrorKind::kShape, "stabilizer generators must be square and share one dimension");
    }
    if (hermiticity_defect(g) > tol) throw Error(ErrorKind::kDomain, "stabilizer generator is not Hermitian");
  }
  const auto k = static_cast<Eigen::Index>(generators.size());
  if (k > 0) {
    RMatrix gram(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        gram(i, j) = (generators[static_cast<std::size_t>(i)] * generators[static_cast<std::size_t>(j)]).trace().real();
      }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < k; ++i) rank += es.eigenvalues()(i) > 1e-10 * std::max(top, 1e-300) ? 1 : 0;
    if (rank != k) throw Error(ErrorKind::kDomain, "stabilizer generators are linearly dependent");
  }
  return StabilizerSpace(std::move(generators));
}

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kStorage: return "storage";
    case TargetKind::kSingleQubit: return "single_qubit";
    case TargetKind::kTwoQubit: return "two_qubit";
    case TargetKind::kEncoded: return "encoded";
  }
  return "unknown";
}

TargetKind target_kind_from_string(std::string_view name) {
  for (TargetKind k : {TargetKind::kStorage, TargetKind::kSingleQubit, TargetKind::kTwoQubit, TargetKind::kEncoded}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::kConfig, "unknown target kind '" + std::string(name) + "'");
}

TargetSpec TargetSpec::storage() {
  TargetSpec t;
  t.kind = TargetKind::kStorage;
  t.wanted = {RVector::Zero(3), pauli_basis(1)};
  return t;
}

TargetSpec TargetSpec::single_qubit(const Eigen::Vector3d& w) {
  TargetSpec t;
  t.kind = TargetKind::kSingleQubit;
  t.wanted = {w, pauli_basis(1)};
  return t;
}

TargetSpec TargetSpec::two_qubit(const Eigen::Matrix4d& w) {
  TargetSpec t;
  t.kind = TargetKind::kTwoQubit;
  t.wanted_pair = w;
  t.wanted = EffectiveGenerator::pair_coordinates(w);
  return t;
}

TargetSpec TargetSpec::encoded(CoordinateVector wanted, std::optional<StabilizerSpace> stabilizer) {
  TargetSpec t;
  t.kind = TargetKind::kEncoded;
  t.wanted = std::move(wanted);
  t.stabilizer = std::move(stabilizer);
  return t;
}

void TargetSpec::validate() const {
  const bool has_coords = wanted.coords.size() > 0;
  if (has_coords && !wanted.coords.allFinite()) throw Error(ErrorKind::kDomain, "wanted coordinates are not finite");
  if (has_coords && !wanted.basis) throw Error(ErrorKind::kShape, "wanted coordinates carry no basis");
  if (has_coords && wanted.coords.size() != static_cast<Eigen::Index>(wanted.basis->generator_count())) {
    throw Error(ErrorKind::kShape, "wanted coordinates do not match their basis");
  }
  switch (kind) {
    case TargetKind::kStorage:
      if ((has_coords && wanted.coords.cwiseAbs().maxCoeff() > 0.0) ||
          (wanted_pair && wanted_pair->cwiseAbs().maxCoeff() > 0.0)) {
        throw Error(ErrorKind::kDomain, "storage target must have zero wanted entries");
      }
      break;
    case TargetKind::kSingleQubit:
      if (wanted.coords.size() != 3) throw Error(ErrorKind::kShape, "single-qubit target needs 3 coordinates");
      break;
    case TargetKind::kTwoQubit:
      if (!wanted_pair) throw Error(ErrorKind::kShape, "two-qubit target needs a 4x4 pair matrix");
      if (!wanted_pair->allFinite()) throw Error(ErrorKind::kDomain, "wanted pair matrix is not finite");
      break;
    case TargetKind::kEncoded:
      if (!has_coords) throw Error(ErrorKind::kShape, "encoded target needs wanted coordinates");
      if (stabilizer && !stabilizer->empty() && stabilizer->generators().front().rows() != wanted.basis->dim()) {
        throw Error(ErrorKind::kShape, "stabilizer dimension does not match the wanted basis");
      }
      break;
  }
}

// ---------------------------------------------------------------------------

RVector apply_averaged(const std::vector<AdjointRotation>& rotations, const RVector& xi) {
  if (rotations.empty()) throw Error(ErrorKind::kShape, "no rotations to average");
  RVector sum = RVector::Zero(xi.size());
  for (const auto& r : rotations) {
    if (r.matrix().rows() != xi.size()) throw Error(ErrorKind::kShape, "rotation and vector sizes differ");
    sum += r.matrix().transpose() * xi;
  }
  return sum / static_cast<double>(rotations.size());
}

SynthesisResult solve_storage_directions(const std::vector<Eigen::Vector3d>& directions, double delta_t) {
  const BasisPtr basis = pauli_basis(1);
  RotationConstraints c;
  Eigen::Vector3d reference = Eigen::Vector3d::Zero();
  for (const auto& d : directions) {
    if (!d.allFinite()) throw Error(ErrorKind::kDomain, "error direction is not finite");
    if (d.norm() < kZeroTol) continue;
    c.mappings.push_back({d.normalized(), -d.normalized()});
    if (reference.norm() == 0.0) reference = d;
  }
  if (c.mappings.empty()) return trivial_result(2, reference, RVector::Zero(3), basis, delta_t);
  const RotationSolution sol = unitary_from_rotation(c);
  const AxisAngle kick = sol.representative;
  PulseGroup group({identity(2), kick.unitary()}, delta_t);
  return finish(std::move(group), reference, RVector::Zero(3), basis, sol.describe(), {{AxisAngle{}}, {kick}});
}

SynthesisResult solve_storage(const EffectiveGenerator& generator, int qubit, int max_group_size, double delta_t) {
  require_max_size(max_group_size);
  const Eigen::Vector3d xi = qubit_xi(generator, qubit);
  if (xi.norm() < kZeroTol) return trivial_result(2, xi, RVector::Zero(3), pauli_basis(1), delta_t);
  SynthesisResult r = solve_storage_directions({xi}, delta_t);
  r.residual = error_report(on_basis(apply_averaged(r.group.rotations(), xi), pauli_basis(1)),
                            on_basis(RVector::Zero(3), pauli_basis(1)));
  return r;
}

SynthesisResult solve_single_qubit_gate(const EffectiveGenerator& generator, const TargetSpec& target, int qubit,
                                        int max_group_size, double delta_t) {
  if (target.kind != TargetKind::kSingleQubit) throw Error(ErrorKind::kDomain, "target is not a single-qubit gate");
  target.validate();
  require_max_size(max_group_size);
  const BasisPtr basis = pauli_basis(1);
  const Eigen::Vector3d xi = qubit_xi(generator, qubit);
  const Eigen::Vector3d w = target.wanted.coords;
  const double len = xi.norm();
  if (w.norm() > len + kZeroTol) {
    throw InfeasibleError("averaged rotations cannot lengthen the generator: |w|/|xi| = " +
                              std::to_string(len > 0 ? w.norm() / len : std::numeric_limits<double>::infinity()),
                          w.norm() - len);
  }
  if ((w - xi).norm() < kZeroTol) return trivial_result(2, xi, w, basis, delta_t);
  if (w.norm() < kZeroTol) {
    SynthesisResult r = solve_storage(generator, qubit, max_group_size, delta_t);
    r.residual = error_report(on_basis(apply_averaged(r.group.rotations(), xi), basis), on_basis(w, basis));
    return r;
  }

  // Need m−1 rotated copies u_k of ξ (|u_k| = |ξ|) with Σ u_k = m·w − ξ.
  double best = std::numeric_limits<double>::infinity();
  for (int m = 2; m <= max_group_size; ++m) {
    const Eigen::Vector3d total = m * w - xi;
    const double reach = (m - 1) * len;
    const double tn = total.norm();
    if (m == 2) {
      const double gap = std::abs(tn - len);
      best = std::min(best, gap);
      if (gap > kSolveTol * std::max(1.0, len)) continue;
    } else if (tn > reach + kZeroTol) {
      best = std::min(best, tn - reach);
      continue;
    }
    std::vector<Eigen::Vector3d> copies;
    if (m == 2) {
      copies.push_back(total.normalized() * len);
    } else {
      const Eigen::Vector3d axis = tn > kZeroTol ? Eigen::Vector3d(total / tn) : Eigen::Vector3d(xi / len);
      const Eigen::Vector3d e1 = orthogonal_axis(axis);
      const Eigen::Vector3d e2 = axis.cross(e1);
      const double cos_phi = std::clamp(tn / reach, -1.0, 1.0);
      const double sin_phi = std::sqrt(std::max(0.0, 1.0 - cos_phi * cos_phi));
      for (int k = 0; k < m - 1; ++k) {
        const double psi = 2.0 * std::numbers::pi * k / (m - 1);
        copies.push_back(len * (cos_phi * axis + sin_phi * (std::cos(psi) * e1 + std::sin(psi) * e2)));
      }
    }
    std::vector<CMatrix> pulses{identity(2)};
    std::vector<std::vector<AxisAngle>> factors{{AxisAngle{}}};
    for (const auto& u : copies) {
      const AxisAngle a = rotation_taking(xi, u);
      pulses.push_back(a.unitary());
      factors.push_back({a});
    }
    SynthesisResult r = finish(PulseGroup(std::move(pulses), delta_t), xi, w, basis,
                               "rotated copies of xi spread symmetrically about m*w - xi; the azimuth is a free choice",
                               std::move(factors));
    if (r.residual.error_vector.coords.norm() < kSolveTol) return r;
    best = std::min(best, r.residual.error_vector.coords.norm());
  }
  throw InfeasibleError("no group of size <= " + std::to_string(max_group_size) + " reaches the wanted vector", best);
}

// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  std::vector<CMatrix> pulses;
  std::vector<std::vector<AxisAngle>> factors;
  double residual = std::numeric_limits<double>::infinity();
  std::string notes;
};

// Local-product parameters: 6 per non-identity pulse (θn̂ on each qubit).
std::vector<Eigen::Matrix3d> local_rotations(const RVector& x, int m) {
  std::vector<Eigen::Matrix3d> out;
  for (int k = 0; k < m - 1; ++k) {
    out.push_back(rotation_from_quaternion(quaternion_of(x.segment<3>(6 * k))));
    out.push_back(rotation_from_quaternion(quaternion_of(x.segment<3>(6 * k + 3))));
  }
  return out;
}

Candidate local_search(const Eigen::Matrix4d& xi, const Eigen::Matrix4d& wanted, int m,
                       const std::vector<RVector>& warm) {
  const auto residual = [&](const RVector& x) {
    const std::vector<Eigen::Matrix3d> rs = local_rotations(x, m);
    Eigen::Matrix4d sum = xi;
    for (int k = 0; k < m - 1; ++k) sum += local_action(xi, rs[static_cast<std::size_t>(2 * k)], rs[static_cast<std::size_t>(2 * k + 1)]);
    const Eigen::Matrix4d diff = sum / m - wanted;
    RVector r(15);
    for (int i = 1; i < 16; ++i) r(i - 1) = diff(i / 4, i % 4);
    return r;
  };
  std::vector<RVector> starts = warm;
  std::mt19937_64 rng(2026 + static_cast<unsigned>(m));
  std::uniform_real_distribution<double> uni(-std::numbers::pi, std::numbers::pi);
  for (int s = 0; s < 12; ++s) {
    RVector x(6 * (m - 1));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uni(rng) / 2.0;
    starts.push_back(x);
  }
  Candidate best;
  for (const auto& x0 : starts) {
    const detail::LeastSquaresOutcome out = detail::minimize_least_squares(residual, x0, 15);
    if (out.cost < best.residual) {
      best.residual = out.cost;
      best.pulses = {identity(4)};
      best.factors = {{AxisAngle{}, AxisAngle{}}};
      for (int k = 0; k < m - 1; ++k) {
        const AxisAngle a = axis_angle_of(out.x.segment<3>(6 * k));
        const AxisAngle b = axis_angle_of(out.x.segment<3>(6 * k + 3));
        best.pulses.push_back(kron(a.unitary(), b.unitary()));
        best.factors.push_back({a, b});
      }
    }
    if (best.residual < kSolveTol * 1e-3) break;
  }
  best.notes = "local products found numerically; other solutions may exist";
  return best;
}

Candidate general_search(const RVector& xi, const RVector& wanted, int m, const std::vector<std::vector<CMatrix>>& warm) {
  const BasisPtr basis = pauli_basis(2);
  const auto unitaries = [&](const std::vector<CMatrix>& base, const RVector& x) {
    std::vector<CMatrix> us;
    for (int k = 0; k < m - 1; ++k) {
      const CMatrix h = hermitian_from(x.segment(15 * k, 15), basis);
      us.push_back(base[static_cast<std::size_t>(k)] * (Complex(0, 1) * h).exp());
    }
    return us;
  };
  std::vector<std::vector<CMatrix>> bases = warm;
  std::mt19937_64 rng(4052 + static_cast<unsigned>(m));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < 6; ++s) {
    std::vector<CMatrix> base;
    for (int k = 0; k < m - 1; ++k) {
      RVector c(15);
      for (Eigen::Index i = 0; i < 15; ++i) c(i) = normal(rng);
      base.push_back((Complex(0, 1) * hermitian_from(c, basis)).exp());
    }
    bases.push_back(base);
  }
  Candidate best;
  for (const auto& base : bases) {
    const auto residual = [&](const RVector& x) {
      RVector sum = xi;
      for (const auto& u : unitaries(base, x)) sum += adjoint_of(u, *basis).matrix().transpose() * xi;
      return RVector(sum / m - wanted);
    };
    const detail::LeastSquaresOutcome out =
        detail::minimize_least_squares(residual, RVector::Zero(15 * (m - 1)), 15, 4000);
    if (out.cost < best.residual) {
      best.residual = out.cost;
      best.pulses = {identity(4)};
      for (const auto& u : unitaries(base, out.x)) best.pulses.push_back(fix_phase(u));
      best.factors.clear();
    }
    if (best.residual < kSolveTol * 1e-3) break;
  }
  best.notes = "general two-qubit unitaries found numerically; other solutions may exist";
  return best;
}

}  // namespace

SynthesisResult solve_two_qubit_matrix(const Eigen::Matrix4d& xi, const Eigen::Matrix4d& wanted, TwoQubitAnsatz ansatz,
                                       int max_group_size, double delta_t) {
  require_max_size(max_group_size);
  if (!xi.allFinite() || !wanted.allFinite()) throw Error(ErrorKind::kDomain, "pair matrices must be finite");
  const BasisPtr basis = pauli_basis(2);
  const RVector xv = EffectiveGenerator::pair_coordinates(xi).coords;
  const RVector wv = EffectiveGenerator::pair_coordinates(wanted).coords;
  if ((xv - wv).norm() < kZeroTol) return trivial_result(4, xv, wv, basis, delta_t);

  // Discrete catalogue first, in size order.
  const std::vector<GroupSkeleton>& catalogue = candidate_catalogue(4, max_group_size);
  std::vector<std::pair<double, const GroupSkeleton*>> scored;
  for (const auto& skel : catalogue) {
    PulseGroup group = skel.to_group(delta_t);
    const double r = (apply_averaged(group.rotations(), xv) - wv).norm();
    if (r < kSolveTol) {
      return finish(std::move(group), xv, wv, basis, "catalogue group " + skel.name + "; the solution is not unique",
                    skel.local_factors);
    }
    scored.emplace_back(r, &skel);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = scored.empty() ? std::numeric_limits<double>::infinity() : scored.front().first;

  std::vector<std::vector<CMatrix>> general_warm;
  for (int m = 2; m <= max_group_size; ++m) {
    std::vector<RVector> warm;
    for (const auto& [r, skel] : scored) {
      if (static_cast<int>(skel->size()) != m || warm.size() >= 3) continue;
      RVector x(6 * (m - 1));
      for (int k = 1; k < m; ++k) {
        const auto& f = skel->local_factors[static_cast<std::size_t>(k)];
        x.segment<3>(6 * (k - 1)) = f[0].axis * f[0].angle;
        x.segment<3>(6 * (k - 1) + 3) = f[1].axis * f[1].angle;
      }
      warm.push_back(x);
    }
    Candidate c = local_search(xi, wanted, m, warm);
    best = std::min(best, c.residual);
    if (c.residual < kSolveTol) {
      PulseGroup group(std::move(c.pulses), delta_t);
      SynthesisResult r = finish(std::move(group), xv, wv, basis, c.notes, std::move(c.factors));
      if (r.residual.error_vector.coords.norm() < kSolveTol) return r;
    }
    if (ansatz == TwoQubitAnsatz::kGeneral) {
      general_warm = {std::vector<CMatrix>(c.pulses.begin() + 1, c.pulses.end())};
      Candidate g = general_search(xv, wv, m, general_warm);
      best = std::min(best, g.residual);
      if (g.residual < kSolveTol) {
        PulseGroup group(std::move(g.pulses), delta_t);
        SynthesisResult r = finish(std::move(group), xv, wv, basis, g.notes, {});
        if (r.residual.error_vector.coords.norm() < kSolveTol) return r;
      }
    }
  }
  throw InfeasibleError("no two-qubit group of size <= " + std::to_string(max_group_size) +
                            " reaches the wanted pair matrix within the ansatz",
                        best);
}

SynthesisResult solve_two_qubit(const EffectiveGenerator& generator, const TargetSpec& target,
                                std::pair<int, int> pair, TwoQubitAnsatz ansatz, int max_group_size,
                                double delta_t) {
  if (target.kind != TargetKind::kTwoQubit) throw Error(ErrorKind::kDomain, "target is not a two-qubit target");
  target.validate();
  const bool swapped = pair.first > pair.second;
  const std::pair<int, int> key = swapped ? std::make_pair(pair.second, pair.first) : pair;
  const auto it = generator.xi_pair.find(key);
  if (it == generator.xi_pair.end()) {
    throw Error(ErrorKind::kShape, "no pair matrix for qubits (" + std::to_string(pair.first) + ", " +
                                       std::to_string(pair.second) + ")");
  }
  const Eigen::Matrix4d xi = swapped ? Eigen::Matrix4d(it->second.transpose()) : it->second;
  return solve_two_qubit_matrix(xi, *target.wanted_pair, ansatz, max_group_size, delta_t);
}

// ---------------------------------------------------------------------------

ErrorReport error_report(const CoordinateVector& tilde, const CoordinateVector& wanted) {
  if (!tilde.basis || !wanted.basis) throw Error(ErrorKind::kShape, "coordinate vectors need a basis");
  if (tilde.basis->id() != wanted.basis->id() || tilde.coords.size() != wanted.coords.size()) {
    throw Error(ErrorKind::kShape, "error report needs matching coordinate vectors");
  }
  ErrorReport out;
  out.error_vector = {tilde.coords - wanted.coords, tilde.basis};
  out.scalar_distance = std::sqrt(tilde.basis->normalization()) * out.error_vector.coords.norm();
  return out;
}

ErrorReport check_encoded(const CoordinateVector& result_generator, const TargetSpec& target) {
  ErrorReport out = error_report(result_generator, target.wanted);
  if (!target.stabilizer || target.stabilizer->empty()) {
    out.stabilizer_distance = out.scalar_distance;
    return out;
  }
  const OperatorBasis& basis = *result_generator.basis;
  const auto& gens = target.stabilizer->generators();
  if (gens.front().rows() != basis.dim()) throw Error(ErrorKind::kShape, "stabilizer dimension does not match basis");
  const auto nb = static_cast<Eigen::Index>(basis.size());
  RMatrix span(nb, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t m = 0; m < gens.size(); ++m) {
    for (Eigen::Index i = 0; i < nb; ++i) {
      span(i, static_cast<Eigen::Index>(m)) = basis.trace_with(static_cast<std::size_t>(i), gens[m]).real() / basis.normalization();
    }
  }
  RVector e = RVector::Zero(nb);
  e.tail(nb - 1) = out.error_vector.coords;
  const RVector coeffs = span.colPivHouseholderQr().solve(e);
  const double dist = std::sqrt(basis.normalization()) * (e - span * coeffs).norm();
  out.stabilizer_distance = std::min(dist, out.scalar_distance);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CMatrix> group_to_pulses(const std::vector<AdjointRotation>& rotations, Eigen::Index dim) {
  if (dim != 2 && dim != 4) throw Error(ErrorKind::kShape, "group_to_pulses supports dim 2 or 4");
  const BasisPtr basis = pauli_basis(dim == 2 ? 1 : 2);
  const auto nb = static_cast<Eigen::Index>(basis->generator_count());
  std::vector<CMatrix> out;
  for (const auto& rot : rotations) {
    if (rot.matrix().rows() != nb) throw Error(ErrorKind::kShape, "rotation size does not match dim");
    const RMatrix& r = rot.matrix();
    if (dim == 2) {
      const CMatrix u = unitary_from_rotation(rot).representative.unitary();
      if (rotation_mismatch(u, r, *basis) > kPulseTol) {
        throw Error(ErrorKind::kNonRepresentable, "axis-angle inversion failed");
      }
      out.push_back(u);
      continue;
    }
    // P_i U = U (Σ_j R_ij P_j) is linear in vec(U).
    std::vector<CMatrix> p;
    for (Eigen::Index i = 1; i <= nb; ++i) p.push_back(basis->element(static_cast<std::size_t>(i)));
    CMatrix sys(nb * dim * dim, dim * dim);
    const CMatrix eye = identity(dim);
    for (Eigen::Index i = 0; i < nb; ++i) {
      CMatrix image = CMatrix::Zero(dim, dim);
      for (Eigen::Index j = 0; j < nb; ++j) image += r(i, j) * p[static_cast<std::size_t>(j)];
      sys.middleRows(i * dim * dim, dim * dim) = kron(eye, p[static_cast<std::size_t>(i)]) - kron(image.transpose(), eye);
    }
    Eigen::JacobiSVD<CMatrix> svd(sys, Eigen::ComputeFullV);
    const CVector v = svd.matrixV().col(dim * dim - 1);
    CMatrix u = nearest_unitary(Eigen::Map<const CMatrix>(v.data(), dim, dim));
    double mismatch = rotation_mismatch(u, r, *basis);
    if (mismatch > kPulseTol) {
      const CMatrix base = u;
      const auto residual = [&](const RVector& x) {
        const CMatrix cand = base * (Complex(0, 1) * hermitian_from(x, basis)).exp();
        const RMatrix d = adjoint_of(cand, *basis).matrix() - r;
        return RVector(Eigen::Map<const RVector>(d.data(), d.size()));
      };
      const detail::LeastSquaresOutcome fit = detail::minimize_least_squares(residual, RVector::Zero(nb), nb * nb);
      const CMatrix refined = base * (Complex(0, 1) * hermitian_from(fit.x, basis)).exp();
      const double m2 = rotation_mismatch(refined, r, *basis);
      if (m2 < mismatch) {
        u = refined;
        mismatch = m2;
      }
    }
    if (mismatch > kPulseTol) {
      throw Error(ErrorKind::kNonRepresentable,
                  "rotation is not the adjoint image of a unitary (residual " + std::to_string(mismatch) + ")");
    }
    out.push_back(fix_phase(u));
  }
  return out;
}

}  // namespace bbforge
