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

#include "bbforge/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "bbforge/error.hpp"
#include "least_squares.hpp"

namespace bbforge {

namespace {

constexpr char kPauliLetters[4] = {'I', 'X', 'Y', 'Z'};

// Entry of the single-qubit Pauli `label` at (row, col) for the nonzero pattern.
Complex pauli_entry(std::uint8_t label, int row) {
  switch (label) {
    case 0: return 1.0;
    case 1: return 1.0;
    case 2: return row == 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
    default: return row == 0 ? 1.0 : -1.0;
  }
}

std::string format_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  const double abs_theta = std::abs(theta);
  const std::pair<double, const char*> named[] = {
      {0.0, "0"}, {pi / 4, "pi/4"}, {pi / 2, "pi/2"}, {3 * pi / 4, "3pi/4"}, {pi, "pi"}};
  for (const auto& [value, name] : named) {
    if (std::abs(abs_theta - value) < 1e-9) {
      return value == 0.0 ? std::string("0") : std::string("+/-") + name;
    }
  }
  std::ostringstream os;
  os.precision(12);
  os << "+/-" << abs_theta;
  return os.str();
}

}  // namespace

CMatrix pauli_matrix(int label) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (label) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error(ErrorKind::kDomain, "pauli label must be in 0..3");
  }
  return m;
}

PauliString::PauliString(std::vector<std::uint8_t> indices) : indices_(std::move(indices)) {
  if (indices_.empty() || indices_.size() > 31) {
    throw Error(ErrorKind::kShape, "pauli string needs 1..31 qubits");
  }
  const int n = num_qubits();
  for (int q = 0; q < n; ++q) {
    if (indices_[q] > 3) throw Error(ErrorKind::kDomain, "pauli label must be in 0..3");
    if (indices_[q] == 1 || indices_[q] == 2) flip_mask_ |= std::uint64_t{1} << (n - 1 - q);
  }
}

PauliString PauliString::from_label(std::string_view label) {
  std::vector<std::uint8_t> idx;
  for (char c : label) {
    const auto* pos = std::find(std::begin(kPauliLetters), std::end(kPauliLetters), c);
    if (pos == std::end(kPauliLetters)) {
      throw Error(ErrorKind::kDomain, "invalid pauli letter '" + std::string(1, c) + "'");
    }
    idx.push_back(static_cast<std::uint8_t>(pos - std::begin(kPauliLetters)));
  }
  return PauliString(std::move(idx));
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(indices_.begin(), indices_.end(), [](auto a) { return a != 0; }));
}

std::string PauliString::label() const {
  std::string s;
  for (auto a : indices_) s.push_back(kPauliLetters[a]);
  return s;
}

CMatrix PauliString::matrix() const {
  CMatrix m = pauli_matrix(indices_[0]);
  for (std::size_t q = 1; q < indices_.size(); ++q) m = kron(m, pauli_matrix(indices_[q]));
  return m;
}

Complex PauliString::trace_with(const CMatrix& a) const {
  const int n = num_qubits();
  const std::uint64_t dim = std::uint64_t{1} << n;
  Complex acc = 0.0;
  for (std::uint64_t r = 0; r < dim; ++r) {
    const std::uint64_t c = r ^ flip_mask_;
    Complex p = 1.0;
    for (int q = 0; q < n; ++q) {
      const int bit = static_cast<int>((r >> (n - 1 - q)) & 1U);
      p *= pauli_entry(indices_[q], bit);
    }
    acc += p * a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
  }
  return acc;
}

OperatorBasis OperatorBasis::from_matrices(std::string id, std::vector<CMatrix> elements, double normalization,
                                           std::vector<std::string> labels) {
  if (elements.empty()) throw Error(ErrorKind::kShape, "operator basis needs at least the identity");
  if (!(normalization > 0.0)) throw Error(ErrorKind::kDomain, "basis normalization must be positive");
  const Eigen::Index dim = elements.front().rows();
  if (!elements.front().isApprox(identity(dim) * elements.front()(0, 0)) ||
      std::abs(elements.front()(0, 0) - 1.0) > 1e-12) {
    throw Error(ErrorKind::kDomain, "basis element 0 must be the identity");
  }
  const double tol = default_tolerances().hermitian;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].rows() != dim || elements[i].cols() != dim) {
      throw Error(ErrorKind::kShape, "basis elements must share one square dimension");
    }
    if (hermiticity_defect(elements[i]) > tol) {
      throw Error(ErrorKind::kDomain, "basis element " + std::to_string(i) + " is not Hermitian");
    }
  }
  for (std::size_t i = 1; i < elements.size(); ++i) {
    for (std::size_t j = 1; j < elements.size(); ++j) {
      const Complex t = (elements[i] * elements[j]).trace();
      const double expected = i == j ? normalization : 0.0;
      if (std::abs(t - expected) > 1e-12 * std::max(1.0, normalization)) {
        throw Error(ErrorKind::kDomain, "basis elements " + std::to_string(i) + ", " + std::to_string(j) +
                                            " violate trace orthogonality");
      }
    }
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < elements.size(); ++i) labels.push_back("L" + std::to_string(i));
  }
  if (labels.size() != elements.size()) throw Error(ErrorKind::kShape, "label count mismatch");
  OperatorBasis basis;
  basis.id_ = std::move(id);
  basis.dim_ = dim;
  basis.normalization_ = normalization;
  basis.labels_ = std::move(labels);
  basis.elements_ = std::move(elements);
  return basis;
}

std::size_t OperatorBasis::index_of(const PauliString& p) const {
  if (!is_pauli() || p.num_qubits() != num_qubits_) {
    throw Error(ErrorKind::kShape, "pauli string does not belong to basis " + id_);
  }
  std::size_t idx = 0;
  for (auto a : p.indices()) idx = idx * 4 + a;
  return idx;
}

CMatrix OperatorBasis::element(std::size_t i) const {
  if (i >= size()) throw Error(ErrorKind::kShape, "basis index out of range");
  if (!elements_.empty()) return elements_[i];
  return pauli_[i].matrix();
}

Complex OperatorBasis::trace_with(std::size_t i, const CMatrix& a) const {
  if (is_pauli()) return pauli_.at(i).trace_with(a);
  return (elements_.at(i) * a).trace();
}

OperatorBasis build_pauli_basis(int num_qubits) {
  if (num_qubits < 1) throw Error(ErrorKind::kDomain, "pauli basis needs at least one qubit");
  if (num_qubits > kMaxPauliQubits) {
    throw Error(ErrorKind::kCapacity, "pauli basis limited to " + std::to_string(kMaxPauliQubits) + " qubits");
  }
  OperatorBasis basis;
  basis.id_ = "pauli:" + std::to_string(num_qubits);
  basis.num_qubits_ = num_qubits;
  basis.dim_ = Eigen::Index{1} << num_qubits;
  basis.normalization_ = static_cast<double>(basis.dim_);
  const std::size_t count = std::size_t{1} << (2 * num_qubits);
  basis.pauli_.reserve(count);
  basis.labels_.reserve(count);
  std::vector<std::uint8_t> idx(static_cast<std::size_t>(num_qubits), 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    for (int q = num_qubits - 1; q >= 0; --q) {
      idx[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>(rem % 4);
      rem /= 4;
    }
    basis.pauli_.emplace_back(idx);
    basis.labels_.push_back(basis.pauli_.back().label());
  }
  if (num_qubits <= 4) {
    basis.elements_.reserve(count);
    for (const auto& p : basis.pauli_) basis.elements_.push_back(p.matrix());
  }
  return basis;
}

BasisPtr pauli_basis(int num_qubits) {
  static std::mutex mutex;
  static std::array<BasisPtr, kMaxPauliQubits + 1> cache;
  if (num_qubits < 1 || num_qubits > kMaxPauliQubits) return std::make_shared<OperatorBasis>(build_pauli_basis(num_qubits));
  std::lock_guard lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(num_qubits)];
  if (!slot) slot = std::make_shared<const OperatorBasis>(build_pauli_basis(num_qubits));
  return slot;
}

CoordinateVector expand(const CMatrix& op, const BasisPtr& basis) {
  if (!basis) throw Error(ErrorKind::kShape, "expand: null basis");
  if (op.rows() != basis->dim() || op.cols() != basis->dim()) {
    throw Error(ErrorKind::kShape, "expand: operator is " + std::to_string(op.rows()) + "x" +
                                       std::to_string(op.cols()) + ", basis dimension " +
                                       std::to_string(basis->dim()));
  }
  if (hermiticity_defect(op) > default_tolerances().hermitian) {
    throw Error(ErrorKind::kDomain, "expand: operator is not Hermitian");
  }
  RVector coords(static_cast<Eigen::Index>(basis->generator_count()));
  for (std::size_t i = 1; i < basis->size(); ++i) {
    coords(static_cast<Eigen::Index>(i - 1)) = basis->trace_with(i, op).real() / basis->normalization();
  }
  return {std::move(coords), basis};
}

CMatrix reconstruct(const CoordinateVector& v, double trace_part) {
  if (!v.basis) throw Error(ErrorKind::kShape, "reconstruct: null basis");
  if (static_cast<std::size_t>(v.coords.size()) != v.basis->generator_count()) {
    throw Error(ErrorKind::kShape, "reconstruct: coordinate length does not match basis " + v.basis->id());
  }
  const Eigen::Index dim = v.basis->dim();
  CMatrix out = identity(dim) * (trace_part / static_cast<double>(dim));
  for (std::size_t i = 1; i < v.basis->size(); ++i) {
    const double c = v.coords(static_cast<Eigen::Index>(i - 1));
    if (c != 0.0) out += c * v.basis->element(i);
  }
  return out;
}

AxisAngle AxisAngle::make(const Eigen::Vector3d& axis, double angle) {
  const double norm = axis.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::kDomain, "axis must be non-zero");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);  // [−π, π]
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return AxisAngle{axis / norm, wrapped};
}

CMatrix AxisAngle::unitary() const {
  CMatrix u = std::cos(angle) * identity(2);
  for (int a = 0; a < 3; ++a) u += Complex(0.0, std::sin(angle) * axis(a)) * pauli_matrix(a + 1);
  return u;
}

AdjointRotation AdjointRotation::create(RMatrix matrix, Eigen::Index source_dim) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorKind::kShape, "rotation must be square");
  const double tol = default_tolerances().orthogonal;
  const double orth = (matrix.transpose() * matrix - RMatrix::Identity(matrix.rows(), matrix.cols())).norm();
  if (orth > tol) throw Error(ErrorKind::kDomain, "rotation is not orthogonal (defect " + std::to_string(orth) + ")");
  const double det = matrix.determinant();
  if (std::abs(det - 1.0) > tol) throw Error(ErrorKind::kDomain, "rotation determinant is not +1");
  return AdjointRotation(std::move(matrix), source_dim);
}

AdjointRotation adjoint_of(const CMatrix& unitary, const OperatorBasis& basis) {
  if (unitary.rows() != basis.dim() || unitary.cols() != basis.dim()) {
    throw Error(ErrorKind::kShape, "adjoint_of: unitary dimension does not match basis " + basis.id());
  }
  if (unitarity_defect(unitary) > default_tolerances().orthogonal) {
    throw Error(ErrorKind::kDomain, "adjoint_of: input is not unitary");
  }
  const auto n = static_cast<Eigen::Index>(basis.generator_count());
  RMatrix r(n, n);
  const CMatrix u_dag = unitary.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMatrix conj = u_dag * basis.element(static_cast<std::size_t>(i + 1)) * unitary;
    for (Eigen::Index j = 0; j < n; ++j) {
      r(i, j) = basis.trace_with(static_cast<std::size_t>(j + 1), conj).real() / basis.normalization();
    }
  }
  return AdjointRotation::create(std::move(r), basis.dim());
}

namespace {

// Q with R_{αγ}(q) = qᵀ Q q for unit q (see rotation_from_quaternion).
Eigen::Matrix4d entry_quadric(int alpha, int gamma) {
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  if (alpha == gamma) {
    q(0, 0) += 1.0;
    for (int j = 1; j < 4; ++j) q(j, j) -= 1.0;
    q(alpha + 1, alpha + 1) += 2.0;
  } else {
    q(alpha + 1, gamma + 1) += 1.0;
    q(gamma + 1, alpha + 1) += 1.0;
  }
  // −2 q0 ε_{αβγ} v_β
  for (int beta = 0; beta < 3; ++beta) {
    const int eps = (alpha == beta || beta == gamma || alpha == gamma)
                        ? 0
                        : (((beta - alpha + 3) % 3 == 1) ? 1 : -1);
    if (eps != 0) {
      q(0, beta + 1) -= eps;
      q(beta + 1, 0) -= eps;
    }
  }
  return q;
}

CMatrix su2_from_quaternion(const Eigen::Vector4d& q) {
  CMatrix u = q(0) * identity(2);
  for (int a = 0; a < 3; ++a) u += Complex(0.0, q(a + 1)) * pauli_matrix(a + 1);
  return u;
}

CMatrix pauli_dot(const Eigen::Vector3d& v) {
  CMatrix m = CMatrix::Zero(2, 2);
  for (int a = 0; a < 3; ++a) m += v(a) * pauli_matrix(a + 1);
  return m;
}

// Rows of the real linear map q ↦ (a·σ)U(q) − U(q)(b·σ).
RMatrix mapping_rows(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  RMatrix rows(8, 4);
  const CMatrix pa = pauli_dot(a);
  const CMatrix pb = pauli_dot(b);
  for (int k = 0; k < 4; ++k) {
    const CMatrix u = su2_from_quaternion(Eigen::Vector4d::Unit(k));
    const CMatrix f = pa * u - u * pb;
    for (int e = 0; e < 4; ++e) {
      rows(e, k) = f(e / 2, e % 2).real();
      rows(4 + e, k) = f(e / 2, e % 2).imag();
    }
  }
  return rows;
}

Eigen::Vector4d canonical_sign(Eigen::Vector4d q) {
  q.normalize();
  if (q(0) < -1e-12) return -q;
  if (std::abs(q(0)) <= 1e-12) {
    q(0) = 0.0;
    for (int j = 1; j < 4; ++j) {
      if (std::abs(q(j)) > 1e-12) return q(j) < 0 ? Eigen::Vector4d(-q) : q;
    }
  }
  return q;
}

AxisAngle axis_angle_from_quaternion(const Eigen::Vector4d& q) {
  const Eigen::Vector3d v = q.tail<3>();
  const double vn = v.norm();
  if (vn < 1e-12) return AxisAngle{Eigen::Vector3d::UnitZ(), 0.0};
  return AxisAngle{v / vn, std::atan2(vn, q(0))};
}

}  // namespace

Eigen::Matrix3d rotation_from_quaternion(const Eigen::Vector4d& q) {
  const Eigen::Vector4d unit = q.normalized();
  Eigen::Matrix3d r;
  for (int a = 0; a < 3; ++a) {
    for (int g = 0; g < 3; ++g) r(a, g) = unit.dot(entry_quadric(a, g) * unit);
  }
  return r;
}

RotationConstraints RotationConstraints::full(const Eigen::Matrix3d& r) {
  RotationConstraints c;
  for (int i = 0; i < 3; ++i) c.fix_row(i, r.row(i).transpose());
  return c;
}

RotationConstraints& RotationConstraints::fix_row(int row, const Eigen::Vector3d& values) {
  for (int j = 0; j < 3; ++j) entries.at(static_cast<std::size_t>(row))[static_cast<std::size_t>(j)] = values(j);
  return *this;
}

RotationConstraints& RotationConstraints::fix_column(int column, const Eigen::Vector3d& values) {
  for (int i = 0; i < 3; ++i) entries[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(column)) = values(i);
  return *this;
}

RotationConstraints& RotationConstraints::fix_entry(int row, int column, double value) {
  entries.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(column)) = value;
  return *this;
}

Eigen::Vector4d RotationSolution::quaternion() const {
  Eigen::Vector4d q;
  q << std::cos(representative.angle), std::sin(representative.angle) * representative.axis;
  return q;
}

std::string RotationSolution::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "theta = " << (angle_fixed ? format_angle(representative.angle) : std::string("free"));
  std::vector<std::string> free_names;
  const bool identity_like = angle_fixed && std::abs(representative.angle) < 1e-12;
  for (int j = 0; j < 3; ++j) {
    const std::string name = "n" + std::to_string(j + 1);
    if (identity_like || axis_free[static_cast<std::size_t>(j)]) {
      free_names.push_back(name);
    } else {
      const double value = std::abs(representative.axis(j)) < 1e-12 ? 0.0 : representative.axis(j);
      os << ", " << name << " = " << (value == 0.0 ? std::string("0") : format_angle(value).substr(3));
    }
  }
  if (identity_like) {
    os << ", axis free";
  } else if (!free_names.empty()) {
    os << ", (";
    for (std::size_t i = 0; i < free_names.size(); ++i) os << (i ? ", " : "") << free_names[i];
    os << ") free";
  }
  os << " [" << free_parameters << " free parameter" << (free_parameters == 1 ? "" : "s") << "]";
  return os.str();
}

RotationSolution unitary_from_rotation(const RotationConstraints& constraints) {
  constexpr double kFeasTol = 1e-9;

  std::array<bool, 3> row_full{};
  std::array<bool, 3> col_full{};
  for (std::size_t i = 0; i < 3; ++i) {
    row_full[i] = std::all_of(constraints.entries[i].begin(), constraints.entries[i].end(),
                              [](const auto& e) { return e.has_value(); });
    col_full[i] = constraints.entries[0][i] && constraints.entries[1][i] && constraints.entries[2][i];
  }

  std::vector<VectorMapping> mappings = constraints.mappings;
  for (int i = 0; i < 3; ++i) {
    if (row_full[static_cast<std::size_t>(i)]) {
      Eigen::Vector3d b;
      for (int j = 0; j < 3; ++j) b(j) = *constraints.entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      mappings.push_back({Eigen::Vector3d::Unit(i), b});
    }
    if (col_full[static_cast<std::size_t>(i)]) {
      Eigen::Vector3d c;
      for (int j = 0; j < 3; ++j) c(j) = *constraints.entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      mappings.push_back({c, Eigen::Vector3d::Unit(i)});
    }
  }

  RMatrix system(0, 4);
  for (const auto& m : mappings) {
    const double na = m.from.norm();
    const double nb = m.to.norm();
    if (std::abs(na - nb) > kFeasTol) {
      throw InfeasibleError("rotation constraint maps a vector of norm " + std::to_string(na) + " to norm " +
                                std::to_string(nb),
                            std::abs(na - nb));
    }
    if (na < 1e-12) continue;
    const RMatrix rows = mapping_rows(m.from / na, m.to / na);
    system.conservativeResize(system.rows() + rows.rows(), Eigen::NoChange);
    system.bottomRows(rows.rows()) = rows;
  }

  RMatrix span;
  if (system.rows() == 0) {
    span = RMatrix::Identity(4, 4);
  } else {
    Eigen::JacobiSVD<RMatrix> svd(system, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index k = 0; k < 4; ++k) {
      const double sv = k < s.size() ? s(k) : 0.0;
      if (sv < kFeasTol) null_cols.push_back(k);
    }
    if (null_cols.empty()) {
      throw InfeasibleError("rotation constraints admit no SU(2) element", s(s.size() - 1));
    }
    span.resize(4, static_cast<Eigen::Index>(null_cols.size()));
    for (std::size_t c = 0; c < null_cols.size(); ++c) span.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(null_cols[c]);
  }
  const Eigen::Index k = span.cols();

  // Entries not already implied by a full row or column become quadratic constraints.
  std::vector<RMatrix> quadrics;
  for (int a = 0; a < 3; ++a) {
    for (int g = 0; g < 3; ++g) {
      const auto& e = constraints.entries[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)];
      if (!e || row_full[static_cast<std::size_t>(a)] || col_full[static_cast<std::size_t>(g)]) continue;
      const Eigen::Matrix4d shifted = entry_quadric(a, g) - (*e) * Eigen::Matrix4d::Identity();
      quadrics.push_back(span.transpose() * shifted * span);
    }
  }

  RotationSolution sol;
  sol.quaternion_span = span;
  Eigen::Vector4d q;
  const Eigen::Index vector_rank = [&] {
    Eigen::JacobiSVD<RMatrix> svd(span.bottomRows(3));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) r += svd.singularValues()(i) > 1e-9 ? 1 : 0;
    return r;
  }();
  const bool scalar_pinned_zero = span.row(0).norm() < 1e-9;

  if (quadrics.empty()) {
    // Smallest rotation first, then a coordinate axis lying in the family,
    // then the projection of the lowest-index axis.
    const RMatrix projector = span * span.transpose();
    q = projector.col(0);
    for (int j = 1; j < 4 && q.norm() < 1e-9; ++j) {
      if ((projector.col(j) - Eigen::Vector4d::Unit(j)).norm() < 1e-9) q = Eigen::Vector4d::Unit(j);
    }
    for (int j = 1; j < 4 && q.norm() < 1e-9; ++j) q = projector.col(j);
    sol.free_parameters = static_cast<int>(k) - 1;
    sol.angle_fixed = k == 1 || scalar_pinned_zero;
    for (int j = 0; j < 3; ++j) {
      const bool pinned_zero = span.row(j + 1).norm() < 1e-9;
      sol.axis_free[static_cast<std::size_t>(j)] = vector_rank >= 2 && !pinned_zero;
    }
  } else {
    const auto residual = [&](const RVector& y) {
      RVector r(static_cast<Eigen::Index>(quadrics.size()));
      const double yy = std::max(y.squaredNorm(), 1e-300);
      for (std::size_t m = 0; m < quadrics.size(); ++m) r(static_cast<Eigen::Index>(m)) = y.dot(quadrics[m] * y) / yy;
      return r;
    };
    std::vector<RVector> starts;
    for (Eigen::Index i = 0; i < k; ++i) {
      starts.push_back(RVector::Unit(k, i));
      starts.push_back(-RVector::Unit(k, i));
    }
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 0; s < 24; ++s) {
      RVector y(k);
      for (Eigen::Index i = 0; i < k; ++i) y(i) = normal(rng);
      starts.push_back(y);
    }
    RVector best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& y0 : starts) {
      auto outcome = detail::minimize_least_squares(residual, y0, static_cast<Eigen::Index>(quadrics.size()));
      if (outcome.x.norm() < 1e-12) continue;
      if (outcome.cost < best_cost - 1e-15) {
        best_cost = outcome.cost;
        best = outcome.x.normalized();
      }
    }
    if (!(best_cost <= kFeasTol)) {
      throw InfeasibleError("rotation entries admit no SU(2) element", best_cost);
    }
    RMatrix jac(static_cast<Eigen::Index>(quadrics.size()), k);
    for (std::size_t m = 0; m < quadrics.size(); ++m) {
      RVector grad = 2.0 * quadrics[m] * best;
      grad -= grad.dot(best) * best;
      jac.row(static_cast<Eigen::Index>(m)) = grad.transpose();
    }
    Eigen::JacobiSVD<RMatrix> jsvd(jac);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < jsvd.singularValues().size(); ++i) rank += jsvd.singularValues()(i) > 1e-7 ? 1 : 0;
    sol.free_parameters = static_cast<int>(k - 1 - rank);
    q = span * best;
    sol.angle_fixed = sol.free_parameters == 0 || scalar_pinned_zero;
    for (int j = 0; j < 3; ++j) {
      const bool pinned_zero = span.row(j + 1).norm() < 1e-9;
      sol.axis_free[static_cast<std::size_t>(j)] = sol.free_parameters > 0 && !pinned_zero;
    }
  }

  q = canonical_sign(q);
  sol.representative = axis_angle_from_quaternion(q);
  if (sol.representative.angle == 0.0) sol.axis_free = {true, true, true};
  return sol;
}

RotationSolution unitary_from_rotation(const AdjointRotation& rotation) {
  if (rotation.source_dim() != 2 || rotation.matrix().rows() != 3) {
    throw Error(ErrorKind::kShape, "axis-angle inversion needs an SO(3) rotation from SU(2)");
  }
  return unitary_from_rotation(RotationConstraints::full(rotation.matrix()));
}

}  // namespace bbforge
